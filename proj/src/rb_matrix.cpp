#include "rbtr/rb_matrix.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "rbtr/errors.hpp"

namespace rbtr {

namespace {

void require_same_shape(const RBMatrix& a, const RBMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

RBMatrix scale_columns_and_multiply(const RBMatrix& u, const Eigen::VectorXd& s1, const Eigen::VectorXd& s2,
                                    const RBMatrix& v) {
    Eigen::MatrixXcd c1 = u.c1() * s1.cast<cplx>().asDiagonal() * v.c1().adjoint();
    Eigen::MatrixXcd c2 = u.c2() * s2.cast<cplx>().asDiagonal() * v.c2().adjoint();
    return {std::move(c1), std::move(c2)};
}

} // namespace

RBMatrix::RBMatrix(Eigen::Index rows, Eigen::Index cols)
    : c1_(Eigen::MatrixXcd::Zero(rows, cols)), c2_(Eigen::MatrixXcd::Zero(rows, cols)) {}

RBMatrix::RBMatrix(Eigen::MatrixXcd c1, Eigen::MatrixXcd c2) : c1_(std::move(c1)), c2_(std::move(c2)) {
    if (c1_.rows() != c2_.rows() || c1_.cols() != c2_.cols()) {
        throw DimensionError("RBMatrix: channel shapes differ");
    }
}

RBMatrix RBMatrix::identity(Eigen::Index n) {
    return {Eigen::MatrixXcd::Identity(n, n), Eigen::MatrixXcd::Identity(n, n)};
}

RBMatrix RBMatrix::from_coeffs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                               const Eigen::MatrixXd& d) {
    if (b.rows() != a.rows() || c.rows() != a.rows() || d.rows() != a.rows() || b.cols() != a.cols() ||
        c.cols() != a.cols() || d.cols() != a.cols()) {
        throw DimensionError("RBMatrix::from_coeffs: coefficient shapes differ");
    }
    Eigen::MatrixXcd qa(a.rows(), a.cols());
    Eigen::MatrixXcd qb(a.rows(), a.cols());
    qa.real() = a;
    qa.imag() = b;
    qb.real() = c;
    qb.imag() = d;
    return {qa + qb, qa - qb};
}

RBMatrix& RBMatrix::operator+=(const RBMatrix& o) {
    require_same_shape(*this, o, "operator+");
    c1_ += o.c1_;
    c2_ += o.c2_;
    return *this;
}

RBMatrix& RBMatrix::operator-=(const RBMatrix& o) {
    require_same_shape(*this, o, "operator-");
    c1_ -= o.c1_;
    c2_ -= o.c2_;
    return *this;
}

RBMatrix& RBMatrix::operator*=(double s) {
    c1_ *= s;
    c2_ *= s;
    return *this;
}

RBMatrix operator+(RBMatrix a, const RBMatrix& b) { return a += b; }
RBMatrix operator-(RBMatrix a, const RBMatrix& b) { return a -= b; }
RBMatrix operator*(double s, RBMatrix a) { return a *= s; }

RBMatrix matmul(const RBMatrix& a, const RBMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()) + " differ");
    }
    return {a.c1() * b.c1(), a.c2() * b.c2()};
}

RBMatrix conj_transpose(const RBMatrix& a) { return {a.c1().adjoint(), a.c2().adjoint()}; }

RBMatrix transpose(const RBMatrix& a) { return {a.c1().transpose(), a.c2().transpose()}; }

RBScalar trace(const RBMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("trace: matrix is not square");
    return {a.c1().trace(), a.c2().trace()};
}

double frobenius(const RBMatrix& a) {
    return std::sqrt(0.5 * (a.c1().squaredNorm() + a.c2().squaredNorm()));
}

Eigen::VectorXd RBSvdResult::moduli() const {
    return ((sigma1.array().square() + sigma2.array().square()) * 0.5).sqrt().matrix();
}

RBMatrix RBSvdResult::reconstruct() const { return scale_columns_and_multiply(U, sigma1, sigma2, V); }

ComplexSvd complex_svd(const Eigen::MatrixXcd& m, bool vectors, const char* channel) {
    ComplexSvd out;
    const Eigen::Index r = std::min(m.rows(), m.cols());
    if (r == 0) {
        out.U = Eigen::MatrixXcd::Zero(m.rows(), 0);
        out.V = Eigen::MatrixXcd::Zero(m.cols(), 0);
        return out;
    }
    const unsigned opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, opts);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
        throw NumericalError(std::string("complex SVD did not converge on channel ") + channel);
    }
    out.sigma = svd.singularValues();
    if (vectors) {
        out.U = svd.matrixU();
        out.V = svd.matrixV();
    }
    return out;
}

RBSvdResult rbsvd(const RBMatrix& a) {
    ComplexSvd s1 = complex_svd(a.c1(), true, "c1");
    ComplexSvd s2 = complex_svd(a.c2(), true, "c2");
    return {RBMatrix(std::move(s1.U), std::move(s2.U)), std::move(s1.sigma), std::move(s2.sigma),
            RBMatrix(std::move(s1.V), std::move(s2.V))};
}

Eigen::VectorXd singular_moduli(const RBMatrix& a) {
    const ComplexSvd s1 = complex_svd(a.c1(), false, "c1");
    const ComplexSvd s2 = complex_svd(a.c2(), false, "c2");
    return ((s1.sigma.array().square() + s2.sigma.array().square()) * 0.5).sqrt().matrix();
}

std::size_t rb_rank(const RBMatrix& a, double tol) {
    const Eigen::VectorXd mod = singular_moduli(a);
    if (mod.size() == 0) return 0;
    const double top = mod.maxCoeff();
    if (top <= 0.0) return 0;
    return static_cast<std::size_t>((mod.array() > tol * top).count());
}

double nuclear_norm(const RBMatrix& a) { return singular_moduli(a).sum(); }

RBMatrix svt(const RBMatrix& gamma, double tau) {
    RBSvdResult s = rbsvd(gamma);
    const Eigen::VectorXd s1 = (s.sigma1.array() - tau).max(0.0).matrix();
    const Eigen::VectorXd s2 = (s.sigma2.array() - tau).max(0.0).matrix();
    return scale_columns_and_multiply(s.U, s1, s2, s.V);
}

Eigen::MatrixXd matrix_real_rep(const RBMatrix& q) {
    const Eigen::MatrixXcd qa = 0.5 * (q.c1() + q.c2());
    const Eigen::MatrixXcd qb = 0.5 * (q.c1() - q.c2());
    const Eigen::MatrixXd a = qa.real(), b = qa.imag(), c = qb.real(), d = qb.imag();
    const Eigen::Index m = q.rows(), n = q.cols();
    Eigen::MatrixXd r(4 * m, 4 * n);
    r << a, -b, c, -d,
         b, a, d, c,
         c, -d, a, -b,
         d, c, b, a;
    return r;
}

double rb_norm2(std::span<const RBScalar> y) {
    double acc = 0.0;
    for (const auto& v : y) acc += rb_abs2(v);
    return std::sqrt(acc);
}

std::vector<RBScalar> group_shrink(std::span<const RBScalar> y, double lambda, double beta) {
    const double f = group_shrink_factor(rb_norm2(y), lambda, beta);
    std::vector<RBScalar> out;
    out.reserve(y.size());
    for (const auto& v : y) out.push_back(f * v);
    return out;
}

} // namespace rbtr
