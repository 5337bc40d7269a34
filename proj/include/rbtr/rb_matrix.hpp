#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rbtr/rb_scalar.hpp"

namespace rbtr {

/**
 * Dense reduced-biquaternion matrix Q = Q_c1 e1 + Q_c2 e2 held as its two
 * complex channels. Both channels always share the same shape.
 */
class RBMatrix {
public:
    RBMatrix() = default;
    RBMatrix(Eigen::Index rows, Eigen::Index cols);
    RBMatrix(Eigen::MatrixXcd c1, Eigen::MatrixXcd c2);

    static RBMatrix identity(Eigen::Index n);
    /// Q = A + Bi + Cj + Dk from real coefficient matrices of equal shape.
    static RBMatrix from_coeffs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& c, const Eigen::MatrixXd& d);

    Eigen::Index rows() const { return c1_.rows(); }
    Eigen::Index cols() const { return c1_.cols(); }

    const Eigen::MatrixXcd& c1() const { return c1_; }
    const Eigen::MatrixXcd& c2() const { return c2_; }
    Eigen::MatrixXcd& c1() { return c1_; }
    Eigen::MatrixXcd& c2() { return c2_; }

    RBScalar operator()(Eigen::Index i, Eigen::Index j) const { return {c1_(i, j), c2_(i, j)}; }
    void set(Eigen::Index i, Eigen::Index j, const RBScalar& v) {
        c1_(i, j) = v.c1;
        c2_(i, j) = v.c2;
    }

    RBMatrix& operator+=(const RBMatrix& o);
    RBMatrix& operator-=(const RBMatrix& o);
    RBMatrix& operator*=(double s);

    friend bool operator==(const RBMatrix& a, const RBMatrix& b) {
        return a.c1_.rows() == b.c1_.rows() && a.c1_.cols() == b.c1_.cols() && a.c1_ == b.c1_ &&
               a.c2_ == b.c2_;
    }

private:
    Eigen::MatrixXcd c1_;
    Eigen::MatrixXcd c2_;
};

RBMatrix operator+(RBMatrix a, const RBMatrix& b);
RBMatrix operator-(RBMatrix a, const RBMatrix& b);
RBMatrix operator*(double s, RBMatrix a);

/// Channel-wise product (A_c1 B_c1, A_c2 B_c2). Throws DimensionError when A.cols != B.rows.
RBMatrix matmul(const RBMatrix& a, const RBMatrix& b);
RBMatrix conj_transpose(const RBMatrix& a);
/// Plain transpose without conjugation.
RBMatrix transpose(const RBMatrix& a);
RBScalar trace(const RBMatrix& a);

/// sqrt(sum |q_ij|^2) = sqrt((|Q_c1|_F^2 + |Q_c2|_F^2) / 2)
double frobenius(const RBMatrix& a);

struct RBSvdResult {
    RBMatrix U;              ///< M x r, r = min(M, N)
    Eigen::VectorXd sigma1;  ///< singular values of Q_c1, descending
    Eigen::VectorXd sigma2;  ///< singular values of Q_c2, descending
    RBMatrix V;              ///< N x r

    /// |sigma_i| = sqrt((sigma1_i^2 + sigma2_i^2) / 2), paired by sorted index.
    Eigen::VectorXd moduli() const;
    /// U diag(sigma1 e1 + sigma2 e2) V^H
    RBMatrix reconstruct() const;
};

/// Thin SVD of one complex channel: U (M x r), sigma (descending), V (N x r).
struct ComplexSvd {
    Eigen::MatrixXcd U;
    Eigen::VectorXd sigma;
    Eigen::MatrixXcd V;
};

/// Throws NumericalError naming `channel` if the backend fails to converge.
ComplexSvd complex_svd(const Eigen::MatrixXcd& m, bool vectors, const char* channel);

/// RB singular value decomposition from the SVDs of the two split channels.
RBSvdResult rbsvd(const RBMatrix& a);

/// Moduli of the RB singular values without forming U and V.
Eigen::VectorXd singular_moduli(const RBMatrix& a);

inline constexpr double kDefaultRankTol = 1e-10;

/// Number of RB singular values with modulus > tol * (largest modulus).
std::size_t rb_rank(const RBMatrix& a, double tol = kDefaultRankTol);

/// sum_i |sigma_i|
double nuclear_norm(const RBMatrix& a);

/// Singular value thresholding. Each channel's singular values are shrunk
/// independently, sigma <- max(0, sigma - tau), then the factors are reassembled.
RBMatrix svt(const RBMatrix& gamma, double tau);

/// 4M x 4N real representation [A -B C -D; B A D C; C -D A -B; D C B A].
Eigen::MatrixXd matrix_real_rep(const RBMatrix& a);

/// Real part a of an RB number.
inline double real_part(const RBScalar& x) { return 0.5 * (x.c1.real() + x.c2.real()); }

/// sqrt(sum |y_i|^2) over RB moduli.
double rb_norm2(std::span<const RBScalar> y);

/// Scale factor max(|y| - lambda/beta, 0) / |y| applied by group_shrink; 0 when |y| = 0.
inline double group_shrink_factor(double norm, double lambda, double beta) {
    if (norm <= 0.0) return 0.0;
    const double kept = norm - lambda / beta;
    return kept > 0.0 ? kept / norm : 0.0;
}

/// argmin_x (beta/2)|x - y|_2^2 + lambda |x|_2 over RB vectors.
std::vector<RBScalar> group_shrink(std::span<const RBScalar> y, double lambda, double beta);

} // namespace rbtr
