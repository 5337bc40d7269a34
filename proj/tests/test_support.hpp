#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "rbtr/completion.hpp"
#include "rbtr/rb_matrix.hpp"
#include "rbtr/rb_tensor.hpp"
#include "rbtr/tensor_ring.hpp"

namespace rbtr::testing {

inline RBScalar random_scalar(std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    return RBScalar::from_coeffs(a, b, c, d);
}

inline RBMatrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
    RBMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m.set(i, j, random_scalar(gen));
    return m;
}

inline RBTensor random_tensor(std::mt19937_64& gen, const Dims& dims) {
    RBTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) t.set(i, random_scalar(gen));
    return t;
}

inline RBTensor gaussian_tensor(std::mt19937_64& gen, const Dims& dims) {
    std::normal_distribution<double> n;
    RBTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = n(gen), b = n(gen), c = n(gen), d = n(gen);
        t.set(i, RBScalar::from_coeffs(a, b, c, d));
    }
    return t;
}

/// Cores of shape r_k x I_k x r_{k+1} with entries uniform in [-1, 1]^4.
inline TRCores random_cores(std::mt19937_64& gen, const std::vector<std::size_t>& ranks, const Dims& dims) {
    std::vector<RBTensor> cores;
    const std::size_t n = dims.size();
    for (std::size_t k = 0; k < n; ++k) cores.push_back(random_tensor(gen, {ranks[k], dims[k], ranks[(k + 1) % n]}));
    return TRCores(std::move(cores));
}

/// Multiplication table i^2 = k^2 = -1, j^2 = 1, ij = ji = k, jk = kj = i, ik = ki = -j,
/// evaluated on real coefficients without the split form.
inline std::array<double, 4> table_product(const std::array<double, 4>& x, const std::array<double, 4>& y) {
    const auto [a1, b1, c1, d1] = x;
    const auto [a2, b2, c2, d2] = y;
    return {
        a1 * a2 - b1 * b2 + c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 + d1 * c2,
        a1 * c2 + c1 * a2 - b1 * d2 - d1 * b2,
        a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
    };
}

inline RBScalar table_mul(const RBScalar& x, const RBScalar& y) {
    const auto p = table_product(x.coeffs(), y.coeffs());
    return RBScalar::from_coeffs(p[0], p[1], p[2], p[3]);
}

inline double scalar_distance(const RBScalar& x, const RBScalar& y) { return rb_modulus(x - y); }

/// Dense product by explicit sums of table products.
inline RBMatrix entrywise_matmul(const RBMatrix& a, const RBMatrix& b) {
    RBMatrix out(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            RBScalar acc{};
            for (Eigen::Index l = 0; l < a.cols(); ++l) acc = acc + table_mul(a(i, l), b(l, j));
            out.set(i, j, acc);
        }
    }
    return out;
}

/// (|A_c1|_* + |A_c2|_*) / 2, the nuclear norm whose proximal map is channel-wise shrinkage.
inline double split_nuclear_norm(const RBMatrix& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> s1(a.c1()), s2(a.c2());
    return 0.5 * (s1.singularValues().sum() + s2.singularValues().sum());
}

// Dense periodic forward differences on column-major vec of an r x c matrix.
inline Eigen::MatrixXd dense_horizontal(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(r * c, r * c);
    for (Eigen::Index n = 0; n < c; ++n)
        for (Eigen::Index m = 0; m < r; ++m) {
            d(m + r * n, m + r * ((n + 1) % c)) += 1.0;
            d(m + r * n, m + r * n) -= 1.0;
        }
    return d;
}

inline Eigen::MatrixXd dense_vertical(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(r * c, r * c);
    for (Eigen::Index n = 0; n < c; ++n)
        for (Eigen::Index m = 0; m < r; ++m) {
            d(m + r * n, (m + 1) % r + r * n) += 1.0;
            d(m + r * n, m + r * n) -= 1.0;
        }
    return d;
}

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) { return m.reshaped(); }

inline RBMatrix apply_dense(const Eigen::MatrixXd& op, const RBMatrix& x) {
    const Eigen::VectorXcd a = op.cast<cplx>() * vec(x.c1());
    const Eigen::VectorXcd b = op.cast<cplx>() * vec(x.c2());
    return {a.reshaped(x.rows(), x.cols()), b.reshaped(x.rows(), x.cols())};
}

inline double real_inner(const RBMatrix& a, const RBMatrix& b) {
    return 0.5 * ((a.c1().conjugate().cwiseProduct(b.c1())).sum().real() +
                  (a.c2().conjugate().cwiseProduct(b.c2())).sum().real());
}

inline CompletionState random_state(std::mt19937_64& gen, const Dims& dims) {
    CompletionState s;
    s.X = random_tensor(gen, dims);
    s.Z = random_tensor(gen, dims);
    s.Q = random_tensor(gen, dims);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        s.A.push_back(random_tensor(gen, dims));
        s.B.push_back(random_tensor(gen, dims));
    }
    const auto r = static_cast<Eigen::Index>(dims[0]);
    const auto c = static_cast<Eigen::Index>(num_elements(dims) / dims[0]);
    s.E1 = random_matrix(gen, r, c);
    s.E2 = random_matrix(gen, r, c);
    s.F1 = random_matrix(gen, r, c);
    s.F2 = random_matrix(gen, r, c);
    return s;
}

} // namespace rbtr::testing
