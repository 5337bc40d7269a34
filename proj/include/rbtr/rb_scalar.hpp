#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Core>

namespace rbtr {

using cplx = std::complex<double>;

/**
 * A reduced biquaternion q = a + bi + cj + dk with i^2 = k^2 = -1, j^2 = 1 and
 * ij = ji = k.
 *
 * Storage is the idempotent split q = c1 e1 + c2 e2, e1 = (1+j)/2,
 * e2 = (1-j)/2, where c1 = (a+bi) + (c+di) and c2 = (a+bi) - (c+di). Because
 * e1 e2 = 0, addition, multiplication and conjugation act on c1 and c2
 * independently, which makes the algebra commutative and exact in this form.
 */
struct RBScalar {
    cplx c1{0.0, 0.0};
    cplx c2{0.0, 0.0};

    constexpr RBScalar() = default;
    constexpr RBScalar(cplx e1_part, cplx e2_part) : c1(e1_part), c2(e2_part) {}

    static RBScalar from_coeffs(double a, double b, double c, double d) {
        const cplx qa{a, b};
        const cplx qb{c, d};
        return {qa + qb, qa - qb};
    }
    static RBScalar real(double r) { return {cplx{r, 0.0}, cplx{r, 0.0}}; }

    static RBScalar one() { return real(1.0); }
    static RBScalar unit_i() { return from_coeffs(0, 1, 0, 0); }
    static RBScalar unit_j() { return from_coeffs(0, 0, 1, 0); }
    static RBScalar unit_k() { return from_coeffs(0, 0, 0, 1); }
    static RBScalar e1() { return {cplx{1.0, 0.0}, cplx{0.0, 0.0}}; }
    static RBScalar e2() { return {cplx{0.0, 0.0}, cplx{1.0, 0.0}}; }

    /// (a, b, c, d) with a+bi = (c1+c2)/2 and c+di = (c1-c2)/2.
    std::array<double, 4> coeffs() const {
        const cplx qa = 0.5 * (c1 + c2);
        const cplx qb = 0.5 * (c1 - c2);
        return {qa.real(), qa.imag(), qb.real(), qb.imag()};
    }

    friend bool operator==(const RBScalar&, const RBScalar&) = default;
};

inline RBScalar operator+(const RBScalar& x, const RBScalar& y) { return {x.c1 + y.c1, x.c2 + y.c2}; }
inline RBScalar operator-(const RBScalar& x, const RBScalar& y) { return {x.c1 - y.c1, x.c2 - y.c2}; }
inline RBScalar operator-(const RBScalar& x) { return {-x.c1, -x.c2}; }
inline RBScalar operator*(double s, const RBScalar& x) { return {s * x.c1, s * x.c2}; }

inline RBScalar rb_mul(const RBScalar& x, const RBScalar& y) { return {x.c1 * y.c1, x.c2 * y.c2}; }
inline RBScalar operator*(const RBScalar& x, const RBScalar& y) { return rb_mul(x, y); }

/// a - bi + cj - dk
inline RBScalar rb_conj(const RBScalar& x) { return {std::conj(x.c1), std::conj(x.c2)}; }

/// Squared modulus a^2+b^2+c^2+d^2 = (|c1|^2 + |c2|^2) / 2.
inline double rb_abs2(const RBScalar& x) { return 0.5 * (std::norm(x.c1) + std::norm(x.c2)); }

inline double rb_modulus(const RBScalar& x) { return std::sqrt(rb_abs2(x)); }

/// 4x4 real representation with rows [a -b c -d; b a d c; c -d a -b; d c b a].
inline Eigen::Matrix4d scalar_real_rep(const RBScalar& x) {
    const auto [a, b, c, d] = x.coeffs();
    Eigen::Matrix4d m;
    m << a, -b, c, -d,
         b, a, d, c,
         c, -d, a, -b,
         d, c, b, a;
    return m;
}

} // namespace rbtr
