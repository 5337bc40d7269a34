#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/LU>

#include "rbtr/rb_scalar.hpp"
#include "test_support.hpp"

using namespace rbtr;
using rbtr::testing::random_scalar;
using rbtr::testing::table_mul;

namespace {

void expect_coeffs(const RBScalar& x, double a, double b, double c, double d, double tol = 1e-15) {
    const auto q = x.coeffs();
    EXPECT_NEAR(q[0], a, tol);
    EXPECT_NEAR(q[1], b, tol);
    EXPECT_NEAR(q[2], c, tol);
    EXPECT_NEAR(q[3], d, tol);
}

} // namespace

TEST(RbScalar, CoefficientRoundTrip) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 100; ++t) {
        const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
        expect_coeffs(RBScalar::from_coeffs(a, b, c, d), a, b, c, d, 1e-14);
    }
}

TEST(RbScalar, SplitComponentsMatchDefinition) {
    const RBScalar x = RBScalar::from_coeffs(1, 2, 3, 4);
    EXPECT_EQ(x.c1, cplx(4, 6));
    EXPECT_EQ(x.c2, cplx(-2, -2));
}

TEST(RbScalar, UnitProducts) {
    expect_coeffs(RBScalar::unit_i() * RBScalar::unit_j(), 0, 0, 0, 1);
    expect_coeffs(RBScalar::unit_j() * RBScalar::unit_i(), 0, 0, 0, 1);
    expect_coeffs(RBScalar::unit_j() * RBScalar::unit_j(), 1, 0, 0, 0);
    expect_coeffs(RBScalar::unit_i() * RBScalar::unit_i(), -1, 0, 0, 0);
    expect_coeffs(RBScalar::unit_k() * RBScalar::unit_k(), -1, 0, 0, 0);
    expect_coeffs(RBScalar::unit_i() * RBScalar::unit_k(), 0, 0, -1, 0);
    expect_coeffs(RBScalar::unit_j() * RBScalar::unit_k(), 0, 1, 0, 0);
    expect_coeffs(RBScalar::e1() * RBScalar::e2(), 0, 0, 0, 0);
}

TEST(RbScalar, ProductMatchesMultiplicationTable) {
    std::mt19937_64 gen(2);
    for (int t = 0; t < 1000; ++t) {
        const RBScalar x = random_scalar(gen), y = random_scalar(gen);
        EXPECT_LT(rbtr::testing::scalar_distance(x * y, table_mul(x, y)), 1e-14);
    }
}

TEST(RbScalar, IdentityAndCommutativity) {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 100; ++t) {
        const RBScalar x = random_scalar(gen), y = random_scalar(gen);
        EXPECT_EQ(x * RBScalar::one(), x);
        EXPECT_EQ(x * y, y * x);
    }
}

TEST(RbScalar, Idempotents) {
    const RBScalar e1 = RBScalar::e1(), e2 = RBScalar::e2();
    EXPECT_EQ(e1 * e1, e1);
    EXPECT_EQ(e2 * e2, e2);
    EXPECT_EQ(e1 + e2, RBScalar::one());
    expect_coeffs(e1, 0.5, 0, 0.5, 0);
    expect_coeffs(e2, 0.5, 0, -0.5, 0);
}

TEST(RbScalar, Conjugate) {
    expect_coeffs(rb_conj(RBScalar::from_coeffs(1, 1, 1, 1)), 1, -1, 1, -1);
    EXPECT_EQ(rb_conj(RBScalar::real(2.5)), RBScalar::real(2.5));
    std::mt19937_64 gen(4);
    for (int t = 0; t < 100; ++t) {
        const RBScalar x = random_scalar(gen);
        EXPECT_EQ(rb_conj(rb_conj(x)), x);
    }
}

TEST(RbScalar, Modulus) {
    EXPECT_DOUBLE_EQ(rb_modulus(RBScalar::from_coeffs(1, 1, 1, 1)), 2.0);
    EXPECT_EQ(rb_modulus(RBScalar{}), 0.0);
    const RBScalar x = 3.0 * RBScalar::e1() + 4.0 * RBScalar::e2();
    expect_coeffs(x, 3.5, 0, -0.5, 0);
    EXPECT_NEAR(rb_modulus(x), std::sqrt(12.5), 1e-15);
    EXPECT_NEAR(rb_modulus(x), 3.5355339059327378, 1e-15);
}

TEST(RbScalar, ModulusOfProductSplitIdentity) {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 500; ++t) {
        const RBScalar x = random_scalar(gen), y = random_scalar(gen);
        const RBScalar p = x * y;
        EXPECT_NEAR(rb_abs2(p), 0.5 * (std::norm(x.c1 * y.c1) + std::norm(x.c2 * y.c2)), 1e-14);
        EXPECT_LE(rb_modulus(p), std::sqrt(2.0) * rb_modulus(x) * rb_modulus(y) + 1e-14);
    }
    EXPECT_EQ(rb_modulus(RBScalar::e1() * RBScalar::e2()), 0.0);
}

TEST(RbScalar, RealRepresentation) {
    EXPECT_EQ(scalar_real_rep(RBScalar::one()), Eigen::Matrix4d::Identity());
    const Eigen::Matrix4d j = scalar_real_rep(RBScalar::unit_j());
    Eigen::Matrix4d expect;
    expect << 0, 0, 1, 0,
              0, 0, 0, 1,
              1, 0, 0, 0,
              0, 1, 0, 0;
    EXPECT_EQ(j, expect);
    EXPECT_EQ(j.fullPivLu().rank(), 4);
}

TEST(RbScalar, RealRepresentationHomomorphism) {
    std::mt19937_64 gen(6);
    for (int t = 0; t < 500; ++t) {
        const RBScalar x = random_scalar(gen), y = random_scalar(gen);
        EXPECT_LT((scalar_real_rep(x * y) - scalar_real_rep(x) * scalar_real_rep(y)).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((scalar_real_rep(x + y) - scalar_real_rep(x) - scalar_real_rep(y)).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_EQ(scalar_real_rep(x).fullPivLu().rank(), 4);
    }
}

// e1 is a nonzero zero divisor: its real representation is singular.
TEST(RbScalar, ZeroDivisorRealRepresentationRank) {
    EXPECT_EQ(scalar_real_rep(RBScalar::e1()).fullPivLu().rank(), 2);
    EXPECT_EQ(scalar_real_rep(RBScalar::e2()).fullPivLu().rank(), 2);
}
