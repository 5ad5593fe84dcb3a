#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "fracobs/frac_core.hpp"
#include "test_support.hpp"

using namespace fracobs;
using fracobs::testing::rel_frobenius;

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

// -(-1)^{j+1} binom(alpha, j+1) in 50 decimal digits.
double gl_reference(double alpha, std::size_t j) {
    BigFloat b = 1;
    const BigFloat a = alpha;
    for (std::size_t m = 1; m <= j + 1; ++m) b = b * (a - BigFloat(m) + 1) / BigFloat(m);
    if (j % 2 == 1) b = -b;
    return static_cast<double>(b);
}

// binom(alpha, m) through log-Gamma; undefined at Gamma poles.
double binom_lgamma(double alpha, std::size_t m) {
    int s1 = 0, s2 = 0, s3 = 0;
    const double l1 = ::lgamma_r(alpha + 1.0, &s1);
    const double l2 = ::lgamma_r(static_cast<double>(m) + 1.0, &s2);
    const double l3 = ::lgamma_r(alpha - static_cast<double>(m) + 1.0, &s3);
    return s1 * s2 * s3 * std::exp(l1 - l2 - l3);
}

Matrix nilpotent2() {
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    return a;
}

} // namespace

TEST(GlCoefficient, IntegerOrderOneVanishes) {
    for (std::size_t j = 1; j <= 50; ++j) EXPECT_EQ(gl_coefficient(1.0, j), 0.0);
}

TEST(GlCoefficient, HalfOrderFirstTerm) { EXPECT_DOUBLE_EQ(gl_coefficient(0.5, 1), 0.125); }

TEST(GlCoefficient, MatchesHighPrecisionAtUpperBand) {
    const double ref = gl_reference(1.28, 2);
    EXPECT_NEAR(gl_coefficient(1.28, 2), ref, 1e-12 * std::abs(ref));
}

TEST(GlCoefficient, AgreesWithLogGamma) {
    for (double alpha : {0.13, 0.5, 0.97, 1.28, 1.5, 2.25, 2.9})
        for (std::size_t j = 1; j <= 50; ++j) {
            const double sign = (j % 2 == 1) ? -1.0 : 1.0;
            const double ref = sign * binom_lgamma(alpha, j + 1);
            EXPECT_NEAR(gl_coefficient(alpha, j), ref, 1e-10 * std::abs(ref)) << alpha << " " << j;
        }
}

TEST(GlCoefficient, RejectsNonFinite) {
    EXPECT_THROW(gl_coefficient(std::nan(""), 1), DomainError);
    EXPECT_THROW(gl_coefficient(INFINITY, 2), DomainError);
    EXPECT_THROW(gl_coefficient(0.5, 0), DomainError);
}

TEST(FracSystemInvariants, Rejected) {
    EXPECT_THROW(FracSystem(Matrix::Zero(2, 3), {1, 1}, 1), DimensionError);
    EXPECT_THROW(FracSystem(Matrix::Zero(2, 2), {1}, 1), DimensionError);
    EXPECT_THROW(FracSystem(Matrix::Zero(2, 2), {1, 0}, 1), DomainError);
    EXPECT_THROW(FracSystem(Matrix::Zero(2, 2), {1, -0.5}, 1), DomainError);
}

TEST(BuildAj, IntegerOrdersGiveZeroTable) {
    const auto d = build_aj(FracSystem(Matrix::Identity(2, 2), {1, 1}, 3));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(d(i, j), 0.0);
}

TEST(BuildAj, MixedOrders) {
    const auto one = build_aj(FracSystem(Matrix::Zero(1, 1), {0.5}, 1));
    EXPECT_DOUBLE_EQ(one(0, 1), 0.125);
    const auto two = build_aj(FracSystem(Matrix::Zero(2, 2), {0.5, 1.5}, 1));
    EXPECT_DOUBLE_EQ(two(0, 1), 0.125);
    EXPECT_DOUBLE_EQ(two(1, 1), -0.375);
}

TEST(BuildAj, IntegerOrderTailsCutOff) {
    const auto d = build_aj(FracSystem(Matrix::Zero(1, 1), {3.0}, 6));
    EXPECT_NE(d(0, 1), 0.0);
    EXPECT_NE(d(0, 2), 0.0);
    for (std::size_t j = 3; j <= 6; ++j) EXPECT_EQ(d(0, j), 0.0);
}

TEST(GSequence, HandExpandedNilpotent) {
    const auto gs = g_sequence(FracSystem(nilpotent2(), {0.5, 0.5}, 2));
    EXPECT_EQ(gs[0], nilpotent2());
    EXPECT_TRUE(gs[1].isZero(0.0));
    Matrix g2(2, 2);
    g2 << 0, 0.125, 0, 0;
    EXPECT_TRUE(gs[2].isApprox(g2));
}

TEST(GSequence, IdentityWithIntegerOrder) {
    const auto gs = g_sequence(FracSystem(Matrix::Identity(2, 2), {1, 1}, 2));
    for (std::size_t k = 0; k <= 2; ++k) EXPECT_EQ(gs[k], Matrix::Identity(2, 2));
}

TEST(GSequence, ZeroHorizonHoldsOnlyA) {
    Rng rng(3);
    const Matrix a = fracobs::testing::random_dense(4, 4, rng);
    const auto gs = g_sequence(FracSystem(a, {0.7, 0.8, 0.9, 1.1}, 0));
    EXPECT_EQ(gs.horizon(), 0U);
    EXPECT_EQ(gs[0], a);
}

TEST(GSequence, RecurrenceIdentityOnRandomSystems) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.below(8), k = rng.below(11);
        std::vector<double> alpha(n);
        for (auto& a : alpha) a = rng.uniform(0.2, 2.8);
        const auto gs = g_sequence(FracSystem(fracobs::testing::random_dense(n, n, rng), alpha, k));
        for (std::size_t t = 1; t <= k; ++t) EXPECT_LT(rel_frobenius(gs.recurrence_rhs(t), gs[t]), 1e-12);
    }
}

TEST(GSequence, IntegerOrderIsMatrixPower) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = fracobs::testing::random_dense(8, 8, rng);
        const auto gs = g_sequence(FracSystem(a, std::vector<double>(8, 1.0), 5));
        Matrix p = a;
        for (std::size_t k = 0; k <= 5; ++k) {
            EXPECT_LT(rel_frobenius(gs[k], p), 1e-12);
            p = a * p;
        }
    }
}

TEST(Simulate, ZeroInitialStateStaysZero) {
    const auto t = simulate(FracSystem(nilpotent2(), {0.5, 0.5}, 2), Vector::Zero(2), 2);
    ASSERT_EQ(t.states.size(), 3U);
    for (const auto& x : t.states) EXPECT_TRUE(x.isZero(0.0));
}

TEST(Simulate, NilpotentExample) {
    Vector x0(2);
    x0 << 0, 1;
    const auto t = simulate(FracSystem(nilpotent2(), {0.5, 0.5}, 2), x0, 2);
    EXPECT_EQ(t.states[0], x0);
    EXPECT_TRUE(t.states[1].isZero(0.0));
    EXPECT_DOUBLE_EQ(t.states[2](0), 0.125);
    EXPECT_DOUBLE_EQ(t.states[2](1), 0.0);
}

TEST(Simulate, Superposition) {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        std::vector<double> alpha(n);
        for (auto& a : alpha) a = rng.uniform(0.9, 1.3);
        const FracSystem sys(fracobs::testing::random_dense(n, n, rng), alpha, 6);
        const Vector u = fracobs::testing::random_dense(n, 1, rng), v = fracobs::testing::random_dense(n, 1, rng);
        const double c = rng.uniform(-3, 3);
        const auto tu = simulate(sys, u, 6), tv = simulate(sys, v, 6), tw = simulate(sys, c * u + v, 6);
        for (std::size_t k = 0; k <= 6; ++k) {
            const Vector expect = c * tu.states[k] + tv.states[k];
            EXPECT_LE((tw.states[k] - expect).norm(), 1e-12 * std::max(1.0, expect.norm()));
        }
    }
}

TEST(Simulate, BeyondHorizonThrows) {
    EXPECT_THROW(simulate(FracSystem(nilpotent2(), {0.5, 0.5}, 2), Vector::Zero(2), 3), HorizonError);
}

TEST(ObservabilityMatrix, IdentityAtZeroHorizonIsA) {
    Rng rng(4);
    const Matrix a = fracobs::testing::random_dense(3, 3, rng);
    const auto gs = g_sequence(FracSystem(a, {0.9, 1.1, 1.2}, 0));
    EXPECT_EQ(observability_matrix(Matrix::Identity(3, 3), gs), a);
}

TEST(ObservabilityMatrix, LastStateOfChain) {
    Matrix a = Matrix::Zero(3, 3);
    a(1, 0) = 2.0;
    a(2, 1) = 3.0;
    const auto gs = g_sequence(FracSystem(a, {0.5, 0.5, 0.5}, 2));
    Matrix c = Matrix::Zero(1, 3);
    c(0, 2) = 1.0;
    const Matrix o = observability_matrix(c, gs);
    ASSERT_EQ(o.rows(), 3);
    // row 3 of G_0 = A, G_1 = A^2, G_2 = A^3 + A_1 A
    Matrix expect(3, 3);
    expect << 0, 3, 0, 6, 0, 0, 0, 0.125 * 3, 0;
    EXPECT_TRUE(o.isApprox(expect));
}

TEST(ObservabilityMatrix, ZeroOutputAndMismatch) {
    const auto gs = g_sequence(FracSystem(Matrix::Identity(3, 3), {1, 1, 1}, 2));
    EXPECT_TRUE(observability_matrix(Matrix::Zero(2, 3), gs).isZero(0.0));
    EXPECT_THROW(observability_matrix(Matrix::Zero(2, 4), gs), DimensionError);
}

TEST(NumericRank, Basics) {
    EXPECT_EQ(numeric_rank(Matrix::Identity(4, 4), 1e-9), 4U);
    Rng rng(2);
    const Vector u = fracobs::testing::random_dense(5, 1, rng), v = fracobs::testing::random_dense(4, 1, rng);
    EXPECT_EQ(numeric_rank(u * v.transpose(), 1e-9), 1U);
    Matrix m = fracobs::testing::random_dense(6, 6, rng);
    m.row(4) = m.row(1);
    EXPECT_EQ(numeric_rank(m, 1e-9), 5U);
    EXPECT_EQ(numeric_rank(Matrix(0, 0), 1e-9), 0U);
    EXPECT_THROW(numeric_rank(m, 0.0), DomainError);
}

TEST(NumericObservability, Examples) {
    const std::vector<std::size_t> all{0, 1, 2};
    EXPECT_TRUE(is_observable_numeric(FracSystem(Matrix::Identity(3, 3), {1.1, 1.1, 1.1}, 0), all));

    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = Matrix::Zero(3, 3);
        a(1, 0) = rng.uniform(0.5, 1.5) * (rng.coin() ? 1 : -1);
        a(2, 1) = rng.uniform(0.5, 1.5) * (rng.coin() ? 1 : -1);
        const FracSystem sys(a, {rng.uniform(0.9, 1.3), rng.uniform(0.9, 1.3), rng.uniform(0.9, 1.3)}, 3);
        const std::vector<std::size_t> last{2}, first{0};
        EXPECT_TRUE(is_observable_numeric(sys, last));
        EXPECT_FALSE(is_observable_numeric(sys, first));
    }
}
