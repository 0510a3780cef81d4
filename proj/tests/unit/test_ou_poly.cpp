#include <gtest/gtest.h>

#include <cmath>

#include <fracfluct/ou.hpp>

using namespace fracfluct;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
PolyFunction y_power(int k, double c = 1.0) { return PolyFunction::monomial(1, {k}, c); }
}  // namespace

TEST(Poly, DegreeBoundEnforced) {
    EXPECT_NO_THROW(y_power(4));
    EXPECT_THROW(y_power(5), std::invalid_argument);
    PolyFunction p(2);
    EXPECT_THROW(p.add_term({1}, 1.0), std::invalid_argument);
}

TEST(Poly, EvaluatesAndCancels) {
    PolyFunction p(1);
    p.add_term({2}, 3.0);
    p.add_term({0}, -1.0);
    VectorXd y(1);
    y << 2.0;
    EXPECT_DOUBLE_EQ(p(y), 11.0);
    p.add_term({2}, -3.0);
    EXPECT_EQ(p.degree(), 0);
}

TEST(OuSpecTest, GapAndValidation) {
    MatrixXd A(2, 2);
    A << 2.0, 0.5, 0.5, 1.0;
    const OuSpec s(A);
    EXPECT_NEAR(s.gap_rate(), 1.5 - std::sqrt(0.5), 1e-12);
    MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;
    EXPECT_THROW(OuSpec{bad}, std::invalid_argument);
    EXPECT_THROW(OuSpec(-1.0), std::invalid_argument);
}

TEST(OuSpecTest, TransitionCovarianceTendsToStationary) {
    const OuSpec s(1.7);
    EXPECT_NEAR(s.transition_covariance(100.0)(0, 0), s.stationary_covariance()(0, 0), 1e-15);
    EXPECT_NEAR(s.stationary_covariance()(0, 0), 0.5 / 1.7, 1e-15);
}

TEST(Semigroup, Examples) {
    const OuSpec s(1.0);
    const double t = 0.7;
    const PolyFunction py = semigroup_apply(s, y_power(1), t);
    EXPECT_NEAR(py.coefficient({1}), std::exp(-t), 1e-15);
    EXPECT_NEAR(py.coefficient({0}), 0.0, 1e-15);
    const PolyFunction pc = semigroup_apply(s, PolyFunction::constant(1, 2.5), t);
    EXPECT_NEAR(pc.coefficient({0}), 2.5, 1e-15);
    EXPECT_EQ(pc.degree(), 0);
    const PolyFunction p2 = semigroup_apply(s, y_power(2), t);
    EXPECT_NEAR(p2.coefficient({2}), std::exp(-2 * t), 1e-15);
    EXPECT_NEAR(p2.coefficient({0}), 0.5 * (1 - std::exp(-2 * t)), 1e-15);
    EXPECT_TRUE(semigroup_apply(s, y_power(3), 0.0).approx_equal(y_power(3), 1e-15));
}

TEST(Semigroup, SemigroupPropertyAndInvariance) {
    MatrixXd A(2, 2);
    A << 1.5, 0.3, 0.3, 0.8;
    const OuSpec s(A);
    PolyFunction f(2);
    f.add_term({3, 1}, 0.7);
    f.add_term({0, 2}, -1.2);
    f.add_term({1, 0}, 0.4);
    f.add_term({2, 2}, 0.25);
    const double a = 0.4, b = 1.1;
    EXPECT_TRUE(semigroup_apply(s, semigroup_apply(s, f, a), b).approx_equal(semigroup_apply(s, f, a + b), 1e-12));
    for (double t : {0.3, 1.0, 3.0}) EXPECT_NEAR(invariant_mean(s, semigroup_apply(s, f, t)), invariant_mean(s, f), 1e-12);
}

TEST(Semigroup, SpectralGapDecay) {
    const OuSpec s(1.3);
    PolyFunction f(1);
    f.add_term({4}, 1.0);
    f.add_term({1}, 2.0);
    const PolyFunction g = centered(s, f);
    for (double t : {1.0, 2.0, 4.0}) {
        const PolyFunction pt = semigroup_apply(s, g, t);
        EXPECT_LE(pt.max_abs_coefficient(), std::exp(-s.gap_rate() * t) * 10.0 * g.max_abs_coefficient()) << t;
    }
    // coefficientwise: the ratio P_{2t} / P_t decays at least at the gap rate
    const double r = semigroup_apply(s, g, 4.0).max_abs_coefficient() / semigroup_apply(s, g, 2.0).max_abs_coefficient();
    EXPECT_LE(r, std::exp(-s.gap_rate() * 2.0) * (1 + 1e-12));
}

TEST(InvariantMean, Examples) {
    const OuSpec s(1.0);
    EXPECT_NEAR(invariant_mean(s, y_power(1)), 0.0, 1e-15);
    EXPECT_NEAR(invariant_mean(s, y_power(2)), 0.5, 1e-15);
    EXPECT_NEAR(invariant_mean(s, y_power(4)), 0.75, 1e-15);
    EXPECT_NEAR(invariant_mean(OuSpec(2.0), y_power(2)), 0.25, 1e-15);
    EXPECT_NEAR(invariant_mean(s, centered(s, y_power(4))), 0.0, 1e-15);
}

TEST(GaussianMoment, Isserlis) {
    MatrixXd S(2, 2);
    S << 2.0, 0.5, 0.5, 1.0;
    // E[X^2 Y^2] = S11 S22 + 2 S12^2
    EXPECT_NEAR(gaussian_moment({2, 2}, S), 2.0 * 1.0 + 2 * 0.25, 1e-14);
    EXPECT_NEAR(gaussian_moment({3, 1}, S), 3 * 2.0 * 0.5, 1e-14);
    EXPECT_NEAR(gaussian_moment({1, 0}, S), 0.0, 1e-15);
}

TEST(SampleOu, RejectsBadEpsilon) {
    EXPECT_THROW(sample_ou(OuSpec(1.0), TimeGrid(0, 1, 4), 0.0, 1), std::domain_error);
    EXPECT_THROW(sample_ou(OuSpec(1.0), TimeGrid(0, 1, 4), -1.0, 1), std::domain_error);
}

TEST(SampleOu, StationaryVarianceAndAutocovariance) {
    // tau = h / eps = 0.25, one long path gives correlated samples; many short paths give iid ones
    const TimeGrid g(0.0, 1.0, 4);
    const OuSpec s(1.0);
    const double eps = 1.0;  // tau = 0.25
    const int N = 100000;
    double v = 0, v2 = 0, c = 0, c2 = 0;
    for (int i = 0; i < N; ++i) {
        const FastPath p = sample_ou(s, g, eps, derive_seed(9, {static_cast<std::uint64_t>(i)}));
        const double y0 = p.at(0)(0), y1 = p.at(1)(0);
        v += y0 * y0, v2 += y0 * y0 * y0 * y0;
        c += y0 * y1, c2 += y0 * y0 * y1 * y1;
    }
    const double mv = v / N, mc = c / N;
    EXPECT_NEAR(mv, 0.5, 3.0 * std::sqrt((v2 / N - mv * mv) / N));
    EXPECT_NEAR(mc, 0.5 * std::exp(-0.25), 3.0 * std::sqrt((c2 / N - mc * mc) / N));
}

TEST(SampleOu, DeterministicGivenSeed) {
    const TimeGrid g(0.0, 1.0, 64);
    const FastPath a = sample_ou(OuSpec(1.0), g, 0.01, 4), b = sample_ou(OuSpec(1.0), g, 0.01, 4);
    EXPECT_EQ(a.values.values(), b.values.values());
    EXPECT_DOUBLE_EQ(a.epsilon, 0.01);
}
