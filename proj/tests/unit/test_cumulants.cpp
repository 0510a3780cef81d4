#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <fracfluct/cumulants.hpp>
#include <fracfluct/rng.hpp>

using namespace fracfluct;

namespace {

// Every subset of size k carries the same value f(k).
template <class F>
SubsetTable exchangeable(std::size_t n, F f) {
    SubsetTable t(n);
    for (std::uint32_t m = 1; m <= t.full_mask(); ++m) t.set(m, f(static_cast<int>(std::popcount(m))));
    return t;
}

}  // namespace

TEST(SubsetTableTest, Basics) {
    SubsetTable t(3);
    EXPECT_EQ(t.full_mask(), 7u);
    EXPECT_FALSE(t.has(5));
    t.set(5, 1.5);
    EXPECT_EQ(t.at({0, 2}), 1.5);
    EXPECT_THROW(t[3], std::invalid_argument);
    EXPECT_THROW(t.set(8, 0.0), std::out_of_range);
    EXPECT_THROW(SubsetTable(9), std::invalid_argument);
    EXPECT_EQ(detail::partitions_of(0b1111).size(), 15u);
}

TEST(MomentCumulant, GaussianMoments) {
    // all entries the same N(0, 1) variable: E X^k = (k-1)!!
    const SubsetTable k = moments_to_cumulants(exchangeable(6, [](int n) { return n % 2 ? 0.0 : double(double_factorial(n - 1)); }));
    for (std::uint32_t m = 1; m <= k.full_mask(); ++m) EXPECT_NEAR(k[m], std::popcount(m) == 2 ? 1.0 : 0.0, 1e-12) << m;
}

TEST(MomentCumulant, PoissonCumulantsAllEqualRate) {
    const double lam = 0.7;
    const double mom[] = {0, lam, lam + lam * lam, lam * lam * lam + 3 * lam * lam + lam,
                          std::pow(lam, 4) + 6 * std::pow(lam, 3) + 7 * lam * lam + lam};
    const SubsetTable k = moments_to_cumulants(exchangeable(4, [&](int n) { return mom[n]; }));
    for (std::uint32_t m = 1; m <= k.full_mask(); ++m) EXPECT_NEAR(k[m], lam, 1e-12);
}

TEST(MomentCumulant, RoundTrip) {
    Engine eng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n = 1; n <= 7; ++n) {
        SubsetTable t(n);
        for (std::uint32_t m = 1; m <= t.full_mask(); ++m) t.set(m, u(eng));
        const SubsetTable back = cumulants_to_moments(moments_to_cumulants(t));
        for (std::uint32_t m = 1; m <= t.full_mask(); ++m) EXPECT_NEAR(back[m], t[m], 1e-12);
    }
}

TEST(MomentCumulant, MissingEntryThrows) {
    SubsetTable t(2);
    t.set(1, 0.0);
    t.set(2, 0.0);
    EXPECT_ANY_THROW(moments_to_cumulants(t));
}

TEST(DiagramFactorization, CumulantsAreConnectedSums) {
    const std::vector<DiagramWeight> weights = {
        [](const PairPartitionDiagram&) { return 1.0; },
        [](const PairPartitionDiagram& g) { return std::pow(0.3, double(g.delta().num_blocks())) * (1.0 + g.num_singletons()); },
    };
    for (const auto& w : weights)
        for (std::size_t n = 2; n <= 6; ++n) {
            const SubsetTable k = moments_to_cumulants(diagram_moments(n, w));
            for (std::uint32_t m = 1; m <= k.full_mask(); ++m) {
                const double expect = connected_diagram_sum(std::popcount(m), w);
                EXPECT_NEAR(k[m], expect, 1e-12 * std::max(1.0, std::abs(expect))) << n << " " << m;
            }
        }
}

TEST(EmpiricalCumulant, GaussianAndExponential) {
    NormalSource normal(11);
    Engine eng(12);
    std::exponential_distribution<double> ex(1.0);
    const int N = 20000;
    Eigen::VectorXd g(N), e(N);
    for (int i = 0; i < N; ++i) {
        g(i) = normal();
        e(i) = ex(eng);
    }
    const Estimate k2 = empirical_joint_cumulant(g, 2, 1);
    EXPECT_NEAR(k2.value, 1.0, 4 * k2.std_error);
    const Estimate k4 = empirical_joint_cumulant(g, 4, 1);
    EXPECT_NEAR(k4.value, 0.0, 4 * k4.std_error);
    EXPECT_GT(k4.std_error, 0.0);
    // exponential: kappa_n = (n-1)!
    const Estimate e3 = empirical_joint_cumulant(e, 3, 2);
    EXPECT_NEAR(e3.value, 2.0, 4 * e3.std_error);
    EXPECT_EQ(empirical_joint_cumulant(e, 3, 2).std_error, e3.std_error);
}

TEST(EmpiricalCumulant, IndependentColumnsHaveZeroJointCumulant) {
    NormalSource normal(21);
    const int N = 5000;
    Eigen::MatrixXd x(N, 2);
    for (int i = 0; i < N; ++i) {
        x(i, 0) = normal();
        x(i, 1) = normal() + 0.5 * x(i, 0);
    }
    const Estimate c = empirical_joint_cumulant(x, {0, 1}, 3);
    EXPECT_NEAR(c.value, 0.5, 4 * c.std_error);
    const Estimate z = empirical_joint_cumulant(x, {0, 0, 1, 1}, 3);
    EXPECT_NEAR(z.value, 0.0, 4 * z.std_error);
}

TEST(EmpiricalCumulant, InputValidation) {
    EXPECT_THROW(empirical_joint_cumulant(Eigen::VectorXd::Zero(999), 2, 1), std::invalid_argument);
    EXPECT_THROW(empirical_joint_cumulant(Eigen::MatrixXd::Zero(1000, 2), {0, 2}, 1), std::out_of_range);
    EXPECT_THROW(empirical_joint_cumulant(Eigen::MatrixXd::Zero(1000, 2), {0, 0, 0, 0, 0}, 1), std::invalid_argument);
}
