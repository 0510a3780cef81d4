#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include <fracfluct/fbm.hpp>
#include <fracfluct/rough.hpp>

using namespace fracfluct;

namespace {

HolderPath from_fn(const TimeGrid& g, const std::function<double(double)>& f) {
    HolderPath p(g, 1);
    for (std::size_t k = 0; k < g.n_points(); ++k) p.at(k)(0) = f(g.time(k));
    return p;
}

double young_error(std::size_t n) {
    const TimeGrid g(0.0, 1.0, n);
    return std::abs(young_integral(from_fn(g, [](double t) { return t; }), from_fn(g, [](double t) { return t * t; })).terminal()(0) -
                    2.0 / 3.0);
}

}  // namespace

TEST(YoungIntegral, ConstantIntegrandGivesIncrement) {
    const TimeGrid g(0.0, 1.0, 50);
    const HolderPath X = sample_fbm(g, HurstParameter(0.7), 1, 3).path;
    const HolderPath I = young_integral(from_fn(g, [](double) { return 1.0; }), X);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(I(0, k), X(0, k) - X(0, 0), 1e-14);
}

TEST(YoungIntegral, RefinementOrderAtLeastPointNine) {
    std::vector<double> err;
    for (std::size_t n : {64, 128, 256, 512, 1024}) err.push_back(young_error(n));
    for (std::size_t i = 1; i < err.size(); ++i) {
        EXPECT_GE(err[i - 1] / err[i], 1.8);
        EXPECT_GE(std::log2(err[i - 1] / err[i]), 0.9);
    }
    EXPECT_LT(err.back(), 1e-3);
}

TEST(YoungIntegral, SelfIntegralOfSmoothPath) {
    const TimeGrid g(0.0, 1.0, 4096);
    const HolderPath X = from_fn(g, [](double t) { return std::sin(2 * t) + 0.3; });
    const double exact = 0.5 * (std::pow(X(0, 4096), 2) - std::pow(X(0, 0), 2));
    EXPECT_NEAR(young_integral(X, X).terminal()(0), exact, 1e-3);
}

TEST(YoungIntegral, TelescopingAdditivity) {
    const TimeGrid g(0.0, 1.0, 100);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 1, 11).path;
    const HolderPath Y = sample_fbm(g, HurstParameter(0.75), 1, 12).path;
    const HolderPath I = young_integral(Y, X);
    // integral over [u, t] computed directly
    const std::size_t u = 37;
    double direct = 0.0;
    for (std::size_t k = u; k < 100; ++k) direct += Y(0, k) * (X(0, k + 1) - X(0, k));
    EXPECT_NEAR(I(0, 100), I(0, u) + direct, 1e-13);
}

TEST(YoungIntegral, GridMismatchThrows) {
    const HolderPath a(TimeGrid(0, 1, 10), 1), b(TimeGrid(0, 1, 11), 1);
    EXPECT_THROW(young_integral(a, b), std::invalid_argument);
    EXPECT_THROW(levy_area(a, b), std::invalid_argument);
}

TEST(LevyArea, ConstantPathHasZeroArea) {
    const TimeGrid g(0.0, 1.0, 20);
    const TwoParamArea A = levy_area(from_fn(g, [](double) { return 2.0; }), sample_fbm(g, HurstParameter(0.6), 1, 1).path);
    EXPECT_EQ(area_scale(A), 0.0);
}

TEST(LevyArea, SmoothOracle) {
    double prev = 1.0;
    for (std::size_t n : {64, 256, 1024}) {
        const TimeGrid g(0.0, 1.0, n);
        const TwoParamArea A = levy_area(from_fn(g, [](double t) { return t; }), from_fn(g, [](double t) { return t * t; }));
        const double err = std::abs(A.value(0, n)(0, 0) - 2.0 / 3.0);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(LevyArea, SymmetricPartIsHalfTensorSquare) {
    const TimeGrid g(0.0, 1.0, 60);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 3, 21).path;
    const TwoParamArea A = levy_area(X, X);
    for (std::size_t s : {0, 5, 30})
        for (std::size_t t : {31, 45, 60}) {
            const Eigen::VectorXd dx = X.increment(s, t);
            const Eigen::MatrixXd sym = A.value(s, t) + A.value(s, t).transpose();
            EXPECT_LT((sym - dx * dx.transpose()).cwiseAbs().maxCoeff(), 1e-13);
        }
}

TEST(ChenDefect, ExactForLevyAreaAndDetectsCorruption) {
    const TimeGrid g(0.0, 1.0, 64);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 2, 5).path;
    const HolderPath Y = sample_fbm(g, HurstParameter(0.75), 3, 6).path;
    TwoParamArea A = levy_area(X, Y);
    EXPECT_LE(chen_defect(A, X, Y), 1e-12 * std::max(1.0, area_scale(A)));
    EXPECT_EQ(A.value(3, 3).norm(), 0.0);
    A.at(10, 20)(1, 2) += 1.0;
    EXPECT_GE(chen_defect(A, X, Y), 1.0);
}

TEST(ChenDefect, ShapeMismatchThrows) {
    const TimeGrid g(0.0, 1.0, 8);
    const HolderPath X(g, 2), Y(g, 1);
    EXPECT_THROW(chen_defect(levy_area(X, X), X, Y), std::invalid_argument);
}

TEST(HolderNorm, Examples) {
    const TimeGrid g(0.0, 1.0, 256);
    EXPECT_EQ(holder_norm(from_fn(g, [](double) { return 3.0; }), 0.5), 0.0);
    EXPECT_NEAR(holder_norm(from_fn(g, [](double t) { return t; }), 0.5), 1.0, 1e-14);
    EXPECT_NEAR(holder_norm(from_fn(g, [](double t) { return std::sqrt(t); }), 0.5), 1.0, 1e-14);
    EXPECT_THROW(holder_norm(from_fn(g, [](double t) { return t; }), 1.0), std::domain_error);
}

TEST(HolderNorm, HomogeneousUnderScaling) {
    const TimeGrid g(0.0, 1.0, 128);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 2, 8).path;
    EXPECT_NEAR(holder_norm(X.scaled(-2.5), 0.6), 2.5 * holder_norm(X, 0.6), 1e-12 * holder_norm(X, 0.6));
}

TEST(HolderNorm, DyadicBudgetIsLowerBound) {
    const TimeGrid g(0.0, 1.0, 512);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 1, 8).path;
    const double full = holder_norm(X, 0.5), dyadic = holder_norm(X, 0.5, 1000);
    EXPECT_LE(dyadic, full);
    EXPECT_GT(dyadic, 0.5 * full);
}
