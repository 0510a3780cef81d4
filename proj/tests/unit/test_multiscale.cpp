#include <gtest/gtest.h>

#include <cmath>

#include <fracfluct/multiscale.hpp>
#include <fracfluct/rough.hpp>

using namespace fracfluct;

namespace {

const HurstParameter H(0.75);

HolderPath subsample(const HolderPath& fine, std::size_t n) {
    const TimeGrid g(fine.grid().t_start(), fine.grid().t_end(), n);
    const std::size_t stride = fine.grid().n_steps() / n;
    HolderPath out(g, fine.dim());
    for (std::size_t k = 0; k < g.n_points(); ++k) out.at(k) = fine.at(k * stride);
    return out;
}

}  // namespace

TEST(Catalogue, AllModelsBuildAndAreBounded) {
    for (const auto& id : catalogue_model_ids()) {
        const ModelSpec m = make_catalogue_model(id);
        EXPECT_TRUE(m.bounded()) << id;
    }
    EXPECT_THROW(make_catalogue_model("nope"), std::invalid_argument);
    EXPECT_TRUE(make_catalogue_model("additive-sine").y_independent());
    EXPECT_FALSE(make_catalogue_model("averaging-sine").y_independent());
}

TEST(Catalogue, AveragedCoefficients) {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.4);
    EXPECT_NEAR(make_catalogue_model("averaging-sine").fbar(x)(0, 0), std::sin(0.4), 1e-15);
    EXPECT_NEAR(make_catalogue_model("averaging-sine").dfbar(x)(0, 0), std::cos(0.4), 1e-15);
    EXPECT_NEAR(make_catalogue_model("homogenization-rational").fbar(x)(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(make_catalogue_model("averaging-rational").dfbar(x)(0, 0), -2 * 0.4 / std::pow(1.16, 2), 1e-15);
}

TEST(SimulateSlow, ConstantCoefficientIsAdditiveNoise) {
    const TimeGrid g(0.0, 1.0, 128);
    const ModelSpec m = make_catalogue_model("constant");
    const FbmPath b = sample_fbm(g, H, 1, 1);
    const HolderPath x = simulate_slow(m, b, sample_ou(m.fast(), g, 0.01, 2), Eigen::VectorXd::Constant(1, 0.3));
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(x(0, k), 0.3 + b.path(0, k), 1e-14);
}

TEST(SimulateSlow, YIndependentEqualsAveragedBitForBit) {
    const TimeGrid g(0.0, 1.0, 256);
    for (const char* id : {"additive-sine", "additive-rational"}) {
        const ModelSpec m = make_catalogue_model(id);
        const FbmPath b = sample_fbm(g, H, 1, 3);
        const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.5);
        const HolderPath x = simulate_slow(m, b, sample_ou(m.fast(), g, 0.001, 4), x0);
        EXPECT_EQ(x.values(), simulate_averaged(m, b, x0).values()) << id;
    }
}

TEST(SimulateAveraged, ZeroAndConstantCoefficients) {
    const TimeGrid g(0.0, 1.0, 64);
    const FbmPath b = sample_fbm(g, H, 1, 5);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, -0.2);
    const HolderPath still = simulate_averaged(make_catalogue_model("homogenization-sine"), b, x0);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_EQ(still(0, k), -0.2);
    const HolderPath shifted = simulate_averaged(make_catalogue_model("constant"), b, x0);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(shifted(0, k), -0.2 + b.path(0, k), 1e-14);
}

TEST(SimulateAveraged, SelfConvergenceUnderRefinement) {
    const ModelSpec m = make_catalogue_model("averaging-sine");
    const FbmPath fine = sample_fbm(TimeGrid(0.0, 1.0, 4096), H, 1, 6);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.5);
    const double ref = simulate_averaged(m, fine, x0).terminal()(0);
    std::vector<double> err;
    for (std::size_t n : {16, 64, 256}) {
        const FbmPath coarse{subsample(fine.path, n), H};
        err.push_back(std::abs(simulate_averaged(m, coarse, x0).terminal()(0) - ref));
    }
    EXPECT_LT(err[2], err[0]);
    EXPECT_LT(err[2], 0.05);
}

TEST(SimulateSlow, SelfConvergenceAtFixedEpsilon) {
    // the fast path is sampled on the fine grid and subsampled with the driver
    const ModelSpec m = make_catalogue_model("averaging-sine");
    const TimeGrid fg(0.0, 1.0, 4096);
    const FbmPath fine = sample_fbm(fg, H, 1, 7);
    const FastPath ffast = sample_ou(m.fast(), fg, 0.5, 8);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.5);
    const double ref = simulate_slow(m, fine, ffast, x0).terminal()(0);
    std::vector<double> err;
    for (std::size_t n : {16, 256}) {
        const FbmPath b{subsample(fine.path, n), H};
        const FastPath y{subsample(ffast.values, n), 0.5};
        err.push_back(std::abs(simulate_slow(m, b, y, x0).terminal()(0) - ref));
    }
    EXPECT_LT(err[1], err[0]);
}

TEST(SimulateSlow, BlowUpGuardReportsStep) {
    const TimeGrid g(0.0, 1.0, 64);
    const ModelSpec m = make_catalogue_model("constant");
    const FbmPath b = sample_fbm(g, H, 1, 9);
    try {
        simulate_slow(m, b, sample_ou(m.fast(), g, 0.1, 1), Eigen::VectorXd::Constant(1, 10.0), 1.0);
        FAIL() << "expected blow-up";
    } catch (const BlowUpError& e) {
        EXPECT_GE(e.step(), 1u);
    }
}

TEST(Fluctuation, Examples) {
    const TimeGrid g(0.0, 1.0, 32);
    const HolderPath a = sample_fbm(g, H, 1, 1).path, b = sample_fbm(g, H, 1, 2).path;
    EXPECT_EQ(sup_norm(fluctuation(a, a, 0.01, H)), 0.0);
    EXPECT_EQ((fluctuation(a, b, 1.0, H).values() - (a - b).values()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(fluctuation(a, b, 0.0001, H)(0, 32), (a(0, 32) - b(0, 32)) * 10.0, 1e-12);
    EXPECT_THROW(fluctuation(a, b, 0.0, H), std::domain_error);
    // y-independent model: zero fluctuation for every epsilon
    const ModelSpec m = make_catalogue_model("additive-rational");
    const FbmPath B = sample_fbm(g, H, 1, 3);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.1);
    for (double eps : {0.1, 0.001})
        EXPECT_EQ(sup_norm(fluctuation(simulate_slow(m, B, sample_ou(m.fast(), g, eps, 4), x0), simulate_averaged(m, B, x0), eps, H)), 0.0);
}

TEST(VEpsilon, VanishesForConstantYFactors) {
    const TimeGrid g(0.0, 1.0, 64);
    const ModelSpec m = make_catalogue_model("additive-sine");
    const auto v = v_epsilon(m, sample_fbm(g, H, 1, 1), sample_ou(m.fast(), g, 0.01, 2), SpatialGrid::scalar({0.0, 1.0}));
    for (const auto& p : v) EXPECT_EQ(sup_norm(p), 0.0);
}

TEST(VEpsilon, AlongConstantPathMatchesPointEvaluation) {
    const TimeGrid g(0.0, 1.0, 128);
    const ModelSpec m = make_catalogue_model("averaging-rational");
    const FbmPath b = sample_fbm(g, H, 1, 3);
    const FastPath y = sample_ou(m.fast(), g, 0.01, 4);
    const HolderPath x(g, Eigen::MatrixXd::Constant(1, 129, 0.7));
    EXPECT_LT(sup_norm(v_epsilon_along(m, b, y, x) - v_epsilon(m, b, y, SpatialGrid::scalar({0.7})).front()), 1e-15);
}

TEST(VEpsilon, DecompositionIdentityOnGrid) {
    // z_{k+1} - z_k = V^eps(x^eps)_{k,k+1} + A^eps_k z_k dB_k
    const TimeGrid g(0.0, 1.0, 512);
    const ModelSpec m = make_catalogue_model("averaging-sine");
    const double eps = 0.01;
    const FbmPath b = sample_fbm(g, H, 1, 10);
    const FastPath y = sample_ou(m.fast(), g, eps, 11);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.5);
    const HolderPath xe = simulate_slow(m, b, y, x0), xb = simulate_averaged(m, b, x0);
    const HolderPath z = fluctuation(xe, xb, eps, H);
    const HolderPath v = v_epsilon_along(m, b, y, xe);
    const OperatorPath A = a_epsilon(m, xe, xb);
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < g.n_points(); ++k) {
        const double rhs = v(0, k + 1) - v(0, k) + A.block(k)(0, 0) * z(0, k) * b.increment(k)(0);
        worst = std::max(worst, std::abs(z(0, k + 1) - z(0, k) - rhs));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(AEpsilon, Examples) {
    const TimeGrid g(0.0, 1.0, 64);
    const ModelSpec m = make_catalogue_model("averaging-sine");
    const FbmPath b = sample_fbm(g, H, 1, 12);
    const HolderPath xb = simulate_averaged(m, b, Eigen::VectorXd::Constant(1, 0.5));
    const OperatorPath same = a_epsilon(m, xb, xb);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_EQ(same.block(k)(0, 0), std::cos(xb(0, k)));
    const HolderPath xe = xb + b.path.scaled(0.7);
    const OperatorPath a8 = a_epsilon(m, xe, xb, 8), a16 = a_epsilon(m, xe, xb, 16);
    EXPECT_LT((a8.flattened() - a16.flattened()).values().cwiseAbs().maxCoeff(), 1e-10);
    // mean-value property for the sine: int_0^1 cos(theta a + (1-theta) b) dtheta = (sin a - sin b)/(a - b)
    for (std::size_t k = 1; k < g.n_points(); k += 9)
        EXPECT_NEAR(a16.block(k)(0, 0), (std::sin(xe(0, k)) - std::sin(xb(0, k))) / (xe(0, k) - xb(0, k)), 1e-12);
}

TEST(AEpsilon, LinearFbarGivesConstantDerivative) {
    const TimeGrid g(0.0, 1.0, 16);
    const ModelSpec m(1, 1, OuSpec(1.0), {Channel{SpatialFactor::affine(0.2, Eigen::VectorXd::Constant(1, 1.5)), Eigen::MatrixXd::Ones(1, 1),
                                                  PolyFunction::constant(1, 2.0)}});
    const HolderPath a = sample_fbm(g, H, 1, 1).path, b = sample_fbm(g, H, 1, 2).path;
    const OperatorPath A = a_epsilon(m, a, b);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(A.block(k)(0, 0), 3.0, 1e-14);
    EXPECT_FALSE(m.bounded());
}

TEST(UPaths, FbarTimesDriver) {
    const TimeGrid g(0.0, 1.0, 16);
    const ModelSpec m = make_catalogue_model("averaging-sine");
    const FbmPath b = sample_fbm(g, H, 1, 1);
    const auto u = u_paths(m, b, SpatialGrid::scalar({0.3}));
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(u.front()(0, k), std::sin(0.3) * b.path(0, k), 1e-15);
}

TEST(SpatialGridTest, Invariants) {
    EXPECT_THROW(SpatialGrid::scalar({}), std::invalid_argument);
    EXPECT_THROW(SpatialGrid::scalar({0.1, 0.1}), std::invalid_argument);
}
