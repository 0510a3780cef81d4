#include <gtest/gtest.h>

#include <cmath>

#include <fracfluct/bounds.hpp>
#include <fracfluct/fbm.hpp>
#include <fracfluct/rough.hpp>
#include <fracfluct/yde.hpp>

using namespace fracfluct;

namespace {

HolderPath line(const TimeGrid& g, double slope) {
    HolderPath p(g, 1);
    for (std::size_t k = 0; k < g.n_points(); ++k) p.at(k)(0) = slope * g.time(k);
    return p;
}

OperatorPath constant_operator(const TimeGrid& g, double a) {
    OperatorPath A(g, 1, 1);
    for (std::size_t k = 0; k < g.n_points(); ++k) A.block(k)(0, 0) = a;
    return A;
}

const HolderExponents ex{0.45, 0.6, 0.6};

}  // namespace

TEST(ControlledYde, ZeroOperatorIsPureForcing) {
    const TimeGrid g(0.0, 1.0, 100);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 1, 1).path;
    const HolderPath f = sample_fbm(g, HurstParameter(0.75), 1, 2).path;
    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 0.3);
    const HolderPath Y = solve_controlled_yde(constant_operator(g, 0.0), X, f, y0);
    for (std::size_t k = 0; k < g.n_points(); ++k) EXPECT_NEAR(Y(0, k), 0.3 + f(0, k) - f(0, 0), 1e-14);
}

TEST(ControlledYde, LinearOdeOracle) {
    double prev = 1.0;
    for (std::size_t n : {100, 1000, 10000}) {
        const TimeGrid g(0.0, 1.0, n);
        const HolderPath Y = solve_controlled_yde(constant_operator(g, 0.8), line(g, 1.0), HolderPath(g, 1), Eigen::VectorXd::Constant(1, 2.0));
        const double err = std::abs(Y.terminal()(0) - 2.0 * std::exp(0.8));
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(ControlledYde, SelfConvergenceWithFbmDriver) {
    const HurstParameter H(0.75);
    const TimeGrid fine(0.0, 1.0, 4096);
    const HolderPath Xf = sample_fbm(fine, H, 1, 77).path;
    auto coarse_of = [&](std::size_t n) {
        const TimeGrid g(0.0, 1.0, n);
        HolderPath X(g, 1);
        for (std::size_t k = 0; k < g.n_points(); ++k) X.at(k) = Xf.at(k * (4096 / n));
        return solve_controlled_yde(constant_operator(g, 1.0), X, HolderPath(g, 1), Eigen::VectorXd::Constant(1, 1.0)).terminal()(0);
    };
    const double ref = coarse_of(4096);
    const double e1 = std::abs(coarse_of(16) - ref), e2 = std::abs(coarse_of(256) - ref);
    EXPECT_LT(e2, e1);
    // Young-Euler on the pathwise exponential: exp(X_T) is the exact solution
    EXPECT_NEAR(ref, std::exp(Xf.terminal()(0)), 0.05);
}

TEST(ControlledYde, PicardMatchesEuler) {
    const TimeGrid g(0.0, 1.0, 256);
    const HolderPath X = sample_fbm(g, HurstParameter(0.75), 1, 4).path;
    const HolderPath f = sample_fbm(g, HurstParameter(0.75), 1, 5).path;
    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, -0.4);
    YdeOptions p;
    p.mode = YdeMode::picard;
    const HolderPath a = solve_controlled_yde(constant_operator(g, 0.7), X, f, y0);
    const HolderPath b = solve_controlled_yde(constant_operator(g, 0.7), X, f, y0, p);
    EXPECT_LT(sup_norm(a - b), 1e-11);
}

TEST(ControlledYde, BlowUpIsReported) {
    const TimeGrid g(0.0, 1.0, 100);
    YdeOptions o;
    o.blowup_threshold = 1e6;
    EXPECT_THROW(solve_controlled_yde(constant_operator(g, 50.0), line(g, 1.0), HolderPath(g, 1), Eigen::VectorXd::Constant(1, 1.0), o),
                 BlowUpError);
    o.blowup_threshold = std::numeric_limits<double>::infinity();
    EXPECT_THROW(solve_controlled_yde(constant_operator(g, 1e300), line(g, 1e10), HolderPath(g, 1), Eigen::VectorXd::Constant(1, 1e10), o),
                 BlowUpError);
}

TEST(ControlledYde, DimensionMismatchThrows) {
    const TimeGrid g(0.0, 1.0, 10);
    EXPECT_THROW(solve_controlled_yde(constant_operator(g, 1.0), HolderPath(g, 2), HolderPath(g, 1), Eigen::VectorXd::Zero(1)),
                 std::invalid_argument);
}

TEST(YoungConstant, ZetaForm) { EXPECT_NEAR(young_constant(0.5, 1.0), std::pow(2.0, 1.5) * std::riemann_zeta(1.5), 1e-12); }

TEST(Gronwall, ZeroCouplingCollapses) {
    GronwallInputs in;
    in.y0 = 0.7;
    in.f_alpha = 0.2;
    in.exponents = ex;
    const BoundCertificate c = gronwall_bound(in);
    // mesh 1, a single interval: C1 = 4 * 2
    EXPECT_NEAR(c.sup_rhs(), 8.0 * 0.9, 1e-12);
    EXPECT_EQ(c.intervals, 1.0);
}

TEST(Gronwall, MonotoneInEveryInput) {
    GronwallInputs base{0.8, 1.3, 2.0, 0.5, 0.4, 1.0, ex};
    const BoundCertificate c0 = gronwall_bound(base);
    for (double GronwallInputs::*field : {&GronwallInputs::a_gamma, &GronwallInputs::a_sup, &GronwallInputs::x_beta,
                                           &GronwallInputs::f_alpha, &GronwallInputs::y0}) {
        GronwallInputs up = base;
        up.*field *= 2.0;
        const BoundCertificate c1 = gronwall_bound(up);
        EXPECT_GE(c1.log_sup, c0.log_sup);
        EXPECT_GE(c1.log_holder, c0.log_holder);
    }
}

TEST(Gronwall, ExponentsValidated) {
    GronwallInputs in;
    in.exponents = {0.3, 0.6, 0.6};  // alpha + beta <= 1
    EXPECT_THROW(gronwall_bound(in), std::domain_error);
    in.exponents = {0.45, 0.4, 0.6};  // beta <= 1/2
    EXPECT_THROW(gronwall_bound(in), std::domain_error);
    in.exponents = ex;
    in.a_sup = -1.0;
    EXPECT_THROW(gronwall_bound(in), std::domain_error);
}

TEST(Gronwall, DominatesLinearOde) {
    const TimeGrid g(0.0, 1.0, 2000);
    const double a = 0.8;
    const OperatorPath A = constant_operator(g, a);
    const HolderPath X = line(g, 1.0);
    const HolderPath Y = solve_controlled_yde(A, X, HolderPath(g, 1), Eigen::VectorXd::Constant(1, 2.0));
    GronwallInputs in{holder_norm(A.flattened(), ex.gamma), A.sup_norm(), holder_norm(X, ex.beta), 0.0, 2.0, 1.0, ex};
    const BoundCertificate c = gronwall_bound(in);
    EXPECT_TRUE(c.dominates_sup(sup_norm(Y)));
    EXPECT_TRUE(c.dominates_holder(holder_norm(Y, ex.alpha)));
}

TEST(Gronwall, DominatesFbmInstances) {
    const HurstParameter H(0.75);
    const TimeGrid g(0.0, 1.0, 512);
    for (std::uint64_t i = 0; i < 10; ++i) {
        const HolderPath X = sample_fbm(g, H, 1, derive_seed(1, {i})).path;
        const HolderPath f = sample_fbm(g, H, 1, derive_seed(2, {i})).path;
        OperatorPath A(g, 1, 1);
        for (std::size_t k = 0; k < g.n_points(); ++k) A.block(k)(0, 0) = std::cos(X(0, k));
        const HolderPath Y = solve_controlled_yde(A, X, f, Eigen::VectorXd::Constant(1, 1.0));
        const BoundCertificate c = gronwall_bound({holder_norm(A.flattened(), ex.gamma), A.sup_norm(), holder_norm(X, ex.beta),
                                                   holder_norm(f, ex.alpha), 1.0, 1.0, ex});
        EXPECT_TRUE(c.dominates_sup(sup_norm(Y)));
        EXPECT_TRUE(c.dominates_holder(holder_norm(Y, ex.alpha)));
    }
}

TEST(Residue, CoincidentSystemsGiveZero) {
    ResidueInputs in;
    in.a_gamma = in.at_gamma = 0.5;
    in.a_sup = in.at_sup = 1.0;
    in.x_beta = in.xt_beta = 1.5;
    in.zt0 = 1.0;
    in.zt_alpha = 0.3;
    in.exponents = ex;
    const BoundCertificate c = residue_bound(in);
    EXPECT_EQ(c.sup_rhs(), 0.0);
    EXPECT_EQ(c.holder_rhs(), 0.0);
}

TEST(Residue, LinearInDifferences) {
    ResidueInputs in;
    in.a_gamma = in.at_gamma = 0.5;
    in.a_sup = in.at_sup = 1.0;
    in.x_beta = in.xt_beta = 1.5;
    in.zt0 = 1.0;
    in.zt_alpha = 0.3;
    in.dz0 = 0.01;
    in.dz_alpha = 0.02;
    in.dx_beta = 0.03;
    in.da_gamma = 0.01;
    in.da_sup = 0.01;
    in.exponents = ex;
    ResidueInputs twice = in;
    for (double ResidueInputs::*f : {&ResidueInputs::dz0, &ResidueInputs::dz_alpha, &ResidueInputs::dx_beta, &ResidueInputs::da_gamma,
                                     &ResidueInputs::da_sup})
        twice.*f *= 2.0;
    EXPECT_NEAR(residue_bound(twice).log_holder - residue_bound(in).log_holder, std::log(2.0), 1e-12);
    EXPECT_NEAR(residue_bound(twice).log_sup - residue_bound(in).log_sup, std::log(2.0), 1e-12);
    ResidueInputs bad = in;
    bad.exponents = {0.6, 0.6, 0.5};
    EXPECT_THROW(residue_bound(bad), std::domain_error);
}

TEST(Residue, DominatesPerturbedDriver) {
    const HurstParameter H(0.75);
    const TimeGrid g(0.0, 1.0, 512);
    const HolderPath X = sample_fbm(g, H, 1, 31).path, W = sample_fbm(g, H, 1, 32).path, f = sample_fbm(g, H, 1, 33).path;
    const double d = 0.01;
    const HolderPath Xt = X + W.scaled(d);
    const OperatorPath A = constant_operator(g, 0.9);
    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 0.5);
    const HolderPath Y = solve_controlled_yde(A, X, f, y0), Yt = solve_controlled_yde(A, Xt, f, y0);
    ResidueInputs in;
    in.a_gamma = in.at_gamma = 0.0;
    in.a_sup = in.at_sup = 0.9;
    in.x_beta = holder_norm(X, ex.beta);
    in.xt_beta = holder_norm(Xt, ex.beta);
    in.zt0 = 0.5;
    in.zt_alpha = holder_norm(f, ex.alpha);
    in.dx_beta = holder_norm(X - Xt, ex.beta);
    in.exponents = ex;
    const BoundCertificate c = residue_bound(in);
    EXPECT_TRUE(c.dominates_holder(holder_norm(Y - Yt, ex.alpha)));
    EXPECT_TRUE(c.dominates_sup(sup_norm(Y - Yt)));
    EXPECT_GT(holder_norm(Y - Yt, ex.alpha), 0.0);
}
