#include <gtest/gtest.h>

#include <cmath>

#include <fracfluct/fbm.hpp>
#include <fracfluct/lifts.hpp>
#include <fracfluct/rough.hpp>

using namespace fracfluct;

namespace {

const HurstParameter H(0.75);

double area_diff(const TwoParamArea& a, const TwoParamArea& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
    return m / std::max(1.0, area_scale(b));
}

LiftComponents components(std::size_t n, int dim, std::uint64_t seed) {
    const TimeGrid g(0.0, 1.0, n);
    return LiftComponents::with_areas(sample_fbm(g, H, dim, seed).path, sample_fbm(g, H, dim, seed + 100).path);
}

}  // namespace

TEST(Lifts, PathsAreAffineCombinations) {
    const LiftComponents c = components(64, 2, 1);
    const double eps = 0.01, lam = std::pow(eps, H.alpha());
    const LiftFamily f = lift_u_epsilon(c, eps, H);
    EXPECT_LT((f.u_eps_path - (c.u + c.v.scaled(lam))).values().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(f.w_bar_path.dim(), 4);
    EXPECT_EQ(f.w_eps_path.values().topRows(2), c.v.values());
    EXPECT_EQ(f.w_eps_path.values().bottomRows(2), f.u_eps_path.values());
}

TEST(Lifts, AreasMatchDirectIntegrals) {
    // bilinearity of the discrete integral: the combined areas equal the areas of the combined paths
    const LiftComponents c = components(128, 2, 2);
    for (double eps : {0.5, 0.01, 1e-4}) {
        const LiftFamily f = lift_u_epsilon(c, eps, H);
        EXPECT_LT(area_diff(f.u_eps, levy_area(f.u_eps_path, f.u_eps_path)), 1e-12) << eps;
        EXPECT_LT(area_diff(f.w_eps, levy_area(f.w_eps_path, f.w_eps_path)), 1e-12) << eps;
        EXPECT_LT(area_diff(f.w_bar, levy_area(f.w_bar_path, f.w_bar_path)), 1e-12) << eps;
    }
}

TEST(Lifts, ChenRelationHolds) {
    const LiftComponents c = components(128, 1, 3);
    const LiftFamily f = lift_u_epsilon(c, 0.01, H);
    EXPECT_LT(chen_defect(f.u_eps, f.u_eps_path, f.u_eps_path) / area_scale(f.u_eps), 1e-10);
    EXPECT_LT(chen_defect(f.w_eps, f.w_eps_path, f.w_eps_path) / area_scale(f.w_eps), 1e-10);
    EXPECT_LT(chen_defect(f.w_bar, f.w_bar_path, f.w_bar_path) / area_scale(f.w_bar), 1e-10);
}

TEST(Lifts, BarLiftIgnoresEpsilon) {
    const LiftComponents c = components(32, 1, 4);
    const LiftFamily a = lift_u_epsilon(c, 0.1, H), b = lift_u_epsilon(c, 1e-6, H);
    EXPECT_EQ(a.w_bar.raw(), b.w_bar.raw());
    EXPECT_EQ(a.w_bar_path.values(), b.w_bar_path.values());
}

TEST(Lifts, SmallEpsilonApproachesU) {
    // |A^eps - A_UU| <= lam (|A_VU| + |A_UV|) + lam^2 |A_VV| entrywise, lam = eps^{H-1/2}
    const LiftComponents c = components(32, 1, 5);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-4, 1e-8}) {
        const double lam = std::pow(eps, H.alpha());
        const double bound = (lam * (area_scale(*c.vu) + area_scale(*c.uv)) + lam * lam * area_scale(*c.vv)) /
                             std::max(1.0, area_scale(*c.uu));
        const double d = area_diff(lift_u_epsilon(c, eps, H).u_eps, *c.uu);
        EXPECT_LE(d, bound * (1 + 1e-12)) << eps;
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(Lifts, InputValidation) {
    LiftComponents c = components(16, 1, 6);
    EXPECT_THROW(lift_u_epsilon(c, 0.0, H), std::domain_error);
    LiftComponents missing = c;
    missing.uv.reset();
    EXPECT_THROW(lift_u_epsilon(missing, 0.1, H), std::invalid_argument);
    const LiftComponents wide = LiftComponents::with_areas(c.v, stack({c.u, c.u}));
    EXPECT_THROW(lift_u_epsilon(wide, 0.1, H), std::invalid_argument);
}
