#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "grid.hpp"
#include "path.hpp"
#include "rough.hpp"

namespace fracfluct {

// V^eps and U (spatial points stacked) with their areas; cross areas are Young integrals.
struct LiftComponents {
    HolderPath v;
    HolderPath u;
    std::optional<TwoParamArea> vv;  // int V (x) dV
    std::optional<TwoParamArea> uu;  // int U (x) dU
    std::optional<TwoParamArea> vu;  // int V (x) dU
    std::optional<TwoParamArea> uv;  // int U (x) dV

    static LiftComponents with_areas(HolderPath v, HolderPath u) {
        LiftComponents c{std::move(v), std::move(u), {}, {}, {}, {}};
        c.vv = levy_area(c.v, c.v);
        c.uu = levy_area(c.u, c.u);
        c.vu = levy_area(c.v, c.u);
        c.uv = levy_area(c.u, c.v);
        return c;
    }
};

struct LiftFamily {
    HolderPath u_eps_path;  // U + eps^{H-1/2} V
    HolderPath w_eps_path;  // (V, U^eps)
    HolderPath w_bar_path;  // (V, U)
    TwoParamArea u_eps;
    TwoParamArea w_eps;
    TwoParamArea w_bar;
};

namespace detail {

inline HolderPath stack2(const HolderPath& a, const HolderPath& b) { return stack({a, b}); }

// [[A, B], [C, D]] entrywise over all stored pairs.
inline TwoParamArea block_area(const TwoParamArea& A, const TwoParamArea& B, const TwoParamArea& C,
                               const TwoParamArea& D) {
    const Index r1 = A.rows(), r2 = C.rows(), c1 = A.cols(), c2 = B.cols();
    TwoParamArea out(A.grid(), r1 + r2, c1 + c2);
    const std::size_t n = A.n_points();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t) {
            auto o = out.at(s, t);
            o.topLeftCorner(r1, c1) = A.at(s, t);
            o.topRightCorner(r1, c2) = B.at(s, t);
            o.bottomLeftCorner(r2, c1) = C.at(s, t);
            o.bottomRightCorner(r2, c2) = D.at(s, t);
        }
    return out;
}

inline TwoParamArea combine(const TwoParamArea& a, double wa, const TwoParamArea& b, double wb) {
    TwoParamArea out(a.grid(), a.rows(), a.cols());
    for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] = wa * a.raw()[i] + wb * b.raw()[i];
    return out;
}

}  // namespace detail

// U^eps lift, the joint lift of W^eps = (V^eps, U^eps) and the lift of (V^eps, U).
inline LiftFamily lift_u_epsilon(const LiftComponents& c, double epsilon, HurstParameter H) {
    if (!c.vv || !c.uu || !c.vu || !c.uv) throw std::invalid_argument("lift_u_epsilon: missing area component");
    require_same_grid(c.v.grid(), c.u.grid(), "lift_u_epsilon");
    for (const TwoParamArea* a : {&*c.vv, &*c.uu, &*c.vu, &*c.uv})
        require_same_grid(a->grid(), c.v.grid(), "lift_u_epsilon");
    if (c.v.dim() != c.u.dim()) throw std::invalid_argument("lift_u_epsilon: V and U must share spatial points");
    const Index D = c.v.dim();
    if (c.vv->rows() != D || c.uu->rows() != D || c.vu->rows() != D || c.uv->rows() != D)
        throw std::invalid_argument("lift_u_epsilon: area shape mismatch");
    if (!(epsilon > 0.0)) throw std::domain_error("lift_u_epsilon: epsilon must be positive");
    const double lam = std::pow(epsilon, H.alpha());
    const TwoParamArea& vv = *c.vv;
    const TwoParamArea& uu = *c.uu;
    const TwoParamArea& vu = *c.vu;
    const TwoParamArea& uv = *c.uv;

    TwoParamArea u_eps(vv.grid(), D, D);
    for (std::size_t i = 0; i < u_eps.raw().size(); ++i)
        u_eps.raw()[i] = uu.raw()[i] + lam * (vu.raw()[i] + uv.raw()[i]) + lam * lam * vv.raw()[i];
    const TwoParamArea v_ueps = detail::combine(vu, 1.0, vv, lam);  // int V (x) dU^eps
    const TwoParamArea ueps_v = detail::combine(uv, 1.0, vv, lam);  // int U^eps (x) dV

    HolderPath u_eps_path{c.u.grid(), c.u.values() + lam * c.v.values()};
    LiftFamily out{u_eps_path,
                   detail::stack2(c.v, u_eps_path),
                   detail::stack2(c.v, c.u),
                   std::move(u_eps),
                   {},
                   detail::block_area(vv, vu, uv, uu)};
    out.w_eps = detail::block_area(vv, v_ueps, ueps_v, out.u_eps);
    return out;
}

}  // namespace fracfluct
