#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "path.hpp"

namespace fracfluct {

// Left-point Riemann sum of Y dX. Y has dimension r*m (an r x m matrix, column-major) and X dimension m.
inline HolderPath young_integral(const HolderPath& Y, const HolderPath& X) {
    require_same_grid(Y.grid(), X.grid(), "young_integral");
    const Index m = X.dim();
    if (Y.dim() % m != 0) throw std::invalid_argument("young_integral: integrand dimension not a multiple of integrator dimension");
    const Index r = Y.dim() / m;
    HolderPath out(X.grid(), r);
    for (std::size_t k = 0; k + 1 < X.n_points(); ++k) {
        Eigen::Map<const MatrixXd> y(Y.values().data() + static_cast<Index>(k) * Y.dim(), r, m);
        out.at(k + 1) = out.at(k) + y * (X.at(k + 1) - X.at(k));
    }
    return out;
}

// Discrete trapezoid lift A_{s,t} = sum_{s<=k<t} ((X_k + X_{k+1})/2 - X_s) (Y_{k+1} - Y_k)^T.
inline TwoParamArea levy_area(const HolderPath& X, const HolderPath& Y) {
    require_same_grid(X.grid(), Y.grid(), "levy_area");
    const Index r = X.dim();
    const Index c = Y.dim();
    const std::size_t n = X.n_points();
    TwoParamArea area(X.grid(), r, c);
    std::vector<MatrixXd> cum(n, MatrixXd::Zero(r, c));
    for (std::size_t k = 0; k + 1 < n; ++k)
        cum[k + 1] = cum[k] + 0.5 * (X.at(k) + X.at(k + 1)) * (Y.at(k + 1) - Y.at(k)).transpose();
    for (std::size_t s = 0; s < n; ++s) {
        const VectorXd xs = X.at(s);
        const VectorXd ys = Y.at(s);
        for (std::size_t t = s + 1; t < n; ++t)
            area.at(s, t) = cum[t] - cum[s] - xs * (Y.at(t) - ys).transpose();
    }
    return area;
}

// max_{s<t} |A_{s,t}|
inline double area_scale(const TwoParamArea& A) {
    double m = 0.0;
    const std::size_t block = static_cast<std::size_t>(A.rows() * A.cols());
    const auto& raw = A.raw();
    for (std::size_t i = 0; i < raw.size(); i += block) {
        double s = 0.0;
        for (std::size_t j = 0; j < block; ++j) s += raw[i + j] * raw[i + j];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

namespace detail {

struct Triple {
    std::size_t s, u, t;
};

// All triples when affordable, otherwise a coarse dyadic lattice, every bisection triple and every
// consecutive triple.
inline std::vector<Triple> chen_triples(std::size_t n_points, std::size_t budget) {
    std::vector<Triple> out;
    const std::size_t N = n_points;
    const double all = static_cast<double>(N) * static_cast<double>(N - 1) * static_cast<double>(N - 2) / 6.0;
    if (N < 3) return out;
    if (all <= static_cast<double>(budget)) return out;  // empty means "all"
    const std::size_t n = N - 1;
    std::size_t q = 1;
    while (true) {
        const double m = static_cast<double>(n / q + 1);
        if (m * (m - 1) * (m - 2) / 6.0 <= static_cast<double>(budget) / 2) break;
        q *= 2;
    }
    std::vector<std::size_t> pts;
    for (std::size_t k = 0; k <= n; k += q) pts.push_back(k);
    if (pts.back() != n) pts.push_back(n);
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            for (std::size_t c = b + 1; c < pts.size(); ++c) out.push_back({pts[a], pts[b], pts[c]});
    for (std::size_t half = 1; 2 * half <= n; half *= 2)
        for (std::size_t s = 0; s + 2 * half <= n; s += 2 * half) out.push_back({s, s + half, s + 2 * half});
    for (std::size_t s = 0; s + 2 <= n; ++s) out.push_back({s, s + 1, s + 2});
    return out;
}

}  // namespace detail

// max over grid triples s < u < t of |A_{s,t} - A_{s,u} - A_{u,t} - X_{s,u} (x) Y_{u,t}|.
inline double chen_defect(const TwoParamArea& A, const HolderPath& X, const HolderPath& Y,
                          std::size_t triple_budget = 30'000'000) {
    require_same_grid(A.grid(), X.grid(), "chen_defect");
    require_same_grid(A.grid(), Y.grid(), "chen_defect");
    if (A.rows() != X.dim() || A.cols() != Y.dim()) throw std::invalid_argument("chen_defect: shape mismatch");
    const Index r = A.rows();
    const Index c = A.cols();
    const double* xv = X.values().data();
    const double* yv = Y.values().data();
    double worst = 0.0;
    auto check = [&](std::size_t s, std::size_t u, std::size_t t) {
        const double* ast = A.at(s, t).data();
        const double* asu = A.at(s, u).data();
        const double* aut = A.at(u, t).data();
        double acc = 0.0;
        for (Index j = 0; j < c; ++j) {
            const double dy = yv[static_cast<Index>(t) * c + j] - yv[static_cast<Index>(u) * c + j];
            for (Index i = 0; i < r; ++i) {
                const double dx = xv[static_cast<Index>(u) * r + i] - xv[static_cast<Index>(s) * r + i];
                const Index e = j * r + i;
                const double v = ast[e] - asu[e] - aut[e] - dx * dy;
                acc += v * v;
            }
        }
        worst = std::max(worst, acc);
    };
    const std::size_t N = A.n_points();
    const auto subset = detail::chen_triples(N, triple_budget);
    if (subset.empty()) {
        for (std::size_t s = 0; s < N; ++s)
            for (std::size_t u = s + 1; u < N; ++u)
                for (std::size_t t = u + 1; t < N; ++t) check(s, u, t);
    } else {
        for (const auto& tr : subset) check(tr.s, tr.u, tr.t);
    }
    return std::sqrt(worst);
}

namespace detail {

// Visit grid pairs s < t: all of them under the budget, else dyadic spans from every start
// plus the full span.
template <class F>
void visit_pairs(std::size_t n_points, std::size_t budget, F&& f) {
    const std::size_t N = n_points;
    if (N < 2) return;
    if (static_cast<double>(N) * static_cast<double>(N) <= static_cast<double>(budget)) {
        for (std::size_t s = 0; s < N; ++s)
            for (std::size_t t = s + 1; t < N; ++t) f(s, t);
        return;
    }
    const std::size_t n = N - 1;
    for (std::size_t len = 1; len <= n; len *= 2)
        for (std::size_t s = 0; s + len <= n; ++s) f(s, s + len);
    f(0, n);
}

}  // namespace detail

inline constexpr std::size_t default_pair_budget = std::size_t{1} << 24;

// sup |X_{s,t}| / |t-s|^alpha over the visited pairs; a lower bound for the continuum norm.
inline double holder_norm(const HolderPath& X, double alpha, std::size_t pair_budget = default_pair_budget) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("holder_norm: alpha must lie in (0,1)");
    const TimeGrid& g = X.grid();
    const Index d = X.dim();
    const double* v = X.values().data();
    const double h = g.step();
    double best = 0.0;
    detail::visit_pairs(X.n_points(), pair_budget, [&](std::size_t s, std::size_t t) {
        double acc = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double dx = v[static_cast<Index>(t) * d + i] - v[static_cast<Index>(s) * d + i];
            acc += dx * dx;
        }
        const double len = g.time(t) - g.time(s);
        const double ratio = std::sqrt(acc) / std::pow(len > 0 ? len : h, alpha);
        best = std::max(best, ratio);
    });
    return best;
}

// sup |A_{s,t}| / |t-s|^gamma over the visited pairs.
inline double holder_norm(const TwoParamArea& A, double gamma, std::size_t pair_budget = default_pair_budget) {
    if (!(gamma > 0.0)) throw std::domain_error("holder_norm: exponent must be positive");
    const TimeGrid& g = A.grid();
    double best = 0.0;
    detail::visit_pairs(A.n_points(), pair_budget, [&](std::size_t s, std::size_t t) {
        best = std::max(best, A.at(s, t).norm() / std::pow(g.time(t) - g.time(s), gamma));
    });
    return best;
}

inline double sup_norm(const HolderPath& X) {
    double m = 0.0;
    for (std::size_t k = 0; k < X.n_points(); ++k) m = std::max(m, X.at(k).norm());
    return m;
}

}  // namespace fracfluct
