#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbm.hpp"
#include "model.hpp"
#include "ou.hpp"
#include "path.hpp"
#include "quadrature.hpp"
#include "yde.hpp"

namespace fracfluct {

inline constexpr double default_blowup_threshold = 1e12;

// g_k(y_{t_i}) for every channel k (rows) and grid point i (columns).
inline MatrixXd channel_weights(const ModelSpec& model, const FastPath& fast) {
    const std::size_t K = model.n_channels();
    MatrixXd w(static_cast<Index>(K), static_cast<Index>(fast.values.n_points()));
    for (std::size_t k = 0; k < K; ++k) {
        const PolyFunction& g = model.channels()[k].y_factor;
        for (std::size_t i = 0; i < fast.values.n_points(); ++i)
            w(static_cast<Index>(k), static_cast<Index>(i)) = g(fast.at(i));
    }
    return w;
}

namespace detail {

inline void check_inputs(const ModelSpec& model, const FbmPath& fbm, const VectorXd& x0) {
    if (fbm.channels() != model.driver_dim()) throw std::invalid_argument("multiscale: driver dimension mismatch");
    if (x0.size() != model.state_dim()) throw std::invalid_argument("multiscale: initial state dimension mismatch");
}

// x_{k+1} = x_k + sum_c s_c(x_k) w(c, k) M_c dB_k, with w(c, k) supplied by the caller.
template <class Weight>
HolderPath young_euler(const ModelSpec& model, const HolderPath& driver, const VectorXd& x0, Weight&& weight,
                       double threshold, const char* where) {
    const Index d = model.state_dim();
    const Index m = model.driver_dim();
    const auto& ch = model.channels();
    const std::size_t K = ch.size();
    const std::size_t n = driver.n_points();
    HolderPath x(driver.grid(), d);
    x.at(0) = x0;
    if (d == 1 && m == 1) {
        std::vector<double> dir(K);
        for (std::size_t c = 0; c < K; ++c) dir[c] = ch[c].direction(0, 0);
        double v = x0(0);
        const double* b = driver.values().data();
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double db = b[k + 1] - b[k];
            double incr = 0.0;
            for (std::size_t c = 0; c < K; ++c) incr += ch[c].profile.value1(v) * weight(c, k) * dir[c];
            v += incr * db;
            if (!std::isfinite(v) || std::abs(v) > threshold) throw BlowUpError(where, k + 1);
            x(0, k + 1) = v;
        }
        return x;
    }
    VectorXd db(m), state(d);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        db = driver.at(k + 1) - driver.at(k);
        state = x.at(k);
        VectorXd next = state;
        for (std::size_t c = 0; c < K; ++c)
            next.noalias() += (ch[c].profile.value(state) * weight(c, k)) * (ch[c].direction * db);
        guard_state(next, threshold, where, k + 1);
        x.at(k + 1) = next;
    }
    return x;
}

}  // namespace detail

inline HolderPath simulate_slow(const ModelSpec& model, const FbmPath& fbm, const FastPath& fast, const VectorXd& x0,
                                double threshold = default_blowup_threshold) {
    require_same_grid(fbm.grid(), fast.grid(), "simulate_slow");
    detail::check_inputs(model, fbm, x0);
    const MatrixXd w = channel_weights(model, fast);
    return detail::young_euler(
        model, fbm.path, x0, [&](std::size_t c, std::size_t k) { return w(static_cast<Index>(c), static_cast<Index>(k)); },
        threshold, "simulate_slow");
}

// Young-Euler solution of dx = fbar(x) dX for an arbitrary driver path.
inline HolderPath solve_averaged(const ModelSpec& model, const HolderPath& driver, const VectorXd& x0,
                                 double threshold = default_blowup_threshold) {
    return detail::young_euler(
        model, driver, x0, [&](std::size_t c, std::size_t) { return model.channel_mean(c); }, threshold,
        "simulate_averaged");
}

inline HolderPath simulate_averaged(const ModelSpec& model, const FbmPath& fbm, const VectorXd& x0,
                                    double threshold = default_blowup_threshold) {
    detail::check_inputs(model, fbm, x0);
    return solve_averaged(model, fbm.path, x0, threshold);
}

inline HolderPath fluctuation(const HolderPath& x_eps, const HolderPath& x_bar, double epsilon, HurstParameter H) {
    require_same_grid(x_eps.grid(), x_bar.grid(), "fluctuation");
    if (!(epsilon > 0.0)) throw std::domain_error("fluctuation: epsilon must be positive");
    return {x_eps.grid(), (x_eps.values() - x_bar.values()) * std::pow(epsilon, -H.alpha())};
}

namespace detail {

// eps^{1/2-H} sum_k (f(x_k, y_k) - fbar(x_k)) dB_k with x_k = point(k).
template <class Point>
HolderPath noise_sum(const ModelSpec& model, const FbmPath& fbm, const FastPath& fast, Point&& point) {
    require_same_grid(fbm.grid(), fast.grid(), "v_epsilon");
    if (fbm.channels() != model.driver_dim()) throw std::invalid_argument("v_epsilon: driver dimension mismatch");
    const MatrixXd w = channel_weights(model, fast);
    const double scale = std::pow(fast.epsilon, -fbm.hurst.alpha());
    const Index d = model.state_dim();
    const auto& ch = model.channels();
    HolderPath v(fbm.grid(), d);
    VectorXd acc = VectorXd::Zero(d);
    for (std::size_t k = 0; k + 1 < fbm.path.n_points(); ++k) {
        const VectorXd db = fbm.increment(k);
        const auto x = point(k);
        for (std::size_t c = 0; c < ch.size(); ++c) {
            const double centered = w(static_cast<Index>(c), static_cast<Index>(k)) - model.channel_mean(c);
            if (centered == 0.0) continue;
            acc.noalias() += (ch[c].profile.value(x) * centered * scale) * (ch[c].direction * db);
        }
        v.at(k + 1) = acc;
    }
    return v;
}

}  // namespace detail

inline std::vector<HolderPath> v_epsilon(const ModelSpec& model, const FbmPath& fbm, const FastPath& fast,
                                         const SpatialGrid& points) {
    if (points.dim() != model.state_dim()) throw std::invalid_argument("v_epsilon: point dimension mismatch");
    std::vector<HolderPath> out;
    out.reserve(points.size());
    for (const auto& x : points.points())
        out.push_back(detail::noise_sum(model, fbm, fast, [&](std::size_t) -> const VectorXd& { return x; }));
    return out;
}

inline HolderPath v_epsilon_along(const ModelSpec& model, const FbmPath& fbm, const FastPath& fast,
                                  const HolderPath& x_path) {
    require_same_grid(fbm.grid(), x_path.grid(), "v_epsilon_along");
    if (x_path.dim() != model.state_dim()) throw std::invalid_argument("v_epsilon_along: state dimension mismatch");
    return detail::noise_sum(model, fbm, fast, [&](std::size_t k) { return x_path.at(k); });
}

// A_t = int_0^1 Dfbar(theta x_eps + (1 - theta) x_bar) dtheta by Gauss-Legendre of the given order.
inline OperatorPath a_epsilon(const ModelSpec& model, const HolderPath& x_eps, const HolderPath& x_bar,
                              int theta_order = 16) {
    require_same_grid(x_eps.grid(), x_bar.grid(), "a_epsilon");
    const QuadratureRule& rule = gauss_legendre_cached(theta_order);
    const Index d = model.state_dim();
    OperatorPath A(x_eps.grid(), d, model.driver_dim());
    VectorXd pt(d);
    for (std::size_t k = 0; k < x_eps.n_points(); ++k) {
        const auto a = x_eps.at(k);
        const auto b = x_bar.at(k);
        if (a == b) {
            A.block(k) = model.dfbar(b);
            continue;
        }
        MatrixXd acc = MatrixXd::Zero(d, d * model.driver_dim());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            pt = rule.nodes[i] * a + (1.0 - rule.nodes[i]) * b;
            acc += rule.weights[i] * model.dfbar(pt);
        }
        A.block(k) = acc;
    }
    return A;
}

inline OperatorPath dfbar_along(const ModelSpec& model, const HolderPath& x) {
    OperatorPath A(x.grid(), model.state_dim(), model.driver_dim());
    for (std::size_t k = 0; k < x.n_points(); ++k) A.block(k) = model.dfbar(x.at(k));
    return A;
}

// U_t(x) = fbar(x) B_t at each point.
inline std::vector<HolderPath> u_paths(const ModelSpec& model, const FbmPath& fbm, const SpatialGrid& points) {
    std::vector<HolderPath> out;
    for (const auto& x : points.points()) {
        const MatrixXd F = model.fbar(x);
        out.emplace_back(fbm.grid(), F * fbm.path.values());
    }
    return out;
}

}  // namespace fracfluct
