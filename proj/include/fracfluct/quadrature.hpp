#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fracfluct {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [0, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int order) {
    if (order < 1 || order > 256) throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
    QuadratureRule r;
    r.nodes.resize(static_cast<std::size_t>(order));
    r.weights.resize(static_cast<std::size_t>(order));
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(n - 1 - i);
        r.nodes[a] = 0.5 * (1.0 - x);
        r.nodes[b] = 0.5 * (1.0 + x);
        r.weights[a] = 0.5 * w;
        r.weights[b] = 0.5 * w;
    }
    return r;
}

// Cached rule for repeated use (not thread-local state; callers keep the returned copy).
inline const QuadratureRule& gauss_legendre_cached(int order) {
    static const std::vector<QuadratureRule> table = [] {
        std::vector<QuadratureRule> t;
        for (int k = 1; k <= 64; ++k) t.push_back(gauss_legendre(k));
        return t;
    }();
    if (order < 1 || order > 64) throw std::invalid_argument("gauss_legendre_cached: order must be in [1, 64]");
    return table[static_cast<std::size_t>(order - 1)];
}

}  // namespace fracfluct
