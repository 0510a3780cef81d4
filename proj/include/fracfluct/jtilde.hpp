#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cumulants.hpp"
#include "grid.hpp"
#include "partition.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace fracfluct {

enum class JTildeMode { deterministic, monte_carlo };

struct JTildeOptions {
    JTildeMode mode = JTildeMode::deterministic;
    int order = 8;                   // Gauss-Legendre points per panel
    double finest_panel = 0.05;      // width of the panels touching a breakpoint, in units of 1/c
    double tie_cutoff = 37.0;        // exponential ties with c|r_i - r_j| beyond this are dropped
    std::size_t samples = 200000;    // Monte Carlo mode
    std::uint64_t seed = 0;
};

inline constexpr int jtilde_max_nodes_deterministic = 4;
inline constexpr int jtilde_max_nodes_monte_carlo = 6;

namespace detail {

// One connected component of Δ ∨ p, with integration order and the factors
// that become available when each node is placed.
struct JComponent {
    struct Level {
        int node = -1;
        std::vector<int> ties;   // earlier levels in the same non-singleton Δ block
        int partner = -1;        // earlier level paired with this node, or -1
    };
    std::vector<Level> levels;   // levels[0] is the root, pinned at 0
};

inline JComponent build_component(const PairPartitionDiagram& g, const std::vector<int>& nodes) {
    const auto& delta = g.delta();
    const auto& pairing = g.pairing();
    std::vector<std::size_t> bsize(delta.num_blocks(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) ++bsize[static_cast<std::size_t>(delta.block_of(i))];
    auto tied = [&](int a, int b) {
        const int blk = delta.block_of(static_cast<std::size_t>(a));
        return blk == delta.block_of(static_cast<std::size_t>(b)) && bsize[static_cast<std::size_t>(blk)] > 1;
    };
    auto paired = [&](int a, int b) { return pairing.block_of(static_cast<std::size_t>(a)) == pairing.block_of(static_cast<std::size_t>(b)); };

    int root = nodes.front();
    for (int v : nodes)
        if (bsize[static_cast<std::size_t>(delta.block_of(static_cast<std::size_t>(v)))] >
            bsize[static_cast<std::size_t>(delta.block_of(static_cast<std::size_t>(root)))])
            root = v;

    JComponent comp;
    std::vector<int> placed{root};
    std::vector<int> rest;
    for (int v : nodes)
        if (v != root) rest.push_back(v);
    comp.levels.push_back({root, {}, -1});
    while (!rest.empty()) {
        // exponential ties first, then pair edges
        int pick = -1;
        for (int pass = 0; pass < 2 && pick < 0; ++pass)
            for (int v : rest) {
                const bool ok = std::any_of(placed.begin(), placed.end(), [&](int u) { return pass == 0 ? tied(u, v) : paired(u, v); });
                if (ok) {
                    pick = v;
                    break;
                }
            }
        if (pick < 0) throw std::logic_error("jtilde: component is not connected");
        JComponent::Level lv;
        lv.node = pick;
        for (std::size_t k = 0; k < placed.size(); ++k) {
            if (tied(placed[k], pick)) lv.ties.push_back(static_cast<int>(k));
            if (paired(placed[k], pick)) lv.partner = static_cast<int>(k);
        }
        comp.levels.push_back(std::move(lv));
        placed.push_back(pick);
        rest.erase(std::find(rest.begin(), rest.end(), pick));
    }
    return comp;
}

inline std::vector<JComponent> components_of(const PairPartitionDiagram& g) {
    std::vector<JComponent> out;
    for (const auto& blk : g.joined().blocks()) out.push_back(build_component(g, blk));
    return out;
}

// Nested graded Gauss-Legendre over the difference variables of one component:
// ∫_{R^{n-1}} Π ties · Π pairs · (L - span)_+ dx, root at 0, reflected about 0.
class NestedJQuadrature {
public:
    NestedJQuadrature(const JComponent& comp, double length, double pw, double c, const JTildeOptions& opts)
        : comp_(comp), L_(length), p_(pw), c_(c), R_(opts.tie_cutoff / c), w0_(opts.finest_panel / c),
          rule_(gauss_legendre_cached(opts.order)), pos_(comp.levels.size(), 0.0), buf_(comp.levels.size()) {}

    double integrate() {
        if (comp_.levels.size() < 2) return 0.0;
        return 2.0 * level(1, 0.0, 0.0);
    }

private:
    struct Node {
        double x;
        double w;
        bool pair_done;
    };

    void add_panel(std::vector<Node>& out, double a, double b) const {
        const double h = b - a;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) out.push_back({a + h * rule_.nodes[i], h * rule_.weights[i], false});
    }
    // Panel [e, e + dir*h] with the pair singularity |x - e|^{p-1} absorbed by x - e = dir*h*u^{k/p}:
    // the weight becomes (k/p) h^p u^{k-1} and the rest of the integrand is smooth up to u^{k/p}.
    // k = ceil(3p) keeps k/p in [2, 4] for p >= 1/3 without bunching nodes for small p.
    void add_singular_panel(std::vector<Node>& out, double e, double dir, double h) const {
        const int k = std::max(1, static_cast<int>(std::ceil(3.0 * p_ - 1e-9)));
        const double jac = k * std::pow(h, p_) / p_;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
            const double u = rule_.nodes[i];
            out.push_back({e + dir * h * std::pow(u, k / p_), rule_.weights[i] * jac * std::pow(u, k - 1), true});
        }
    }
    // Geometric panels on [e, e + dir*len] refining toward e.
    void add_graded(std::vector<Node>& out, double e, double dir, double len, bool singular) const {
        if (len <= 0.0) return;
        double inner = std::min(w0_, len);
        if (singular) add_singular_panel(out, e, dir, inner);
        else add_panel(out, std::min(e, e + dir * inner), std::max(e, e + dir * inner));
        double d = inner;
        while (d < len) {
            const double next = std::min(2.0 * d, len);
            const double a = e + dir * d, b = e + dir * next;
            add_panel(out, std::min(a, b), std::max(a, b));
            d = next;
        }
    }

    double level(std::size_t k, double hi, double lo) {
        const auto& lv = comp_.levels[k];
        double a = hi - L_, b = lo + L_;
        for (int t : lv.ties) {
            a = std::max(a, pos_[static_cast<std::size_t>(t)] - R_);
            b = std::min(b, pos_[static_cast<std::size_t>(t)] + R_);
        }
        if (k == 1) a = std::max(a, 0.0);
        if (!(a < b)) return 0.0;

        std::vector<double> cuts{a, b};
        for (std::size_t j = 0; j < k; ++j)
            if (pos_[j] >= a && pos_[j] <= b) cuts.push_back(pos_[j]);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        auto is_placed = [&](double x) {
            for (std::size_t j = 0; j < k; ++j)
                if (pos_[j] == x) return true;
            return false;
        };
        const double sing = lv.partner >= 0 ? pos_[static_cast<std::size_t>(lv.partner)] : std::nan("");

        auto& nodes = buf_[k];
        nodes.clear();
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double u = cuts[i], v = cuts[i + 1];
            const bool gu = is_placed(u), gv = is_placed(v);
            if (gu && gv) {
                const double m = 0.5 * (u + v);
                add_graded(nodes, u, 1.0, m - u, u == sing);
                add_graded(nodes, v, -1.0, v - m, v == sing);
            } else if (gu) {
                add_graded(nodes, u, 1.0, v - u, u == sing);
            } else if (gv) {
                add_graded(nodes, v, -1.0, v - u, v == sing);
            } else {
                const int np = std::max(1, static_cast<int>(std::ceil((v - u) * c_ / 4.0)));
                for (int j = 0; j < np; ++j) add_panel(nodes, u + (v - u) * j / np, u + (v - u) * (j + 1) / np);
            }
        }

        const bool last = k + 1 == comp_.levels.size();
        double acc = 0.0;
        // nodes may be reallocated by deeper levels only in their own buffers
        for (std::size_t i = 0; i < buf_[k].size(); ++i) {
            const Node nd = buf_[k][i];
            double f = nd.w;
            double s = 0.0;
            for (int t : lv.ties) s += std::abs(nd.x - pos_[static_cast<std::size_t>(t)]);
            f *= std::exp(-c_ * s);
            if (lv.partner >= 0 && !nd.pair_done) f *= std::pow(std::abs(nd.x - sing), p_ - 1.0);
            if (f == 0.0) continue;
            const double h2 = std::max(hi, nd.x), l2 = std::min(lo, nd.x);
            pos_[k] = nd.x;
            acc += last ? f * std::max(0.0, L_ - (h2 - l2)) : f * level(k + 1, h2, l2);
        }
        return acc;
    }

    const JComponent& comp_;
    double L_, p_, c_, R_, w0_;
    const QuadratureRule& rule_;
    std::vector<double> pos_;
    std::vector<std::vector<Node>> buf_;
};

// Importance sampling with a defensive mixture per node: Laplace(1/c) around each
// exponential tie and the pair power law (p / 2L^p)|u|^{p-1} on [-L, L] around the partner.
inline Estimate monte_carlo_component(const JComponent& comp, double L, double pw, double c, std::size_t samples, Engine& eng) {
    const std::size_t n = comp.levels.size();
    std::vector<double> pos(n, 0.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(c);
    const double pl_norm = pw / (2.0 * std::pow(L, pw));
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t it = 0; it < samples; ++it) {
        double w = 1.0, hi = 0.0, lo = 0.0;
        for (std::size_t k = 1; k < n && w > 0.0; ++k) {
            const auto& lv = comp.levels[k];
            const std::size_t ncomp = lv.ties.size() + (lv.partner >= 0 ? 1 : 0);
            const auto pick = static_cast<std::size_t>(unif(eng) * static_cast<double>(ncomp));
            const double sign = unif(eng) < 0.5 ? -1.0 : 1.0;
            double x;
            if (pick < lv.ties.size()) {
                x = pos[static_cast<std::size_t>(lv.ties[pick])] + sign * expo(eng);
            } else {
                const double u = L * std::pow(1.0 - unif(eng), 1.0 / pw);
                x = pos[static_cast<std::size_t>(lv.partner)] + sign * u;
            }
            double q = 0.0, f_exp = 0.0;
            for (int t : lv.ties) {
                const double d = std::abs(x - pos[static_cast<std::size_t>(t)]);
                q += 0.5 * c * std::exp(-c * d);
                f_exp += d;
            }
            double f = std::exp(-c * f_exp);
            if (lv.partner >= 0) {
                const double d = std::abs(x - pos[static_cast<std::size_t>(lv.partner)]);
                const double pf = std::pow(d, pw - 1.0);
                if (d <= L) q += pl_norm * pf;
                f *= pf;
            }
            q /= static_cast<double>(ncomp);
            w = q > 0.0 ? w * f / q : 0.0;
            pos[k] = x;
            hi = std::max(hi, x);
            lo = std::min(lo, x);
        }
        w *= std::max(0.0, L - (hi - lo));
        s1 += w;
        s2 += w * w;
    }
    const double ns = static_cast<double>(samples);
    const double mean = s1 / ns;
    const double var = std::max(0.0, s2 / ns - mean * mean);
    return {mean, std::sqrt(var / ns)};
}

}  // namespace detail

// J̃^ε(Δ, p) = ε^{|S|α + |B|/2} ∫_{[s/ε, t/ε]^B} Π_{A∈Δ, |A|>1} e^{-c Σ_{i<j∈A}|r_i - r_j|} Π_{{a,b}∈p} |r_a - r_b|^{2H-2} dr.
// Deterministic results carry std_error = 0.
inline Estimate jtilde_estimate(const PairPartitionDiagram& g, double epsilon, double hurst, double decay, double s = 0.0, double t = 1.0,
                                const JTildeOptions& opts = {}) {
    const HurstParameter H(hurst);
    if (!(epsilon > 0.0)) throw std::invalid_argument("jtilde: epsilon must be positive");
    if (!(decay > 0.0)) throw std::invalid_argument("jtilde: decay rate must be positive");
    if (!(t > s)) throw std::invalid_argument("jtilde: need s < t");
    const int n = static_cast<int>(g.size());
    if (opts.mode == JTildeMode::deterministic && n > jtilde_max_nodes_deterministic)
        throw std::invalid_argument("jtilde: deterministic quadrature supports |B| <= 4, got " + std::to_string(n));
    if (opts.mode == JTildeMode::monte_carlo && n > jtilde_max_nodes_monte_carlo)
        throw std::invalid_argument("jtilde: Monte Carlo mode supports |B| <= 6, got " + std::to_string(n));

    const double L = (t - s) / epsilon;
    const double pw = 2.0 * H.value() - 1.0;
    const double prefactor = std::pow(epsilon, static_cast<double>(g.num_singletons()) * H.alpha() + 0.5 * n);
    const auto comps = detail::components_of(g);
    double value = prefactor, rel_var = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (opts.mode == JTildeMode::deterministic) {
            detail::NestedJQuadrature q(comps[i], L, pw, decay, opts);
            value *= q.integrate();
        } else {
            Engine eng(derive_seed(opts.seed, {i}));
            const auto e = detail::monte_carlo_component(comps[i], L, pw, decay, opts.samples, eng);
            value *= e.value;
            if (e.value != 0.0) rel_var += (e.std_error / e.value) * (e.std_error / e.value);
        }
    }
    return {value, std::abs(value) * std::sqrt(rel_var)};
}

inline double jtilde_quadrature(const PairPartitionDiagram& g, double epsilon, double hurst, double decay, double s = 0.0, double t = 1.0,
                                const JTildeOptions& opts = {}) {
    return jtilde_estimate(g, epsilon, hurst, decay, s, t, opts).value;
}

// Remove a singleton σ and its pair partner ϱ; ϱ leaves its Δ block.
struct SingletonReduction {
    PairPartitionDiagram reduced;
    std::vector<int> kept;             // original labels of the reduced ground set, increasing
    double predicted_exponent = 0.0;   // (|S_Δ| - |S_Δ'|)(H - 1/2) + 2 - 2H
};

inline SingletonReduction reduce_singleton(const PairPartitionDiagram& g, int sigma, double hurst) {
    const HurstParameter H(hurst);
    const auto n = static_cast<int>(g.size());
    if (n < 4) throw std::invalid_argument("reduce_singleton: need |B| >= 4");
    if (sigma < 0 || sigma >= n) throw std::out_of_range("reduce_singleton: index out of range");
    const auto& delta = g.delta();
    const int b = delta.block_of(static_cast<std::size_t>(sigma));
    if (std::count(delta.assignment().begin(), delta.assignment().end(), b) != 1)
        throw std::invalid_argument("reduce_singleton: node is not a singleton of delta");
    int rho = -1;
    for (int i = 0; i < n; ++i)
        if (i != sigma && g.pairing().block_of(static_cast<std::size_t>(i)) == g.pairing().block_of(static_cast<std::size_t>(sigma))) rho = i;
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
        if (i != sigma && i != rho) kept.push_back(i);
    auto reduced = g.restricted(kept);
    const double expo = (static_cast<double>(g.num_singletons()) - static_cast<double>(reduced.num_singletons())) * H.alpha() +
                        2.0 - 2.0 * H.value();
    return {std::move(reduced), std::move(kept), expo};
}

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;  // from the fit residuals
};

// Least squares of log value against log ε.
inline ScalingFit scaling_exponent(const std::map<double, double>& values) {
    if (values.size() < 4) throw std::invalid_argument("scaling_exponent: need at least 4 points");
    double emin = values.begin()->first, emax = values.rbegin()->first;
    if (!(emin > 0.0)) throw std::invalid_argument("scaling_exponent: epsilon values must be positive");
    if (emax / emin < 100.0 * (1.0 - 1e-12)) throw std::invalid_argument("scaling_exponent: epsilon values must span two decades");
    std::vector<double> x, y;
    for (const auto& [e, v] : values) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("scaling_exponent: values must be positive and finite");
        x.push_back(std::log(e));
        y.push_back(std::log(v));
    }
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    ScalingFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.r2 = syy > 1e-24 * m ? 1.0 - ssr / syy : 1.0;
    f.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
    return f;
}

}  // namespace fracfluct
