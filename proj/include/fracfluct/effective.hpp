#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <stdexcept>
#include <vector>

#include "fbm.hpp"
#include "model.hpp"
#include "multiscale.hpp"
#include "ou.hpp"
#include "poly.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "yde.hpp"

namespace fracfluct {

enum class FracPotentialMode { closed_form, quadrature };

// int f g dmu for polynomials f, g (no degree cap on the product).
inline double invariant_pairing(const OuSpec& spec, const PolyFunction& f, const PolyFunction& g) {
    const Eigen::MatrixXd S = spec.stationary_covariance();
    double s = 0.0;
    for (const auto& [ea, ca] : f.terms())
        for (const auto& [eb, cb] : g.terms()) {
            PolyFunction::Exponents e(ea);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            s += ca * cb * gaussian_moment(e, S);
        }
    return s;
}

namespace detail {

using Multi = PolyFunction::Exponents;

// u^k in the probabilists' Hermite basis and back, k <= 4.
inline const std::vector<std::vector<double>>& monomial_to_hermite() {
    static const std::vector<std::vector<double>> t = {
        {1}, {0, 1}, {1, 0, 1}, {0, 3, 0, 1}, {3, 0, 6, 0, 1}};
    return t;
}
inline const std::vector<std::vector<double>>& hermite_to_monomial() {
    static const std::vector<std::vector<double>> t = {
        {1}, {0, 1}, {-1, 0, 1}, {0, -3, 0, 1}, {3, 0, -6, 0, 1}};
    return t;
}

// Re-expand every term prod u_i^{k_i} through table[k_i] (a change of one-variable basis).
inline std::map<Multi, double> change_basis(const std::map<Multi, double>& in,
                                            const std::vector<std::vector<double>>& table) {
    std::map<Multi, double> out;
    for (const auto& [e, c] : in) {
        std::vector<std::pair<Multi, double>> partial{{Multi{}, c}};
        for (int k : e) {
            std::vector<std::pair<Multi, double>> next;
            const auto& row = table.at(static_cast<std::size_t>(k));
            for (const auto& [prefix, w] : partial)
                for (std::size_t j = 0; j < row.size(); ++j) {
                    if (row[j] == 0.0) continue;
                    Multi p(prefix);
                    p.push_back(static_cast<int>(j));
                    next.emplace_back(std::move(p), w * row[j]);
                }
            partial = std::move(next);
        }
        for (auto& [m, w] : partial) out[m] += w;
    }
    return out;
}

inline void require_centered(const OuSpec& spec, const PolyFunction& g) {
    const double mean = invariant_mean(spec, g);
    if (std::abs(mean) > 1e-12 * std::max(1.0, g.max_abs_coefficient()))
        throw std::invalid_argument("frac_potential: input must be centered under the invariant measure");
}

}  // namespace detail

// L^{1-2H} g = (1/Gamma(2H-1)) int_0^inf t^{2H-2} P_t g dt for centered g.
inline PolyFunction frac_potential(const OuSpec& spec, const PolyFunction& g, HurstParameter H,
                                   FracPotentialMode mode = FracPotentialMode::closed_form) {
    if (g.dim() != spec.dimension()) throw std::invalid_argument("frac_potential: dimension mismatch");
    detail::require_centered(spec, g);
    const double p = 2.0 * H.value() - 1.0;
    const int q = spec.dimension();
    if (mode == FracPotentialMode::closed_form) {
        // y = Q diag(s) u with s_i the stationary standard deviation along eigenvector i;
        // He_n(u) is then a P_t-eigenfunction with rate n . rates.
        const Eigen::VectorXd s = spec.rates().unaryExpr([](double a) { return std::sqrt(0.5 / a); });
        const Eigen::MatrixXd to_u = spec.basis() * s.asDiagonal();
        const Eigen::MatrixXd from_u = s.cwiseInverse().asDiagonal() * spec.basis().transpose();
        const PolyFunction gu = g.linear_substitution(to_u);
        auto herm = detail::change_basis(gu.terms(), detail::monomial_to_hermite());
        std::map<detail::Multi, double> scaled;
        for (const auto& [e, c] : herm) {
            double rate = 0.0;
            for (int i = 0; i < q; ++i) rate += e[static_cast<std::size_t>(i)] * spec.rates()(i);
            if (rate == 0.0) continue;  // mean component, zero for centered input
            scaled[e] = c * std::pow(rate, -p);
        }
        const auto mono = detail::change_basis(scaled, detail::hermite_to_monomial());
        PolyFunction out_u(q);
        for (const auto& [e, c] : mono) out_u.add_term(e, c);
        PolyFunction out = out_u.linear_substitution(from_u);
        // drop rounding debris
        PolyFunction clean(q);
        const double tiny = 1e-15 * std::max(1.0, out.max_abs_coefficient());
        for (const auto& [e, c] : out.terms())
            if (std::abs(c) > tiny) clean.add_term(e, c);
        return clean;
    }
    // Quadrature: t = u^{1/p} turns t^{2H-2} dt into du / p; integrate P_t g coefficientwise on
    // [0, u_max] with e^{-c t_max} < 1e-14, geometric panels towards u = 0.
    const double c = spec.gap_rate();
    const double t_max = 14.0 * std::log(10.0) / c;
    const double u_max = std::pow(t_max, p);
    const QuadratureRule& rule = gauss_legendre_cached(20);
    std::vector<std::pair<double, double>> panels;
    double lo = u_max / 64.0;
    for (int j = 0; j < 40; ++j) {
        panels.emplace_back(lo / 2.0, lo);
        lo /= 2.0;
    }
    panels.emplace_back(0.0, lo);
    for (int j = 1; j < 64; ++j) panels.emplace_back(u_max * j / 64.0, u_max * (j + 1) / 64.0);
    std::map<detail::Multi, double> acc;
    for (const auto& [a, b] : panels)
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = a + (b - a) * rule.nodes[i];
            const double w = (b - a) * rule.weights[i] / p;
            const PolyFunction pt = semigroup_apply(spec, g, std::pow(u, 1.0 / p));
            for (const auto& [e, coef] : pt.terms()) acc[e] += w * coef;
        }
    PolyFunction out(q);
    const double norm = 1.0 / std::tgamma(p);
    double big = 0.0;
    for (const auto& [e, v] : acc) big = std::max(big, std::abs(v));
    for (const auto& [e, v] : acc)
        if (std::abs(v) > 1e-15 * big) out.add_term(e, v * norm);
    return out;
}

// Covariance kernel Sigma(x, z). Separable form: Sigma(x, z) = sum_{k,l} K_kl s_k(x) s_l(z) M_k M_l^T.
class CovKernel {
public:
    enum class Kind { separable, numeric_grid };

    static CovKernel separable(std::vector<Channel> channels, Eigen::MatrixXd coefficients) {
        if (coefficients.rows() != static_cast<Index>(channels.size()) || coefficients.cols() != coefficients.rows())
            throw std::invalid_argument("CovKernel: coefficient matrix must be K x K");
        CovKernel k;
        k.kind_ = Kind::separable;
        k.channels_ = std::move(channels);
        k.coef_ = std::move(coefficients);
        k.d_ = static_cast<int>(k.channels_.front().direction.rows());
        return k;
    }
    // pair_blocks(i*d + a, j*d + b) = Sigma(x_i, x_j)_{ab}
    static CovKernel numeric(SpatialGrid points, Eigen::MatrixXd pair_blocks) {
        const Index n = static_cast<Index>(points.size()) * points.dim();
        if (pair_blocks.rows() != n || pair_blocks.cols() != n)
            throw std::invalid_argument("CovKernel: numeric kernel needs a (P d) x (P d) matrix");
        CovKernel k;
        k.kind_ = Kind::numeric_grid;
        k.d_ = points.dim();
        k.points_ = std::move(points);
        k.grid_ = std::move(pair_blocks);
        return k;
    }

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return d_; }
    const Eigen::MatrixXd& coefficients() const noexcept { return coef_; }
    const std::vector<Channel>& channels() const noexcept { return channels_; }
    const std::optional<SpatialGrid>& points() const noexcept { return points_; }
    const Eigen::MatrixXd& grid_matrix() const noexcept { return grid_; }

    bool is_zero() const {
        return kind_ == Kind::separable ? coef_.cwiseAbs().maxCoeff() == 0.0 : grid_.cwiseAbs().maxCoeff() == 0.0;
    }

    Eigen::MatrixXd evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& z) const {
        if (kind_ == Kind::numeric_grid) {
            const std::size_t i = index_of(x), j = index_of(z);
            return grid_.block(static_cast<Index>(i) * d_, static_cast<Index>(j) * d_, d_, d_);
        }
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
        for (std::size_t k = 0; k < channels_.size(); ++k)
            for (std::size_t l = 0; l < channels_.size(); ++l) {
                const double c = coef_(static_cast<Index>(k), static_cast<Index>(l));
                if (c == 0.0) continue;
                out += c * channels_[k].profile.value(x) * channels_[l].profile.value(z) *
                       (channels_[k].direction * channels_[l].direction.transpose());
            }
        return out;
    }

    // Gram matrix of Sigma(x_i, x_j) + Sigma(x_j, x_i)^T.
    Eigen::MatrixXd symmetrized_gram(const SpatialGrid& pts) const {
        const Index P = static_cast<Index>(pts.size());
        Eigen::MatrixXd G(P * d_, P * d_);
        for (Index i = 0; i < P; ++i)
            for (Index j = 0; j < P; ++j)
                G.block(i * d_, j * d_, d_, d_) = evaluate(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]) +
                    evaluate(pts[static_cast<std::size_t>(j)], pts[static_cast<std::size_t>(i)]).transpose();
        return G;
    }

    // Smallest eigenvalue relative to the largest magnitude; >= -1e-10 means PSD.
    double min_relative_eigenvalue(const SpatialGrid& pts) const {
        const Eigen::MatrixXd G = symmetrized_gram(pts);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        return es.eigenvalues().minCoeff() / scale;
    }
    bool psd_on(const SpatialGrid& pts, double tol = 1e-10) const { return min_relative_eigenvalue(pts) >= -tol; }

    CovKernel to_grid(const SpatialGrid& pts) const {
        const Index P = static_cast<Index>(pts.size());
        Eigen::MatrixXd G(P * d_, P * d_);
        for (Index i = 0; i < P; ++i)
            for (Index j = 0; j < P; ++j)
                G.block(i * d_, j * d_, d_, d_) = evaluate(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
        return numeric(pts, G);
    }

private:
    std::size_t index_of(const Eigen::VectorXd& x) const {
        for (std::size_t i = 0; i < points_->size(); ++i)
            if ((*points_)[i] == x) return i;
        throw std::invalid_argument("CovKernel: point not on the kernel grid");
    }

    Kind kind_ = Kind::separable;
    int d_ = 1;
    std::vector<Channel> channels_;
    Eigen::MatrixXd coef_;
    std::optional<SpatialGrid> points_;
    Eigen::MatrixXd grid_;
};

// c_kl = int g~_k L^{1-2H} g~_l dmu for the centered channels.
inline Eigen::MatrixXd frac_potential_coefficients(const ModelSpec& model, HurstParameter H,
                                                   FracPotentialMode mode = FracPotentialMode::closed_form) {
    const std::size_t K = model.n_channels();
    std::vector<PolyFunction> centered, potential;
    for (std::size_t k = 0; k < K; ++k) {
        centered.push_back(model.centered_channel(k));
        potential.push_back(centered.back().is_zero() ? centered.back()
                                                      : frac_potential(model.fast(), centered.back(), H, mode));
    }
    Eigen::MatrixXd c(static_cast<Index>(K), static_cast<Index>(K));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l)
            c(static_cast<Index>(k), static_cast<Index>(l)) = invariant_pairing(model.fast(), centered[k], potential[l]);
    return c;
}

// Sigma(x, z) = Gamma(2H+1)/2 sum_{k,l} c_kl sigma_k(x) sigma_l(z)^T.
inline CovKernel sigma_kernel(const ModelSpec& model, HurstParameter H,
                              FracPotentialMode mode = FracPotentialMode::closed_form) {
    const Eigen::MatrixXd c = frac_potential_coefficients(model, H, mode);
    return CovKernel::separable(model.channels(), 0.5 * std::tgamma(2.0 * H.value() + 1.0) * c);
}

namespace detail {

// Symmetric factor L with L L^T = S for PSD S (eigen-decomposition; rounding negatives set to zero).
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& S, const char* where) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::invalid_argument(std::string(where) + ": symmetrized kernel is not positive semidefinite");
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Joint increment sampler over channels: beta^k in R^m with Cov(beta^k_j, beta^l_i) = delta_ij (K + K^T)_kl h.
struct SeparableIncrements {
    Eigen::MatrixXd factor;  // K x K
    Index m;
    explicit SeparableIncrements(const CovKernel& kernel, Index driver_dim)
        : factor(psd_factor(kernel.coefficients() + kernel.coefficients().transpose(), "sample_limit_noise")),
          m(driver_dim) {}
    // K x m matrix of increments over a step of length h
    Eigen::MatrixXd draw(NormalSource& normal, double h) const {
        Eigen::MatrixXd z(factor.cols(), m);
        for (Index j = 0; j < m; ++j)
            for (Index k = 0; k < z.rows(); ++k) z(k, j) = normal();
        return std::sqrt(h) * factor * z;
    }
};

}  // namespace detail

// Increments of the limit field V integrated along x_bar: v_{k+1} = v_k + (V_{t_{k+1}} - V_{t_k})(x_bar_k).
inline HolderPath sample_limit_noise(const CovKernel& kernel, const HolderPath& x_bar, const TimeGrid& grid,
                                     std::uint64_t seed) {
    require_same_grid(x_bar.grid(), grid, "sample_limit_noise");
    const int d = kernel.dim();
    if (x_bar.dim() != d) throw std::invalid_argument("sample_limit_noise: state dimension mismatch");
    HolderPath v(grid, d);
    if (kernel.is_zero()) return v;
    NormalSource normal(seed);
    const double h = grid.step();
    if (kernel.kind() == CovKernel::Kind::separable) {
        const auto& ch = kernel.channels();
        const Index m = ch.front().direction.cols();
        const detail::SeparableIncrements inc(kernel, m);
        VectorXd acc = VectorXd::Zero(d);
        for (std::size_t k = 0; k + 1 < grid.n_points(); ++k) {
            const Eigen::MatrixXd db = inc.draw(normal, h);
            const auto x = x_bar.at(k);
            for (std::size_t c = 0; c < ch.size(); ++c)
                acc.noalias() += ch[c].profile.value(x) * (ch[c].direction * db.row(static_cast<Index>(c)).transpose());
            v.at(k + 1) = acc;
        }
        return v;
    }
    // numeric grid: d = 1, grid values interpolated linearly in x
    if (d != 1) throw std::invalid_argument("sample_limit_noise: numeric-grid kernels support d = 1 only");
    const SpatialGrid& pts = *kernel.points();
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a](0) < pts[b](0); });
    std::vector<double> xs;
    for (auto i : order) xs.push_back(pts[i](0));
    const Eigen::MatrixXd L = detail::psd_factor(kernel.symmetrized_gram(pts), "sample_limit_noise");
    Eigen::VectorXd z(L.cols());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < grid.n_points(); ++k) {
        for (Index i = 0; i < z.size(); ++i) z(i) = normal();
        const Eigen::VectorXd xi = std::sqrt(h) * (L * z);
        const double x = x_bar(0, k);
        if (x < xs.front() || x > xs.back()) throw std::out_of_range("sample_limit_noise: x_bar leaves the spatial grid");
        std::size_t j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        double val;
        if (j >= xs.size()) {
            val = xi(static_cast<Index>(order.back()));
        } else if (j == 0) {
            val = xi(static_cast<Index>(order.front()));
        } else {
            const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
            val = (1.0 - w) * xi(static_cast<Index>(order[j - 1])) + w * xi(static_cast<Index>(order[j]));
        }
        acc += val;
        v(0, k + 1) = acc;
    }
    return v;
}

// V_t(x_i) at fixed points, one path per point, from a single draw of the field.
inline std::vector<HolderPath> sample_limit_field(const CovKernel& kernel, const SpatialGrid& points,
                                                  const TimeGrid& grid, std::uint64_t seed) {
    const int d = kernel.dim();
    const std::size_t P = points.size();
    std::vector<HolderPath> out(P, HolderPath(grid, d));
    if (kernel.is_zero()) return out;
    NormalSource normal(seed);
    const double h = grid.step();
    if (kernel.kind() == CovKernel::Kind::separable) {
        const auto& ch = kernel.channels();
        const detail::SeparableIncrements inc(kernel, ch.front().direction.cols());
        for (std::size_t k = 0; k + 1 < grid.n_points(); ++k) {
            const Eigen::MatrixXd db = inc.draw(normal, h);
            for (std::size_t i = 0; i < P; ++i) {
                VectorXd dv = VectorXd::Zero(d);
                for (std::size_t c = 0; c < ch.size(); ++c)
                    dv += ch[c].profile.value(points[i]) * (ch[c].direction * db.row(static_cast<Index>(c)).transpose());
                out[i].at(k + 1) = out[i].at(k) + dv;
            }
        }
        return out;
    }
    const Eigen::MatrixXd L = detail::psd_factor(kernel.symmetrized_gram(points), "sample_limit_field");
    Eigen::VectorXd z(L.cols());
    for (std::size_t k = 0; k + 1 < grid.n_points(); ++k) {
        for (Index i = 0; i < z.size(); ++i) z(i) = normal();
        const Eigen::VectorXd xi = std::sqrt(h) * (L * z);
        for (std::size_t i = 0; i < P; ++i)
            out[i].at(k + 1) = out[i].at(k) + xi.segment(static_cast<Index>(i) * d, d);
    }
    return out;
}

// z_t = v_t + int_0^t Dfbar(x_bar_s) z_s dX_s.
inline HolderPath solve_limit_fluctuation(const ModelSpec& model, const HolderPath& x_bar, const HolderPath& v,
                                          const HolderPath& driver, YdeOptions opts = {}) {
    require_same_grid(x_bar.grid(), v.grid(), "solve_limit_fluctuation");
    require_same_grid(x_bar.grid(), driver.grid(), "solve_limit_fluctuation");
    const OperatorPath A = dfbar_along(model, x_bar);
    return solve_controlled_yde(A, driver, v, v.at(0), opts);
}

inline HolderPath solve_limit_fluctuation(const ModelSpec& model, const HolderPath& x_bar, const HolderPath& v,
                                          const FbmPath& fbm, YdeOptions opts = {}) {
    return solve_limit_fluctuation(model, x_bar, v, fbm.path, opts);
}

}  // namespace fracfluct
