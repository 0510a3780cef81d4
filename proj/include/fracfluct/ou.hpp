#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "grid.hpp"
#include "path.hpp"
#include "poly.hpp"
#include "rng.hpp"

namespace fracfluct {

// dy = -A y dt + dW with A symmetric positive definite.
class OuSpec {
public:
    explicit OuSpec(double rate = 1.0) : OuSpec(Eigen::MatrixXd::Constant(1, 1, rate)) {}
    explicit OuSpec(Eigen::MatrixXd drift) : A_(std::move(drift)) {
        if (A_.rows() != A_.cols() || A_.rows() < 1) throw std::invalid_argument("OuSpec: drift must be square");
        if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A_.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("OuSpec: drift must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
        rates_ = es.eigenvalues();
        basis_ = es.eigenvectors();
        if (!(rates_.minCoeff() > 0.0)) throw std::invalid_argument("OuSpec: drift must be positive definite");
    }

    int dimension() const noexcept { return static_cast<int>(A_.rows()); }
    const Eigen::MatrixXd& drift() const noexcept { return A_; }
    double gap_rate() const noexcept { return rates_.minCoeff(); }
    // eigen-decomposition A = Q diag(rates) Q^T
    const Eigen::VectorXd& rates() const noexcept { return rates_; }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }

    Eigen::MatrixXd stationary_covariance() const { return spectral([](double a) { return 0.5 / a; }); }
    Eigen::MatrixXd decay(double t) const { return spectral([t](double a) { return std::exp(-a * t); }); }
    // (I - e^{-2 A t}) A^{-1} / 2
    Eigen::MatrixXd transition_covariance(double t) const {
        return spectral([t](double a) { return -std::expm1(-2.0 * a * t) / (2.0 * a); });
    }

    template <class F>
    Eigen::MatrixXd spectral(F&& fn) const {
        Eigen::VectorXd d = rates_.unaryExpr(fn);
        return basis_ * d.asDiagonal() * basis_.transpose();
    }

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd rates_;
    Eigen::MatrixXd basis_;
};

struct FastPath {
    HolderPath values;  // column k is y_{t_k / epsilon}
    double epsilon;

    const TimeGrid& grid() const noexcept { return values.grid(); }
    auto at(std::size_t k) const { return values.at(k); }
};

inline FastPath sample_ou(const OuSpec& spec, const TimeGrid& grid, double epsilon, std::uint64_t seed) {
    if (!(epsilon > 0.0)) throw std::domain_error("sample_ou: epsilon must be positive");
    const double tau = grid.step() / epsilon;
    const int q = spec.dimension();
    NormalSource normal(seed);
    HolderPath y(grid, q);
    if (q == 1) {
        const double a = spec.rates()(0);
        const double decay = std::exp(-a * tau);
        const double sd = std::sqrt(-std::expm1(-2.0 * a * tau) / (2.0 * a));
        double v = std::sqrt(0.5 / a) * normal();
        y(0, 0) = v;
        for (std::size_t k = 1; k < grid.n_points(); ++k) {
            v = decay * v + sd * normal();
            y(0, k) = v;
        }
        return {std::move(y), epsilon};
    }
    const Eigen::MatrixXd& Q = spec.basis();
    const Eigen::VectorXd& rates = spec.rates();
    const Eigen::MatrixXd M = spec.decay(tau);
    const Eigen::MatrixXd L0 = Q * rates.unaryExpr([](double a) { return std::sqrt(0.5 / a); }).asDiagonal();
    const Eigen::MatrixXd L = Q * rates.unaryExpr([tau](double a) {
        return std::sqrt(-std::expm1(-2.0 * a * tau) / (2.0 * a));
    }).asDiagonal();
    Eigen::VectorXd z(q);
    for (int i = 0; i < q; ++i) z(i) = normal();
    y.at(0) = L0 * z;
    for (std::size_t k = 1; k < grid.n_points(); ++k) {
        for (int i = 0; i < q; ++i) z(i) = normal();
        y.at(k) = M * y.at(k - 1) + L * z;
    }
    return {std::move(y), epsilon};
}

inline PolyFunction semigroup_apply(const OuSpec& spec, const PolyFunction& f, double t) {
    if (t < 0.0) throw std::domain_error("semigroup_apply: t must be nonnegative");
    if (f.dim() != spec.dimension()) throw std::invalid_argument("semigroup_apply: dimension mismatch");
    if (t == 0.0) return f;
    return gaussian_smoothing(f, spec.decay(t), spec.transition_covariance(t));
}

inline double invariant_mean(const OuSpec& spec, const PolyFunction& f) {
    if (f.dim() != spec.dimension()) throw std::invalid_argument("invariant_mean: dimension mismatch");
    const Eigen::MatrixXd S = spec.stationary_covariance();
    double s = 0.0;
    for (const auto& [e, c] : f.terms()) s += c * gaussian_moment(e, S);
    return s;
}

inline PolyFunction centered(const OuSpec& spec, const PolyFunction& f) {
    return f - PolyFunction::constant(f.dim(), invariant_mean(spec, f));
}

}  // namespace fracfluct
