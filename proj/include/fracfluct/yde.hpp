#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "path.hpp"

namespace fracfluct {

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& where, std::size_t step)
        : std::runtime_error(where + ": blow-up at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

template <class V>
inline void guard_state(const V& v, double threshold, const char* where, std::size_t step) {
    const double n = v.norm();
    if (!std::isfinite(n) || n > threshold) throw BlowUpError(where, step);
}

enum class YdeMode { euler, picard };

struct YdeOptions {
    YdeMode mode = YdeMode::euler;
    double tolerance = 1e-13;      // Picard: relative sup-change stopping rule
    std::size_t max_iterations = 0;  // Picard: 0 means n_steps + 1
    double blowup_threshold = std::numeric_limits<double>::infinity();
};

// Y_t = Y_0 + int_0^t A_s Y_s dX_s + f_t - f_0 on the grid (Young-Euler).
inline HolderPath solve_controlled_yde(const OperatorPath& A, const HolderPath& X, const HolderPath& f,
                                       const VectorXd& Y0, YdeOptions opts = {}) {
    require_same_grid(A.grid(), X.grid(), "solve_controlled_yde");
    require_same_grid(A.grid(), f.grid(), "solve_controlled_yde");
    const Index d = A.state_dim();
    if (X.dim() != A.driver_dim() || f.dim() != d || Y0.size() != d)
        throw std::invalid_argument("solve_controlled_yde: dimension mismatch");
    const std::size_t n = X.n_points();
    HolderPath Y(X.grid(), d);
    Y.at(0) = Y0;
    if (opts.mode == YdeMode::euler) {
        for (std::size_t k = 0; k + 1 < n; ++k) {
            Y.at(k + 1) = Y.at(k) + A.apply(k, Y.at(k), X.at(k + 1) - X.at(k)) + (f.at(k + 1) - f.at(k));
            guard_state(Y.at(k + 1), opts.blowup_threshold, "solve_controlled_yde", k + 1);
        }
        return Y;
    }
    // Picard iteration of the discrete integral map, started from the forcing.
    for (std::size_t k = 0; k < n; ++k) Y.at(k) = Y0 + f.at(k) - f.at(0);
    const std::size_t max_it = opts.max_iterations ? opts.max_iterations : n + 1;
    HolderPath next(X.grid(), d);
    for (std::size_t it = 0; it < max_it; ++it) {
        next.at(0) = Y0;
        VectorXd acc = VectorXd::Zero(d);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            acc += A.apply(k, Y.at(k), X.at(k + 1) - X.at(k));
            next.at(k + 1) = Y0 + acc + f.at(k + 1) - f.at(0);
            guard_state(next.at(k + 1), opts.blowup_threshold, "solve_controlled_yde(picard)", k + 1);
        }
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            change = std::max(change, (next.at(k) - Y.at(k)).norm());
            scale = std::max(scale, next.at(k).norm());
        }
        std::swap(Y, next);
        if (change <= opts.tolerance * std::max(scale, 1.0)) return Y;
    }
    throw std::runtime_error("solve_controlled_yde: Picard iteration did not reach tolerance");
}

}  // namespace fracfluct
