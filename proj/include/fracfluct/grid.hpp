#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracfluct {

class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double t_start, double t_end, std::size_t n_steps)
        : t0_(t_start), t1_(t_end), n_(n_steps) {
        if (!(t_end > t_start)) throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
        if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
        if (!std::isfinite(t_start) || !std::isfinite(t_end))
            throw std::invalid_argument("TimeGrid: non-finite endpoint");
    }

    double t_start() const noexcept { return t0_; }
    double t_end() const noexcept { return t1_; }
    std::size_t n_steps() const noexcept { return n_; }
    std::size_t n_points() const noexcept { return n_ + 1; }
    double step() const noexcept { return (t1_ - t0_) / static_cast<double>(n_); }
    double horizon() const noexcept { return t1_ - t0_; }
    double time(std::size_t k) const noexcept {
        return k == n_ ? t1_ : t0_ + step() * static_cast<double>(k);
    }

    TimeGrid refined(std::size_t factor) const { return {t0_, t1_, n_ * factor}; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.t0_ == b.t0_ && a.t1_ == b.t1_ && a.n_ == b.n_;
    }

private:
    double t0_ = 0.0;
    double t1_ = 1.0;
    std::size_t n_ = 1;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

class HurstParameter {
public:
    explicit HurstParameter(double h) : h_(h) {
        if (!(h > 0.5 && h < 1.0))
            throw std::domain_error("HurstParameter must lie in (1/2, 1), got " + std::to_string(h));
    }
    double value() const noexcept { return h_; }
    // H - 1/2
    double alpha() const noexcept { return h_ - 0.5; }

private:
    double h_;
};

}  // namespace fracfluct
