#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace fracfluct {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Vector-valued path sampled on every point of a uniform grid; column k holds the value at t_k.
class HolderPath {
public:
    HolderPath() = default;
    HolderPath(TimeGrid grid, Index dim) : grid_(grid), values_(MatrixXd::Zero(dim, static_cast<Index>(grid.n_points()))) {
        if (dim < 1) throw std::invalid_argument("HolderPath: dimension must be >= 1");
    }
    HolderPath(TimeGrid grid, MatrixXd values) : grid_(grid), values_(std::move(values)) {
        if (values_.cols() != static_cast<Index>(grid_.n_points()))
            throw std::invalid_argument("HolderPath: column count must equal grid points");
        if (values_.rows() < 1) throw std::invalid_argument("HolderPath: dimension must be >= 1");
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    Index dim() const noexcept { return values_.rows(); }
    std::size_t n_points() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    auto at(std::size_t k) { return values_.col(static_cast<Index>(k)); }
    auto at(std::size_t k) const { return values_.col(static_cast<Index>(k)); }
    double& operator()(Index i, std::size_t k) { return values_(i, static_cast<Index>(k)); }
    double operator()(Index i, std::size_t k) const { return values_(i, static_cast<Index>(k)); }

    VectorXd increment(std::size_t s, std::size_t t) const { return at(t) - at(s); }
    VectorXd terminal() const { return at(n_points() - 1); }

    MatrixXd& values() noexcept { return values_; }
    const MatrixXd& values() const noexcept { return values_; }

    HolderPath scaled(double c) const { return {grid_, values_ * c}; }

private:
    TimeGrid grid_;
    MatrixXd values_;
};

inline HolderPath operator+(const HolderPath& a, const HolderPath& b) {
    require_same_grid(a.grid(), b.grid(), "HolderPath +");
    if (a.dim() != b.dim()) throw std::invalid_argument("HolderPath +: dimension mismatch");
    return {a.grid(), a.values() + b.values()};
}

inline HolderPath operator-(const HolderPath& a, const HolderPath& b) {
    require_same_grid(a.grid(), b.grid(), "HolderPath -");
    if (a.dim() != b.dim()) throw std::invalid_argument("HolderPath -: dimension mismatch");
    return {a.grid(), a.values() - b.values()};
}

// Concatenate a family of paths into one path of summed dimension.
inline HolderPath stack(const std::vector<HolderPath>& family) {
    if (family.empty()) throw std::invalid_argument("stack: empty family");
    Index total = 0;
    for (const auto& p : family) {
        require_same_grid(p.grid(), family.front().grid(), "stack");
        total += p.dim();
    }
    HolderPath out(family.front().grid(), total);
    Index row = 0;
    for (const auto& p : family) {
        out.values().middleRows(row, p.dim()) = p.values();
        row += p.dim();
    }
    return out;
}

// Path of linear maps y, dx -> sum_j A^{(j)} y dx_j, A^{(j)} being d x d.
// Stored per grid point as the d x (d*m) block row [A^{(1)} ... A^{(m)}].
class OperatorPath {
public:
    OperatorPath() = default;
    OperatorPath(TimeGrid grid, Index state_dim, Index driver_dim)
        : grid_(grid), d_(state_dim), m_(driver_dim),
          data_(MatrixXd::Zero(state_dim, state_dim * driver_dim * static_cast<Index>(grid.n_points()))) {
        if (state_dim < 1 || driver_dim < 1) throw std::invalid_argument("OperatorPath: dimensions must be >= 1");
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    Index state_dim() const noexcept { return d_; }
    Index driver_dim() const noexcept { return m_; }
    std::size_t n_points() const noexcept { return grid_.n_points(); }

    auto block(std::size_t k) { return data_.middleCols(static_cast<Index>(k) * d_ * m_, d_ * m_); }
    auto block(std::size_t k) const { return data_.middleCols(static_cast<Index>(k) * d_ * m_, d_ * m_); }
    auto component(std::size_t k, Index j) { return data_.middleCols((static_cast<Index>(k) * m_ + j) * d_, d_); }
    auto component(std::size_t k, Index j) const { return data_.middleCols((static_cast<Index>(k) * m_ + j) * d_, d_); }

    template <class Y, class DX>
    VectorXd apply(std::size_t k, const Y& y, const DX& dx) const {
        VectorXd out = VectorXd::Zero(d_);
        for (Index j = 0; j < m_; ++j) out.noalias() += component(k, j) * y * dx(j);
        return out;
    }

    // Entries flattened column-major into a vector path (Frobenius geometry).
    HolderPath flattened() const {
        HolderPath out(grid_, d_ * d_ * m_);
        for (std::size_t k = 0; k < n_points(); ++k)
            out.at(k) = Eigen::Map<const VectorXd>(block(k).eval().data(), d_ * d_ * m_);
        return out;
    }

    double sup_norm() const {
        double s = 0.0;
        for (std::size_t k = 0; k < n_points(); ++k) s = std::max(s, block(k).norm());
        return s;
    }

private:
    TimeGrid grid_;
    Index d_ = 1;
    Index m_ = 1;
    MatrixXd data_;
};

// Two-parameter array A_{s,t}, s <= t on grid indices, each entry a rows x cols matrix.
// Only s < t is stored; A_{t,t} = 0.
class TwoParamArea {
public:
    static constexpr std::size_t max_points = 4097;
    static constexpr std::size_t max_doubles = std::size_t{1} << 28;

    TwoParamArea() = default;
    TwoParamArea(TimeGrid grid, Index rows, Index cols) : grid_(grid), rows_(rows), cols_(cols) {
        const std::size_t n = grid.n_points();
        if (n > max_points) throw std::invalid_argument("TwoParamArea: at most 4096 steps can be materialized");
        const std::size_t pairs = n * (n - 1) / 2;
        const std::size_t doubles = pairs * static_cast<std::size_t>(rows * cols);
        if (doubles > max_doubles) throw std::invalid_argument("TwoParamArea: requested area too large");
        data_.assign(doubles, 0.0);
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    std::size_t n_points() const noexcept { return grid_.n_points(); }

    Eigen::Map<MatrixXd> at(std::size_t s, std::size_t t) {
        return Eigen::Map<MatrixXd>(data_.data() + offset(s, t), rows_, cols_);
    }
    Eigen::Map<const MatrixXd> at(std::size_t s, std::size_t t) const {
        return Eigen::Map<const MatrixXd>(data_.data() + offset(s, t), rows_, cols_);
    }
    // Value including the diagonal convention A_{t,t} = 0.
    MatrixXd value(std::size_t s, std::size_t t) const {
        if (s == t) return MatrixXd::Zero(rows_, cols_);
        return at(s, t);
    }

    std::vector<double>& raw() noexcept { return data_; }
    const std::vector<double>& raw() const noexcept { return data_; }

private:
    std::size_t offset(std::size_t s, std::size_t t) const {
        const std::size_t n = n_points();
        if (!(s < t && t < n)) throw std::out_of_range("TwoParamArea: need s < t inside the grid");
        const std::size_t idx = s * (2 * n - s - 1) / 2 + (t - s - 1);
        return idx * static_cast<std::size_t>(rows_ * cols_);
    }

    TimeGrid grid_;
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<double> data_;
};

}  // namespace fracfluct
