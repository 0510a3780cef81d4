#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partition.hpp"
#include "rng.hpp"

namespace fracfluct {

// Values indexed by nonempty subsets of {0, ..., n-1}, encoded as bit masks.
class SubsetTable {
public:
    static constexpr std::size_t max_size = 8;

    explicit SubsetTable(std::size_t n) : n_(n) {
        if (n < 1 || n > max_size) throw std::invalid_argument("SubsetTable: ground set size must be in [1, 8]");
        values_.assign(std::size_t{1} << n, std::nullopt);
    }

    std::size_t size() const noexcept { return n_; }
    std::uint32_t full_mask() const noexcept { return (std::uint32_t{1} << n_) - 1; }

    void set(std::uint32_t mask, double v) { values_.at(check(mask)) = v; }
    bool has(std::uint32_t mask) const { return values_.at(check(mask)).has_value(); }
    double operator[](std::uint32_t mask) const {
        const auto& v = values_.at(check(mask));
        if (!v) throw std::invalid_argument("SubsetTable: missing subset 0x" + hex(mask));
        return *v;
    }
    double at(const std::vector<int>& subset) const { return (*this)[mask_of(subset)]; }
    void set(const std::vector<int>& subset, double v) { set(mask_of(subset), v); }

    static std::uint32_t mask_of(const std::vector<int>& subset) {
        std::uint32_t m = 0;
        for (int i : subset) m |= std::uint32_t{1} << i;
        return m;
    }

private:
    std::uint32_t check(std::uint32_t mask) const {
        if (mask == 0 || mask > full_mask()) throw std::out_of_range("SubsetTable: subset mask out of range");
        return mask;
    }
    static std::string hex(std::uint32_t m) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%x", m);
        return buf;
    }
    std::size_t n_;
    std::vector<std::optional<double>> values_;
};

namespace detail {

inline std::vector<int> members(std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; mask; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i);
    return out;
}

// Block masks of every partition of the subset `mask`.
inline std::vector<std::vector<std::uint32_t>> partitions_of(std::uint32_t mask) {
    const auto elems = members(mask);
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& p : enumerate_partitions(static_cast<int>(elems.size()))) {
        std::vector<std::uint32_t> blocks(p.num_blocks(), 0);
        for (std::size_t i = 0; i < elems.size(); ++i) blocks[static_cast<std::size_t>(p.block_of(i))] |= std::uint32_t{1} << elems[i];
        out.push_back(std::move(blocks));
    }
    return out;
}

}  // namespace detail

inline SubsetTable moments_to_cumulants(const SubsetTable& moments) {
    SubsetTable out(moments.size());
    std::vector<double> fact(SubsetTable::max_size + 1, 1.0);
    for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    for (std::uint32_t mask = 1; mask <= moments.full_mask(); ++mask) {
        double acc = 0.0;
        for (const auto& blocks : detail::partitions_of(mask)) {
            const std::size_t k = blocks.size();
            double term = fact[k - 1] * ((k - 1) % 2 ? -1.0 : 1.0);
            for (auto b : blocks) term *= moments[b];
            acc += term;
        }
        out.set(mask, acc);
    }
    return out;
}

inline SubsetTable cumulants_to_moments(const SubsetTable& cumulants) {
    SubsetTable out(cumulants.size());
    for (std::uint32_t mask = 1; mask <= cumulants.full_mask(); ++mask) {
        double acc = 0.0;
        for (const auto& blocks : detail::partitions_of(mask)) {
            double term = 1.0;
            for (auto b : blocks) term *= cumulants[b];
            acc += term;
        }
        out.set(mask, acc);
    }
    return out;
}

// Diagram weights J(Δ, p) over subsets, extended multiplicatively over the blocks of Δ ∨ p.
using DiagramWeight = std::function<double(const PairPartitionDiagram&)>;

// E[W_A] = Σ_{Δ, p pairing of A} Π_{blocks of Δ∨p} J(restriction): moment table of the synthetic family.
inline SubsetTable diagram_moments(std::size_t n, const DiagramWeight& connected_weight) {
    SubsetTable out(n);
    for (std::uint32_t mask = 1; mask <= out.full_mask(); ++mask) {
        const auto elems = detail::members(mask);
        const int k = static_cast<int>(elems.size());
        if (k % 2) {
            out.set(mask, 0.0);
            continue;
        }
        double acc = 0.0;
        for (const auto& d : enumerate_partitions(k))
            for (const auto& p : enumerate_pairings(k)) {
                PairPartitionDiagram g(d, p);
                double term = 1.0;
                for (const auto& blk : g.joined().blocks()) term *= connected_weight(g.restricted(blk));
                acc += term;
            }
        out.set(mask, acc);
    }
    return out;
}

// Σ over connected diagrams of the subset of size k.
inline double connected_diagram_sum(int k, const DiagramWeight& connected_weight) {
    if (k % 2) return 0.0;
    double acc = 0.0;
    for (const auto& d : enumerate_partitions(k))
        for (const auto& p : enumerate_pairings(k)) {
            PairPartitionDiagram g(d, p);
            if (g.connected()) acc += connected_weight(g);
        }
    return acc;
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

// Joint cumulant of the columns `cols` (repeats allowed) from rows selected by `rows`.
inline double joint_cumulant_rows(const Eigen::MatrixXd& x, const std::vector<int>& cols, const std::vector<std::size_t>* rows) {
    const std::size_t k = cols.size();
    const std::size_t n = rows ? rows->size() : static_cast<std::size_t>(x.rows());
    Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = static_cast<Eigen::Index>(rows ? (*rows)[r] : r);
        for (std::size_t j = 0; j < k; ++j) v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = x(row, cols[j]);
    }
    // centering leaves cumulants of order >= 2 unchanged and keeps the products well scaled
    if (k >= 2) v.rowwise() -= v.colwise().mean();
    SubsetTable m(k);
    const std::uint32_t full = m.full_mask();
    Eigen::VectorXd prod(static_cast<Eigen::Index>(n));
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        prod.setOnes();
        for (int j : members(mask)) prod.array() *= v.col(j).array();
        m.set(mask, prod.mean());
    }
    return moments_to_cumulants(m)[full];
}

}  // namespace detail

// Plug-in joint cumulant of columns `subset` of `samples` (rows are draws), bootstrap standard error.
inline Estimate empirical_joint_cumulant(const Eigen::MatrixXd& samples, const std::vector<int>& subset, std::uint64_t seed,
                                         int resamples = 200) {
    if (samples.rows() < 1000) throw std::invalid_argument("empirical_joint_cumulant: need at least 1000 samples");
    if (subset.empty() || subset.size() > 4) throw std::invalid_argument("empirical_joint_cumulant: subset size must be in [1, 4]");
    for (int c : subset)
        if (c < 0 || c >= samples.cols()) throw std::out_of_range("empirical_joint_cumulant: column index out of range");
    if (resamples < 2) throw std::invalid_argument("empirical_joint_cumulant: need at least 2 bootstrap resamples");
    Estimate out;
    out.value = detail::joint_cumulant_rows(samples, subset, nullptr);
    Engine eng(derive_seed(seed, {stream::bootstrap}));
    const std::size_t n = static_cast<std::size_t>(samples.rows());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> rows(n);
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < resamples; ++b) {
        for (auto& r : rows) r = pick(eng);
        const double v = detail::joint_cumulant_rows(samples, subset, &rows);
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1 / resamples;
    out.std_error = std::sqrt(std::max(0.0, (s2 - resamples * mean * mean) / (resamples - 1)));
    return out;
}

inline Estimate empirical_joint_cumulant(const Eigen::VectorXd& samples, int order, std::uint64_t seed, int resamples = 200) {
    return empirical_joint_cumulant(Eigen::MatrixXd(samples), std::vector<int>(static_cast<std::size_t>(order), 0), seed, resamples);
}

}  // namespace fracfluct
