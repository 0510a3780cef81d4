#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "cumulants.hpp"
#include "jtilde.hpp"
#include "rng.hpp"

namespace fracfluct {

// Exact W1 between the empirical measures of a and b (quantile functions walked jointly).
// For equal sizes this is the mean absolute difference of the sorted samples.
inline double w1_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("w1_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
        return s / static_cast<double>(a.size());
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double level = 0.0, out = 0.0;
    while (i < a.size() && j < b.size()) {
        const double next_a = static_cast<double>(i + 1) / na, next_b = static_cast<double>(j + 1) / nb;
        const double next = std::min(next_a, next_b);
        out += (next - level) * std::abs(a[i] - b[j]);
        level = next;
        if (next_a <= next) ++i;
        if (next_b <= next) ++j;
    }
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

inline Estimate sample_mean(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("sample_mean: need at least 2 samples");
    const double n = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / (n - 1.0) / n)};
}

// Unbiased covariance with the delta-method standard error sqrt(Var((x - mx)(y - my)) / n).
inline Estimate sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("sample_covariance: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("sample_covariance: need at least 2 samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double c = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = (x[i] - mx) * (y[i] - my);
        c += p;
        c2 += p * p;
    }
    const double cov = c / (n - 1.0);
    const double mp = c / n;
    return {cov, std::sqrt(std::max(0.0, c2 / n - mp * mp) / n)};
}

inline Estimate sample_variance(const std::vector<double>& x) { return sample_covariance(x, x); }

// Nonparametric bootstrap standard error of a statistic of row-resampled data.
// `stat` receives the resampled row indices.
inline double bootstrap_stderr(std::size_t n, const std::function<double(const std::vector<std::size_t>&)>& stat, std::uint64_t seed,
                               int resamples = 200) {
    if (n < 2) throw std::invalid_argument("bootstrap_stderr: need at least 2 samples");
    if (resamples < 2) throw std::invalid_argument("bootstrap_stderr: need at least 2 resamples");
    Engine eng(derive_seed(seed, {stream::bootstrap}));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> rows(n);
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < resamples; ++b) {
        for (auto& r : rows) r = pick(eng);
        const double v = stat(rows);
        s1 += v;
        s2 += v * v;
    }
    const double m = s1 / resamples;
    return std::sqrt(std::max(0.0, (s2 - resamples * m * m) / (resamples - 1)));
}

inline Estimate bootstrap_covariance(const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed, int resamples = 200) {
    Estimate e = sample_covariance(x, y);
    std::vector<double> bx(x.size()), by(y.size());
    e.std_error = bootstrap_stderr(
        x.size(),
        [&](const std::vector<std::size_t>& rows) {
            for (std::size_t i = 0; i < rows.size(); ++i) bx[i] = x[rows[i]], by[i] = y[rows[i]];
            return sample_covariance(bx, by).value;
        },
        seed, resamples);
    return e;
}

// Bootstrap standard error of the median.
inline Estimate bootstrap_median(const std::vector<double>& x, std::uint64_t seed, int resamples = 200) {
    Estimate e{median(x), 0.0};
    std::vector<double> bx(x.size());
    e.std_error = bootstrap_stderr(
        x.size(),
        [&](const std::vector<std::size_t>& rows) {
            for (std::size_t i = 0; i < rows.size(); ++i) bx[i] = x[rows[i]];
            return median(bx);
        },
        seed, resamples);
    return e;
}

// Bootstrap standard error of W1 over independent resamples of both inputs.
inline Estimate bootstrap_w1(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed, int resamples = 200) {
    Estimate e{w1_distance(a, b), 0.0};
    Engine eng(derive_seed(seed, {stream::bootstrap}));
    std::uniform_int_distribution<std::size_t> pa(0, a.size() - 1), pb(0, b.size() - 1);
    std::vector<double> ra(a.size()), rb(b.size());
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < resamples; ++k) {
        for (auto& v : ra) v = a[pa(eng)];
        for (auto& v : rb) v = b[pb(eng)];
        const double w = w1_distance(ra, rb);
        s1 += w;
        s2 += w * w;
    }
    const double m = s1 / resamples;
    e.std_error = std::sqrt(std::max(0.0, (s2 - resamples * m * m) / (resamples - 1)));
    return e;
}

// Log-log rate of errors against epsilons; shares the fit with scaling_exponent.
inline ScalingFit convergence_regression(const std::vector<double>& epsilons, const std::vector<double>& errors) {
    if (epsilons.size() != errors.size()) throw std::invalid_argument("convergence_regression: size mismatch");
    std::map<double, double> m;
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        if (!m.emplace(epsilons[i], errors[i]).second) throw std::invalid_argument("convergence_regression: repeated epsilon");
    return scaling_exponent(m);
}

}  // namespace fracfluct
