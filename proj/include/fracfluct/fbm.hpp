#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "path.hpp"
#include "rng.hpp"

namespace fracfluct {

inline double fbm_covariance(double s, double t, HurstParameter H) {
    if (s < 0.0 || t < 0.0) throw std::domain_error("fbm_covariance: negative time");
    const double e = 2.0 * H.value();
    return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

// Autocovariance of unit-step fractional Gaussian noise at lag k.
inline double fgn_autocovariance(std::size_t k, HurstParameter H) {
    const double e = 2.0 * H.value();
    const double x = static_cast<double>(k);
    if (k == 0) return 1.0;
    return 0.5 * (std::pow(x + 1.0, e) - 2.0 * std::pow(x, e) + std::pow(x - 1.0, e));
}

struct FbmPath {
    HolderPath path;
    HurstParameter hurst;

    const TimeGrid& grid() const noexcept { return path.grid(); }
    Index channels() const noexcept { return path.dim(); }
    VectorXd increment(std::size_t k) const { return path.at(k + 1) - path.at(k); }
};

enum class FbmMethod { automatic, circulant, cholesky };

struct FbmOptions {
    FbmMethod method = FbmMethod::automatic;
    bool allow_fallback = true;
};

class CirculantEmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact sampler for m independent fBm channels on a fixed grid. Setup is done once;
// sample() is const and may be called concurrently.
class FbmSampler {
public:
    static constexpr std::size_t cholesky_limit = 4096;

    FbmSampler(TimeGrid grid, HurstParameter H, Index channels, FbmOptions opts = {})
        : grid_(grid), H_(H), m_(channels) {
        if (channels < 1) throw std::invalid_argument("sample_fbm: channel count must be >= 1");
        scale_ = std::pow(grid.step(), H.value());
        const std::size_t n = grid.n_steps();
        if (opts.method != FbmMethod::cholesky) {
            if (setup_circulant(n)) return;
            if (opts.method == FbmMethod::circulant || !opts.allow_fallback)
                throw CirculantEmbeddingError("sample_fbm: circulant embedding has negative eigenvalues");
        }
        setup_cholesky(n);
    }

    bool uses_circulant() const noexcept { return !sqrt_eig_.empty(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    HurstParameter hurst() const noexcept { return H_; }
    double min_eigenvalue() const noexcept { return min_eig_; }

    FbmPath sample(std::uint64_t seed) const {
        const std::size_t n = grid_.n_steps();
        NormalSource normal(seed);
        MatrixXd incr(m_, static_cast<Index>(n));
        if (uses_circulant()) {
            thread_local Eigen::FFT<double> fft;
            const std::size_t M = 2 * n;
            std::vector<std::complex<double>> z(M), w(M);
            for (Index c = 0; c < m_; c += 2) {
                for (std::size_t j = 0; j < M; ++j) {
                    const double a = normal();
                    const double b = normal();
                    z[j] = sqrt_eig_[j] * std::complex<double>(a, b);
                }
                fft.fwd(w, z);
                for (std::size_t k = 0; k < n; ++k) {
                    incr(c, static_cast<Index>(k)) = scale_ * w[k].real();
                    if (c + 1 < m_) incr(c + 1, static_cast<Index>(k)) = scale_ * w[k].imag();
                }
            }
        } else {
            VectorXd z(static_cast<Index>(n));
            for (Index c = 0; c < m_; ++c) {
                for (Index k = 0; k < z.size(); ++k) z(k) = normal();
                const VectorXd lz = chol_->matrixL() * z;
                incr.row(c) = scale_ * lz.transpose();
            }
        }
        HolderPath path(grid_, m_);
        for (std::size_t k = 0; k < n; ++k)
            path.at(k + 1) = path.at(k) + incr.col(static_cast<Index>(k));
        return {std::move(path), H_};
    }

private:
    bool setup_circulant(std::size_t n) {
        const std::size_t M = 2 * n;
        std::vector<std::complex<double>> row(M), eig(M);
        for (std::size_t j = 0; j <= n; ++j) row[j] = fgn_autocovariance(j, H_);
        for (std::size_t j = 1; j < n; ++j) row[M - j] = row[j];
        Eigen::FFT<double> fft;
        fft.fwd(eig, row);
        double lmax = 0.0;
        min_eig_ = std::numeric_limits<double>::infinity();
        for (const auto& v : eig) {
            lmax = std::max(lmax, v.real());
            min_eig_ = std::min(min_eig_, v.real());
        }
        // rounding-level negatives are zeros; anything larger rejects the embedding
        if (min_eig_ < -1e-12 * lmax) return false;
        sqrt_eig_.resize(M);
        for (std::size_t j = 0; j < M; ++j)
            sqrt_eig_[j] = std::sqrt(std::max(eig[j].real(), 0.0) / static_cast<double>(M));
        return true;
    }

    void setup_cholesky(std::size_t n) {
        if (n > cholesky_limit) throw CirculantEmbeddingError("sample_fbm: Cholesky fallback limited to 4096 steps");
        MatrixXd cov(static_cast<Index>(n), static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cov(static_cast<Index>(i), static_cast<Index>(j)) = fgn_autocovariance(i > j ? i - j : j - i, H_);
        chol_ = std::make_shared<Eigen::LLT<MatrixXd>>(cov);
        if (chol_->info() != Eigen::Success) throw std::runtime_error("sample_fbm: increment covariance not positive definite");
    }

    TimeGrid grid_;
    HurstParameter H_;
    Index m_;
    double scale_ = 1.0;
    double min_eig_ = 0.0;
    std::vector<double> sqrt_eig_;
    std::shared_ptr<const Eigen::LLT<MatrixXd>> chol_;
};

inline FbmPath sample_fbm(const TimeGrid& grid, HurstParameter H, Index channels, std::uint64_t seed,
                          FbmOptions opts = {}) {
    return FbmSampler(grid, H, channels, opts).sample(seed);
}

}  // namespace fracfluct
