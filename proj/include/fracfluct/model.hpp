#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ou.hpp"
#include "path.hpp"
#include "poly.hpp"

namespace fracfluct {

// Scalar spatial profile s: R^d -> R with closed-form gradient and Hessian.
class SpatialFactor {
public:
    enum class Kind { constant, sine, rational, affine };

    static SpatialFactor constant(int d, double value = 1.0) {
        SpatialFactor s(Kind::constant, d);
        s.a_ = value;
        return s;
    }
    // sin(w . x + phase)
    static SpatialFactor sine(Eigen::VectorXd w, double phase = 0.0) {
        SpatialFactor s(Kind::sine, static_cast<int>(w.size()));
        s.w_ = std::move(w);
        s.a_ = phase;
        return s;
    }
    // 1 / (1 + |x - center|^2)
    static SpatialFactor rational(Eigen::VectorXd center) {
        SpatialFactor s(Kind::rational, static_cast<int>(center.size()));
        s.w_ = std::move(center);
        return s;
    }
    // a + w . x (unbounded; outside the bounded catalogue)
    static SpatialFactor affine(double a, Eigen::VectorXd w) {
        SpatialFactor s(Kind::affine, static_cast<int>(w.size()));
        s.a_ = a;
        s.w_ = std::move(w);
        return s;
    }

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return d_; }
    bool bounded() const noexcept { return kind_ != Kind::affine; }

    template <class V>
    double value(const V& x) const {
        switch (kind_) {
            case Kind::constant: return a_;
            case Kind::sine: return std::sin(w_.dot(x) + a_);
            case Kind::rational: return 1.0 / (1.0 + (x - w_).squaredNorm());
            case Kind::affine: return a_ + w_.dot(x);
        }
        return 0.0;
    }
    // scalar fast path for d = 1
    double value1(double x) const {
        switch (kind_) {
            case Kind::constant: return a_;
            case Kind::sine: return std::sin(w_(0) * x + a_);
            case Kind::rational: {
                const double u = x - w_(0);
                return 1.0 / (1.0 + u * u);
            }
            case Kind::affine: return a_ + w_(0) * x;
        }
        return 0.0;
    }

    template <class V>
    Eigen::VectorXd gradient(const V& x) const {
        switch (kind_) {
            case Kind::constant: return Eigen::VectorXd::Zero(d_);
            case Kind::sine: return std::cos(w_.dot(x) + a_) * w_;
            case Kind::rational: {
                const double q = 1.0 + (x - w_).squaredNorm();
                return (-2.0 / (q * q)) * (x - w_);
            }
            case Kind::affine: return w_;
        }
        return Eigen::VectorXd::Zero(d_);
    }

    template <class V>
    Eigen::MatrixXd hessian(const V& x) const {
        switch (kind_) {
            case Kind::constant:
            case Kind::affine: return Eigen::MatrixXd::Zero(d_, d_);
            case Kind::sine: return -std::sin(w_.dot(x) + a_) * (w_ * w_.transpose());
            case Kind::rational: {
                const Eigen::VectorXd u = x - w_;
                const double q = 1.0 + u.squaredNorm();
                return (8.0 / (q * q * q)) * (u * u.transpose()) -
                       (2.0 / (q * q)) * Eigen::MatrixXd::Identity(d_, d_);
            }
        }
        return Eigen::MatrixXd::Zero(d_, d_);
    }

    std::string name() const {
        switch (kind_) {
            case Kind::constant: return "constant";
            case Kind::sine: return "sine";
            case Kind::rational: return "rational";
            case Kind::affine: return "affine";
        }
        return "?";
    }

private:
    SpatialFactor(Kind k, int d) : kind_(k), d_(d), w_(Eigen::VectorXd::Zero(d)) {
        if (d < 1) throw std::invalid_argument("SpatialFactor: dimension must be >= 1");
    }
    Kind kind_;
    int d_;
    double a_ = 0.0;
    Eigen::VectorXd w_;
};

// One channel sigma_k(x) g_k(y) with sigma_k(x) = s_k(x) M_k, M_k a d x m matrix.
struct Channel {
    SpatialFactor profile;
    Eigen::MatrixXd direction;
    PolyFunction y_factor;
};

// f(x, y) = sum_k s_k(x) g_k(y) M_k with fast process OU(A).
class ModelSpec {
public:
    ModelSpec(int state_dim, int driver_dim, OuSpec fast, std::vector<Channel> channels, std::string name = "custom")
        : d_(state_dim), m_(driver_dim), fast_(std::move(fast)), channels_(std::move(channels)), name_(std::move(name)) {
        if (d_ < 1 || m_ < 1) throw std::invalid_argument("ModelSpec: dimensions must be >= 1");
        if (channels_.empty()) throw std::invalid_argument("ModelSpec: at least one channel required");
        for (const auto& c : channels_) {
            if (c.profile.dim() != d_) throw std::invalid_argument("ModelSpec: profile dimension mismatch");
            if (c.direction.rows() != d_ || c.direction.cols() != m_)
                throw std::invalid_argument("ModelSpec: channel direction must be d x m");
            if (c.y_factor.dim() != fast_.dimension())
                throw std::invalid_argument("ModelSpec: y-factor dimension must match the fast process");
            means_.push_back(invariant_mean(fast_, c.y_factor));
        }
    }

    int state_dim() const noexcept { return d_; }
    int driver_dim() const noexcept { return m_; }
    const OuSpec& fast() const noexcept { return fast_; }
    const std::vector<Channel>& channels() const noexcept { return channels_; }
    std::size_t n_channels() const noexcept { return channels_.size(); }
    const std::string& name() const noexcept { return name_; }
    double channel_mean(std::size_t k) const { return means_.at(k); }
    PolyFunction centered_channel(std::size_t k) const {
        return channels_.at(k).y_factor - PolyFunction::constant(fast_.dimension(), means_.at(k));
    }

    bool bounded() const {
        for (const auto& c : channels_)
            if (!c.profile.bounded()) return false;
        return true;
    }
    bool y_independent() const {
        for (const auto& c : channels_)
            if (c.y_factor.degree() > 0) return false;
        return true;
    }

    template <class X, class Y>
    Eigen::MatrixXd f(const X& x, const Y& y) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, m_);
        for (const auto& c : channels_) out += c.profile.value(x) * c.y_factor(y) * c.direction;
        return out;
    }

    template <class X>
    Eigen::MatrixXd fbar(const X& x) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, m_);
        for (std::size_t k = 0; k < channels_.size(); ++k)
            out += channels_[k].profile.value(x) * means_[k] * channels_[k].direction;
        return out;
    }

    // D fbar(x) as the block row [A^{(1)} ... A^{(m)}], A^{(j)} = sum_k mean_k M_k[:, j] grad s_k(x)^T.
    template <class X>
    Eigen::MatrixXd dfbar(const X& x) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_ * m_);
        for (std::size_t k = 0; k < channels_.size(); ++k) {
            if (means_[k] == 0.0) continue;
            const Eigen::VectorXd g = channels_[k].profile.gradient(x);
            for (int j = 0; j < m_; ++j)
                out.middleCols(j * d_, d_) += means_[k] * channels_[k].direction.col(j) * g.transpose();
        }
        return out;
    }

private:
    int d_;
    int m_;
    OuSpec fast_;
    std::vector<Channel> channels_;
    std::vector<double> means_;
    std::string name_;
};

class SpatialGrid {
public:
    explicit SpatialGrid(std::vector<Eigen::VectorXd> points) : points_(std::move(points)) {
        if (points_.empty()) throw std::invalid_argument("SpatialGrid: needs at least one point");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (points_[i].size() != points_.front().size()) throw std::invalid_argument("SpatialGrid: mixed dimensions");
            for (std::size_t j = 0; j < i; ++j)
                if (points_[i] == points_[j]) throw std::invalid_argument("SpatialGrid: points must be distinct");
        }
    }
    static SpatialGrid scalar(const std::vector<double>& xs) {
        std::vector<Eigen::VectorXd> pts;
        for (double x : xs) pts.push_back(Eigen::VectorXd::Constant(1, x));
        return SpatialGrid(std::move(pts));
    }
    std::size_t size() const noexcept { return points_.size(); }
    int dim() const noexcept { return static_cast<int>(points_.front().size()); }
    const Eigen::VectorXd& operator[](std::size_t i) const { return points_.at(i); }
    const std::vector<Eigen::VectorXd>& points() const noexcept { return points_; }

private:
    std::vector<Eigen::VectorXd> points_;
};

// Registered scalar models (d = m = K = 1).
//   homogenization-*: g(y) = y (fbar = 0); averaging-*: g(y) = 1 + y; additive-*: g(y) = 1.
inline ModelSpec make_catalogue_model(const std::string& id, const OuSpec& fast = OuSpec(1.0)) {
    const int q = fast.dimension();
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    const Eigen::MatrixXd dir = Eigen::MatrixXd::Ones(1, 1);
    const PolyFunction y = PolyFunction::coordinate(q, 0);
    const PolyFunction c1 = PolyFunction::constant(q, 1.0);
    auto build = [&](SpatialFactor s, PolyFunction g) {
        return ModelSpec(1, 1, fast, {Channel{std::move(s), dir, std::move(g)}}, id);
    };
    const auto sine = SpatialFactor::sine(one);
    const auto rational = SpatialFactor::rational(Eigen::VectorXd::Zero(1));
    if (id == "homogenization-sine") return build(sine, y);
    if (id == "homogenization-rational") return build(rational, y);
    if (id == "averaging-sine") return build(sine, c1 + y);
    if (id == "averaging-rational") return build(rational, c1 + y);
    if (id == "additive-sine") return build(sine, c1);
    if (id == "additive-rational") return build(rational, c1);
    if (id == "constant") return build(SpatialFactor::constant(1), c1);
    throw std::invalid_argument("unknown model id: " + id);
}

inline std::vector<std::string> catalogue_model_ids() {
    return {"homogenization-sine", "homogenization-rational", "averaging-sine", "averaging-rational",
            "additive-sine",       "additive-rational",       "constant"};
}

}  // namespace fracfluct
