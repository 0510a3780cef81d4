#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracfluct {

// Multivariate polynomial of total degree <= 4 in the fast-process state.
class PolyFunction {
public:
    using Exponents = std::vector<int>;
    static constexpr int max_degree = 4;

    explicit PolyFunction(int dim = 1) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("PolyFunction: dimension must be >= 1");
    }

    static PolyFunction constant(int dim, double c) {
        PolyFunction p(dim);
        p.add_term(Exponents(static_cast<std::size_t>(dim), 0), c);
        return p;
    }
    static PolyFunction coordinate(int dim, int i, double c = 1.0) {
        Exponents e(static_cast<std::size_t>(dim), 0);
        e.at(static_cast<std::size_t>(i)) = 1;
        return monomial(dim, e, c);
    }
    static PolyFunction monomial(int dim, Exponents e, double c) {
        PolyFunction p(dim);
        p.add_term(std::move(e), c);
        return p;
    }

    int dim() const noexcept { return dim_; }
    const std::map<Exponents, double>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, total(e));
        return d;
    }

    double coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_term(Exponents e, double c) {
        if (static_cast<int>(e.size()) != dim_) throw std::invalid_argument("PolyFunction: exponent arity mismatch");
        for (int k : e)
            if (k < 0) throw std::invalid_argument("PolyFunction: negative exponent");
        if (total(e) > max_degree) throw std::invalid_argument("PolyFunction: degree bound 4 exceeded");
        if (c == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    template <class Vec>
    double operator()(const Vec& y) const {
        if (y.size() != dim_) throw std::invalid_argument("PolyFunction: argument dimension mismatch");
        double s = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = c;
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) m *= y(i);
            s += m;
        }
        return s;
    }

    PolyFunction& operator+=(const PolyFunction& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    PolyFunction& operator-=(const PolyFunction& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    PolyFunction& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    friend PolyFunction operator+(PolyFunction a, const PolyFunction& b) { return a += b; }
    friend PolyFunction operator-(PolyFunction a, const PolyFunction& b) { return a -= b; }
    friend PolyFunction operator*(PolyFunction a, double s) { return a *= s; }
    friend PolyFunction operator*(double s, PolyFunction a) { return a *= s; }
    friend PolyFunction operator*(const PolyFunction& a, const PolyFunction& b) {
        a.check_dim(b);
        PolyFunction out(a.dim_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        return out;
    }

    // u -> f(M u) for a dim() x k matrix M.
    PolyFunction linear_substitution(const Eigen::MatrixXd& M) const {
        if (M.rows() != dim_) throw std::invalid_argument("PolyFunction: substitution matrix row mismatch");
        const int k = static_cast<int>(M.cols());
        std::vector<PolyFunction> forms;
        forms.reserve(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) {
            PolyFunction form(k);
            for (int j = 0; j < k; ++j) form.add_term(unit(k, j), M(i, j));
            forms.push_back(std::move(form));
        }
        PolyFunction out(k);
        for (const auto& [e, c] : terms_) {
            PolyFunction term = constant(k, c);
            for (int i = 0; i < dim_; ++i)
                for (int p = 0; p < e[static_cast<std::size_t>(i)]; ++p) term = term * forms[static_cast<std::size_t>(i)];
            out += term;
        }
        return out;
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    // Coefficientwise comparison with absolute tolerance tol.
    bool approx_equal(const PolyFunction& o, double tol) const {
        if (o.dim_ != dim_) return false;
        for (const auto& [e, c] : terms_)
            if (std::abs(c - o.coefficient(e)) > tol) return false;
        for (const auto& [e, c] : o.terms_)
            if (std::abs(c - coefficient(e)) > tol) return false;
        return true;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        os.precision(12);
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << c;
            for (int i = 0; i < dim_; ++i) {
                const int k = e[static_cast<std::size_t>(i)];
                if (k == 0) continue;
                os << "*y" << i;
                if (k > 1) os << '^' << k;
            }
        }
        return os.str();
    }

    static int total(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

private:
    static Exponents unit(int k, int j) {
        Exponents e(static_cast<std::size_t>(k), 0);
        e[static_cast<std::size_t>(j)] = 1;
        return e;
    }
    void check_dim(const PolyFunction& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("PolyFunction: dimension mismatch");
    }

    int dim_;
    std::map<Exponents, double> terms_;
};

// E[prod_i xi_i^{e_i}] for xi ~ N(0, S), by recursive Isserlis pairing.
inline double gaussian_moment(const PolyFunction::Exponents& e, const Eigen::MatrixXd& S) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) idx.push_back(static_cast<int>(i));
    if (idx.size() % 2 == 1) return 0.0;
    auto rec = [&](auto&& self, std::vector<int> rest) -> double {
        if (rest.empty()) return 1.0;
        const int a = rest.front();
        double s = 0.0;
        for (std::size_t j = 1; j < rest.size(); ++j) {
            std::vector<int> next;
            next.reserve(rest.size() - 2);
            for (std::size_t k = 1; k < rest.size(); ++k)
                if (k != j) next.push_back(rest[k]);
            s += S(a, rest[j]) * self(self, std::move(next));
        }
        return s;
    };
    return rec(rec, idx);
}

// y -> E[f(M y + xi)], xi ~ N(0, S).
inline PolyFunction gaussian_smoothing(const PolyFunction& f, const Eigen::MatrixXd& M, const Eigen::MatrixXd& S) {
    const int q = f.dim();
    Eigen::MatrixXd ext(q, 2 * q);
    ext << M, Eigen::MatrixXd::Identity(q, q);
    const PolyFunction joint = f.linear_substitution(ext);
    PolyFunction out(q);
    for (const auto& [e, c] : joint.terms()) {
        PolyFunction::Exponents ey(e.begin(), e.begin() + q);
        PolyFunction::Exponents ex(e.begin() + q, e.end());
        out.add_term(std::move(ey), c * gaussian_moment(ex, S));
    }
    return out;
}

}  // namespace fracfluct
