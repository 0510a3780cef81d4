#pragma once

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracfluct {

struct HolderExponents {
    double alpha;  // forcing / solution
    double beta;   // driver
    double gamma;  // linear coefficient
};

inline void check_lemma_exponents(const HolderExponents& e, const char* where) {
    const bool ok = e.beta > 0.5 && e.beta <= 1.0 && e.alpha > 0.0 && e.alpha <= e.gamma && e.gamma < 1.0 &&
                    e.alpha + e.beta > 1.0;
    if (!ok) throw std::domain_error(std::string(where) + ": exponents outside beta in (1/2,1], 0 < alpha <= gamma < 1, alpha + beta > 1");
}

// 2^{a+b} zeta(a+b)
inline double young_constant(double alpha, double beta) {
    const double s = alpha + beta;
    return std::pow(2.0, s) * std::riemann_zeta(s);
}

namespace logspace {
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline double of(double x) { return x > 0.0 ? std::log(x) : neg_inf; }
inline double add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = std::max(a, b);
    if (m == std::numeric_limits<double>::infinity()) return m;
    return m + std::log1p(std::exp(std::min(a, b) - m));
}
// log(e^a e^b) with 0 * anything = 0
inline double mul(double a, double b) {
    if (a == neg_inf || b == neg_inf) return neg_inf;
    return a + b;
}
inline double add(std::initializer_list<double> xs) {
    double s = neg_inf;
    for (double x : xs) s = add(s, x);
    return s;
}
}  // namespace logspace

// Right-hand sides held as logarithms; exp() of them may overflow to +inf.
struct BoundCertificate {
    std::vector<std::pair<std::string, double>> inputs;
    double young_constant = 0.0;
    double mesh = 0.0;
    double intervals = 0.0;
    double log_sup = logspace::neg_inf;
    double log_holder = logspace::neg_inf;

    double sup_rhs() const { return std::exp(log_sup); }
    double holder_rhs() const { return std::exp(log_holder); }
    bool dominates_sup(double measured) const { return logspace::of(measured) <= log_sup; }
    bool dominates_holder(double measured) const { return logspace::of(measured) <= log_holder; }
    double input(const std::string& name) const {
        for (const auto& [k, v] : inputs)
            if (k == name) return v;
        throw std::out_of_range("BoundCertificate: no input " + name);
    }
};

struct GronwallInputs {
    double a_gamma = 0.0;  // |A|_gamma
    double a_sup = 0.0;    // |A|_inf
    double x_beta = 0.0;   // |X|_beta
    double f_alpha = 0.0;  // |f|_alpha
    double y0 = 0.0;       // |Y_0|
    double horizon = 1.0;  // T
    HolderExponents exponents{0.45, 0.6, 0.6};
};

namespace detail {

// Certificate with the data terms given as logarithms of |Y_0| and of the forcing norm.
inline BoundCertificate gronwall_log(double a_gamma, double a_sup, double x_beta, double log_y0, double log_f,
                                     double T, const HolderExponents& e) {
    const auto [alpha, beta, gamma] = e;
    const double C = young_constant(alpha, beta);
    double delta = 1.0;
    if (a_sup > 0.0 && x_beta > 0.0) delta = std::min(delta, std::pow(2.0 * C * a_sup * x_beta, -1.0 / beta));
    if (a_gamma > 0.0 && x_beta > 0.0)
        delta = std::min(delta, std::pow((0.5 - 1.0 / C) / (2.0 * C * x_beta * a_gamma), 1.0 / (beta + gamma)));
    const double intervals = std::max(std::ceil(T / delta - 1e-12), 1.0);
    BoundCertificate cert;
    cert.young_constant = C;
    cert.mesh = delta;
    cert.intervals = intervals;
    cert.log_sup = logspace::mul(std::log(4.0) + intervals * std::log(2.0), logspace::add(log_y0, log_f));
    // local alpha bound 2|f|_alpha + (2|A|_inf|X|_beta d^{beta-alpha} + 2C|X|_beta|A|_gamma d^{beta+gamma-alpha}) |Y|_inf
    const double coupling = 2.0 * a_sup * x_beta * std::pow(delta, beta - alpha) +
                            2.0 * C * x_beta * a_gamma * std::pow(delta, beta + gamma - alpha);
    const double log_local =
        logspace::add(logspace::mul(std::log(2.0), log_f), logspace::mul(logspace::of(coupling), cert.log_sup));
    cert.log_holder = logspace::mul((1.0 - alpha) * std::log(intervals), log_local);
    return cert;
}

}  // namespace detail

// Bounds for Y_t = Y_0 + int A Y dX + f_t on [0,T]. The sup bound iterates |Y|_{inf;I} <= 2|Y_s| + 4|f|_alpha over a
// uniform partition whose mesh delta satisfies 2C|A|_inf|X|_beta delta^beta <= 1,
// 2C|X|_beta|A|_gamma delta^{beta+gamma} <= 1/2 - 1/C and delta <= 1; the Hoelder bound chains the local
// estimate over the M = ceil(T/delta) intervals.
inline BoundCertificate gronwall_bound(const GronwallInputs& in) {
    check_lemma_exponents(in.exponents, "gronwall_bound");
    for (double v : {in.a_gamma, in.a_sup, in.x_beta, in.f_alpha, in.y0})
        if (!(v >= 0.0)) throw std::domain_error("gronwall_bound: norm inputs must be nonnegative");
    if (!(in.horizon > 0.0)) throw std::domain_error("gronwall_bound: horizon must be positive");
    BoundCertificate cert = detail::gronwall_log(in.a_gamma, in.a_sup, in.x_beta, logspace::of(in.y0),
                                                 logspace::of(in.f_alpha), in.horizon, in.exponents);
    cert.inputs = {{"A_gamma", in.a_gamma}, {"A_sup", in.a_sup},       {"X_beta", in.x_beta},
                   {"f_alpha", in.f_alpha}, {"Y0", in.y0},             {"T", in.horizon},
                   {"alpha", in.exponents.alpha}, {"beta", in.exponents.beta}, {"gamma", in.exponents.gamma}};
    return cert;
}

struct ResidueInputs {
    // unperturbed system z = int A z dX + Z
    double a_gamma = 0.0, a_sup = 0.0, x_beta = 0.0;
    // perturbed system z~ = int A~ z~ dX~ + Z~
    double at_gamma = 0.0, at_sup = 0.0, xt_beta = 0.0, zt0 = 0.0, zt_alpha = 0.0;
    // differences
    double dz0 = 0.0, dz_alpha = 0.0, dx_beta = 0.0, da_gamma = 0.0, da_sup = 0.0;
    double horizon = 1.0;
    HolderExponents exponents{0.45, 0.6, 0.6};
};

// Bound on |z - z~|_alpha: the Gronwall bound applied to Y = z - z~ with forcing
// dZ - dZ~ + A~ z~ d(X - X~) + (A - A~) z~ dX, whose alpha-norm is bounded through Young's inequality with
// |z~| bounded by gronwall_bound of the perturbed system.
inline BoundCertificate residue_bound(const ResidueInputs& in) {
    check_lemma_exponents(in.exponents, "residue_bound");
    const auto [alpha, beta, gamma] = in.exponents;
    const double T = in.horizon;
    const double C = young_constant(alpha, beta);
    GronwallInputs perturbed{in.at_gamma, in.at_sup, in.xt_beta, in.zt_alpha, in.zt0, T, in.exponents};
    const BoundCertificate zt = gronwall_bound(perturbed);
    using logspace::add;
    using logspace::of;
    // |G|_inf and |G|_alpha for G = B z~ with coefficient norms (b_sup, b_gamma)
    auto log_g_sup = [&](double b_sup) { return logspace::mul(of(b_sup), zt.log_sup); };
    auto log_g_alpha = [&](double b_sup, double b_gamma) {
        return add(logspace::mul(of(b_gamma * std::pow(T, gamma - alpha)), zt.log_sup), logspace::mul(of(b_sup), zt.log_holder));
    };
    // |int G dX'|_alpha <= |G|_inf |X'|_beta T^{beta-alpha} + C |G|_alpha |X'|_beta T^beta
    auto log_young = [&](double lg_sup, double lg_alpha, double xp_beta) {
        return add(logspace::mul(lg_sup, of(xp_beta * std::pow(T, beta - alpha))), logspace::mul(lg_alpha, of(C * xp_beta * std::pow(T, beta))));
    };
    const double log_f = add({of(in.dz_alpha),
                              log_young(log_g_sup(in.at_sup), log_g_alpha(in.at_sup, in.at_gamma), in.dx_beta),
                              log_young(log_g_sup(in.da_sup), log_g_alpha(in.da_sup, in.da_gamma), in.x_beta)});
    BoundCertificate cert = detail::gronwall_log(in.a_gamma, in.a_sup, in.x_beta, of(in.dz0), log_f, T, in.exponents);
    cert.inputs = {{"A_gamma", in.a_gamma},   {"A_sup", in.a_sup},     {"X_beta", in.x_beta},
                   {"At_gamma", in.at_gamma}, {"At_sup", in.at_sup},   {"Xt_beta", in.xt_beta},
                   {"Zt0", in.zt0},           {"Zt_alpha", in.zt_alpha}, {"dZ0", in.dz0},
                   {"dZ_alpha", in.dz_alpha}, {"dX_beta", in.dx_beta}, {"dA_gamma", in.da_gamma},
                   {"dA_sup", in.da_sup},     {"T", T},                {"alpha", alpha},
                   {"beta", beta},            {"gamma", gamma}};
    return cert;
}

}  // namespace fracfluct
