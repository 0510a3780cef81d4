#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fracfluct/bounds.hpp>
#include <fracfluct/cumulants.hpp>
#include <fracfluct/effective.hpp>
#include <fracfluct/fbm.hpp>
#include <fracfluct/jtilde.hpp>
#include <fracfluct/lifts.hpp>
#include <fracfluct/model.hpp>
#include <fracfluct/multiscale.hpp>
#include <fracfluct/ou.hpp>
#include <fracfluct/rough.hpp>
#include <fracfluct/stats.hpp>
#include <fracfluct/yde.hpp>
#include <fracfluct/harness/experiments.hpp>
#include <fracfluct/harness/config.hpp>
#include <fracfluct/harness/pool.hpp>
#include <fracfluct/harness/report.hpp>

namespace fracfluct::harness {

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}
inline std::string at_point(const std::string& stat, double x) { return stat + "[x=" + fmt(x) + "]"; }

inline OuSpec make_ou(const ExperimentConfig& c) {
    if (c.ou_rates.size() == 1) return OuSpec(c.ou_rates.front());
    const auto n = static_cast<Index>(c.ou_rates.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) A(i, i) = c.ou_rates[static_cast<std::size_t>(i)];
    return OuSpec(A);
}

inline ModelSpec make_model(const ExperimentConfig& c) {
    ModelSpec m = make_catalogue_model(c.model, make_ou(c));
    if (!m.bounded()) throw std::invalid_argument("experiment models must have bounded spatial factors");
    return m;
}

inline TimeGrid make_grid(const ExperimentConfig& c) { return {0.0, c.horizon, static_cast<std::size_t>(c.n_steps)}; }

// Exponents (alpha, beta, gamma) for the bound lemmas: beta = gamma in (1/2, H), alpha in (1 - beta, 1/2).
inline HolderExponents lemma_exponents(double H) {
    const double beta = 0.5 + 0.4 * (H - 0.5);
    return {0.5 * (1.0 - beta + 0.5), beta, beta};
}

inline ExperimentReport start_report(const ExperimentConfig& c) {
    ExperimentReport r;
    r.experiment = c.experiment;
    r.config = c.echo();
    return r;
}

// Replicates aborted by the blow-up guard are excluded from the statistics and must stay below 0.1%.
inline bool record_replicates(ExperimentReport& r, std::size_t total, std::size_t failed) {
    r.replicates = total;
    r.failed_replicates = failed;
    const double rate = total ? static_cast<double>(failed) / static_cast<double>(total) : 0.0;
    r.add(0.0, "blowup_rate", rate, std::sqrt(rate * (1.0 - rate) / std::max<double>(1.0, static_cast<double>(total))));
    r.check("blowup_rate", rate, "<", 1e-3);
    return r.check("valid_replicates", static_cast<double>(total - failed), ">=", 2.0);
}

inline std::uint64_t fbm_seed(const ExperimentConfig& c, std::size_t i) { return derive_seed(c.seed, {stream::fbm, i}); }
inline std::uint64_t fast_seed(const ExperimentConfig& c, std::size_t i, std::size_t j) {
    return derive_seed(c.seed, {stream::fast, i, j});
}
inline std::uint64_t stat_seed(const ExperimentConfig& c, std::size_t a, std::size_t b = 0) {
    return derive_seed(c.seed, {stream::bootstrap, a, b});
}

template <class Rep>
std::size_t count_failed(const std::vector<Rep>& reps) {
    return static_cast<std::size_t>(std::count_if(reps.begin(), reps.end(), [](const Rep& r) { return !r.ok; }));
}

}  // namespace detail

// (a) sup_t |x^eps_t - xbar_t| over replicates sharing the driver between x^eps and xbar.
ExperimentReport run_averaging_convergence(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(model.state_dim(), c.x0);
    struct Rep {
        bool ok = false;
        std::vector<double> err;
    };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        try {
            const FbmPath fbm = sampler.sample(detail::fbm_seed(c, i));
            const HolderPath xbar = simulate_averaged(model, fbm, x0);
            for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
                const FastPath fast = sample_ou(model.fast(), grid, c.epsilons[j], detail::fast_seed(c, i, j));
                out.err.push_back(sup_norm(simulate_slow(model, fbm, fast, x0) - xbar));
            }
            out.ok = true;
        } catch (const BlowUpError&) {
        }
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    std::vector<double> med;
    double max_err = 0.0;
    for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
        std::vector<double> e;
        for (const auto& rep : reps)
            if (rep.ok) e.push_back(rep.err[j]);
        const Estimate m = bootstrap_median(e, detail::stat_seed(c, j), c.resamples);
        const Estimate mean = sample_mean(e);
        r.add(c.epsilons[j], "median_sup_error", m.value, m.std_error);
        r.add(c.epsilons[j], "mean_sup_error", mean.value, mean.std_error);
        r.curves["median_sup_error"].emplace_back(c.epsilons[j], m.value);
        med.push_back(m.value);
        max_err = std::max(max_err, *std::max_element(e.begin(), e.end()));
    }
    if (model.y_independent()) {
        r.check("max_sup_error_y_independent", max_err, "==", 0.0);
        return r;
    }
    for (std::size_t j = 1; j < med.size(); ++j)
        r.check("median_decreases_eps=" + detail::fmt(c.epsilons[j]), med[j], "<", med[j - 1]);
    if (med.size() >= 2) {
        const double ratio = med.back() / med.front();
        r.add(0.0, "final_to_initial_median_ratio", ratio, 0.0);
        r.check("final_to_initial_median_ratio", ratio, "<", 0.05);
    }
    return r;
}

namespace detail {

struct NoiseSample {
    bool ok = false;
    std::vector<std::vector<double>> v_terminal;  // [eps][point]
    double b_terminal = 0.0;
};

// V^eps_{0,T}(x) at every point and B^H_{0,T}, one OU sample per (replicate, eps).
inline std::vector<NoiseSample> collect_noise_terminals(const ExperimentConfig& c, const ModelSpec& model, const SpatialGrid& pts) {
    const TimeGrid grid = make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    return parallel_map<NoiseSample>(c.paths, c.workers, [&](std::size_t i) {
        NoiseSample out;
        const FbmPath fbm = sampler.sample(fbm_seed(c, i));
        out.b_terminal = fbm.path.terminal()(0);
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const FastPath fast = sample_ou(model.fast(), grid, c.epsilons[j], fast_seed(c, i, j));
            const auto vs = v_epsilon(model, fbm, fast, pts);
            std::vector<double> row;
            for (const auto& v : vs) row.push_back(v.terminal()(0));
            out.v_terminal.push_back(std::move(row));
        }
        out.ok = true;
        return out;
    });
}

inline std::vector<double> column(const std::vector<NoiseSample>& reps, std::size_t j, std::size_t p) {
    std::vector<double> out;
    for (const auto& r : reps)
        if (r.ok) out.push_back(r.v_terminal[j][p]);
    return out;
}

}  // namespace detail

// (b) Var(V^eps_{0,T}(x)) against T (Sigma(x,x) + Sigma(x,x)^T).
ExperimentReport run_homogenization_covariance(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const HurstParameter H(c.hurst);
    const SpatialGrid pts = SpatialGrid::scalar(c.points);
    const CovKernel closed = sigma_kernel(model, H, FracPotentialMode::closed_form);
    const CovKernel quad = sigma_kernel(model, H, FracPotentialMode::quadrature);
    double cross = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const double a = closed.evaluate(pts[p], pts[p])(0, 0), b = quad.evaluate(pts[p], pts[p])(0, 0);
        cross = std::max(cross, a == 0.0 ? std::abs(b) : std::abs(a - b) / std::abs(a));
    }
    r.add(0.0, "sigma_closed_vs_quadrature_reldiff", cross, 0.0);
    r.check("sigma_closed_vs_quadrature_reldiff", cross, "<=", 1e-8);

    const auto reps = detail::collect_noise_terminals(c, model, pts);
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    const std::size_t jmin = static_cast<std::size_t>(std::min_element(c.epsilons.begin(), c.epsilons.end()) - c.epsilons.begin());
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const double x = c.points[p];
        const double target = c.horizon * 2.0 * closed.evaluate(pts[p], pts[p])(0, 0);
        r.add(0.0, detail::at_point("target_var_V", x), target, 0.0);
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const Estimate v = sample_variance(detail::column(reps, j, p));
            r.add(c.epsilons[j], detail::at_point("var_V", x), v.value, v.std_error);
            r.curves[detail::at_point("var_V", x)].emplace_back(c.epsilons[j], v.value);
            if (target != 0.0) {
                const double rel = v.value / target - 1.0;
                r.add(c.epsilons[j], detail::at_point("rel_err_var_V", x), rel, v.std_error / std::abs(target));
                if (j == jmin) r.check(detail::at_point("rel_err_var_V", x) + "_eps=" + detail::fmt(c.epsilons[j]), std::abs(rel), "<=", 0.05);
            } else if (j == jmin) {
                r.check(detail::at_point("var_V_zero_target", x), v.value, "<=", 3.0 * v.std_error);
            }
        }
    }
    return r;
}

// (e) Cov(V^eps_{0,T}(x), B^H_{0,T}) against 0 with bootstrap errors; same streams as (b).
ExperimentReport run_cross_independence(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const SpatialGrid pts = SpatialGrid::scalar(c.points);
    const auto reps = detail::collect_noise_terminals(c, model, pts);
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    std::vector<double> b;
    for (const auto& rep : reps)
        if (rep.ok) b.push_back(rep.b_terminal);
    for (std::size_t p = 0; p < pts.size(); ++p)
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const Estimate cov = bootstrap_covariance(detail::column(reps, j, p), b, detail::stat_seed(c, j, p), c.resamples);
            const std::string name = detail::at_point("cov_V_B", c.points[p]);
            r.add(c.epsilons[j], name, cov.value, cov.std_error);
            r.curves[name].emplace_back(c.epsilons[j], cov.value);
            r.check(name + "_eps=" + detail::fmt(c.epsilons[j]), std::abs(cov.value), "<=", 3.0 * cov.std_error);
        }
    return r;
}

// (c) W1 between marginals of z^eps and of the limit equation driven by independent noise.
ExperimentReport run_fluctuation_theorem(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    const CovKernel kernel = sigma_kernel(model, H);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(model.state_dim(), c.x0);
    const std::size_t n = grid.n_steps();
    const std::vector<std::size_t> times{n / 4, n / 2, n};
    const std::vector<std::string> names{"z_quarter", "z_half", "z_T", "sup_z", "holder_z"};
    const double holder_exp = 0.4;
    auto functionals = [&](const HolderPath& z) {
        std::vector<double> f;
        for (auto k : times) f.push_back(z(0, k));
        f.push_back(sup_norm(z));
        f.push_back(holder_norm(z, holder_exp));
        return f;
    };
    struct Rep {
        bool ok = false;
        std::vector<std::vector<double>> eps;  // [eps][functional]
        std::vector<std::vector<double>> limit;  // [set][functional]
    };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        try {
            const FbmPath fbm = sampler.sample(detail::fbm_seed(c, i));
            const HolderPath xbar = simulate_averaged(model, fbm, x0);
            for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
                const FastPath fast = sample_ou(model.fast(), grid, c.epsilons[j], detail::fast_seed(c, i, j));
                const HolderPath xe = simulate_slow(model, fbm, fast, x0);
                out.eps.push_back(functionals(fluctuation(xe, xbar, c.epsilons[j], H)));
            }
            for (std::uint64_t s = 0; s < 2; ++s) {
                const FbmPath drv = sampler.sample(derive_seed(c.seed, {stream::limit_driver, s, i}));
                const HolderPath xb = simulate_averaged(model, drv, x0);
                const HolderPath v = sample_limit_noise(kernel, xb, grid, derive_seed(c.seed, {stream::limit_noise, s, i}));
                out.limit.push_back(functionals(solve_limit_fluctuation(model, xb, v, drv)));
            }
            out.ok = true;
        } catch (const BlowUpError&) {
        }
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    auto gather = [&](auto&& pick) {
        std::vector<double> out;
        for (const auto& rep : reps)
            if (rep.ok) out.push_back(pick(rep));
        return out;
    };
    std::vector<double> baseline(names.size());
    for (std::size_t f = 0; f < names.size(); ++f) {
        const auto l0 = gather([&](const Rep& x) { return x.limit[0][f]; });
        const auto l1 = gather([&](const Rep& x) { return x.limit[1][f]; });
        const Estimate b = bootstrap_w1(l0, l1, detail::stat_seed(c, 100, f), c.resamples);
        baseline[f] = b.value;
        r.add(0.0, "w1_baseline_" + names[f], b.value, b.std_error);
        const Estimate m = sample_mean(l0);
        r.add(0.0, "limit_mean_" + names[f], m.value, m.std_error);
    }
    std::vector<double> w1_T;
    for (std::size_t j = 0; j < c.epsilons.size(); ++j)
        for (std::size_t f = 0; f < names.size(); ++f) {
            const auto ze = gather([&](const Rep& x) { return x.eps[j][f]; });
            const auto l0 = gather([&](const Rep& x) { return x.limit[0][f]; });
            const Estimate w = bootstrap_w1(ze, l0, detail::stat_seed(c, j, f), c.resamples);
            r.add(c.epsilons[j], "w1_" + names[f], w.value, w.std_error);
            r.curves["w1_" + names[f]].emplace_back(c.epsilons[j], w.value);
            if (names[f] == "z_T") w1_T.push_back(w.value);
        }
    const std::size_t jmin = static_cast<std::size_t>(std::min_element(c.epsilons.begin(), c.epsilons.end()) - c.epsilons.begin());
    r.check("w1_z_T_vs_3x_baseline_eps=" + detail::fmt(c.epsilons[jmin]), w1_T[jmin], "<=", 3.0 * baseline[2]);
    for (std::size_t j = 1; j < w1_T.size(); ++j)
        r.check("w1_z_T_decreases_eps=" + detail::fmt(c.epsilons[j]), w1_T[j], "<", w1_T[j - 1]);
    r.notes.push_back("W1 is computed between one-dimensional marginals (z at T/4, T/2, T, the sup functional and the "
                      "discrete Hoelder functional with exponent 0.4), a weakening of convergence in law on path space.");
    return r;
}

// (d) Chen defects of every assembled lift and distances of the eps-lifts from their limits.
ExperimentReport run_lift_convergence(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    if (c.n_steps > 2048) throw std::invalid_argument("lift-convergence: steps must be <= 2048 (two-parameter areas are O(n^2))");
    const ModelSpec model = detail::make_model(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    const SpatialGrid pts = SpatialGrid::scalar(c.points);
    const double a2 = 2.0 * 0.4;
    const std::vector<std::string> lifts{"V", "U", "VU", "U_eps", "W_eps", "W_bar"};
    struct Rep {
        bool ok = false;
        std::vector<std::vector<double>> defect;  // [eps][lift], relative to the area scale
        std::vector<std::vector<double>> dist;    // [eps]{|U^eps - U|_{2a}, |W^eps - Wbar|_{2a}, |U^eps - U|_a}
    };
    auto rel = [](double defect, const TwoParamArea& A) { return defect / std::max(area_scale(A), 1e-300); };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        const FbmPath fbm = sampler.sample(detail::fbm_seed(c, i));
        const HolderPath u = stack(u_paths(model, fbm, pts));
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const FastPath fast = sample_ou(model.fast(), grid, c.epsilons[j], detail::fast_seed(c, i, j));
            const HolderPath v = stack(v_epsilon(model, fbm, fast, pts));
            const LiftComponents comp = LiftComponents::with_areas(v, u);
            const LiftFamily fam = lift_u_epsilon(comp, c.epsilons[j], H);
            std::vector<double> d;
            d.push_back(rel(chen_defect(*comp.vv, v, v), *comp.vv));
            d.push_back(rel(chen_defect(*comp.uu, u, u), *comp.uu));
            d.push_back(rel(chen_defect(*comp.vu, v, u), *comp.vu));
            d.push_back(rel(chen_defect(fam.u_eps, fam.u_eps_path, fam.u_eps_path), fam.u_eps));
            d.push_back(rel(chen_defect(fam.w_eps, fam.w_eps_path, fam.w_eps_path), fam.w_eps));
            d.push_back(rel(chen_defect(fam.w_bar, fam.w_bar_path, fam.w_bar_path), fam.w_bar));
            out.defect.push_back(std::move(d));
            out.dist.push_back({holder_norm(fracfluct::detail::combine(fam.u_eps, 1.0, *comp.uu, -1.0), a2),
                                holder_norm(fracfluct::detail::combine(fam.w_eps, 1.0, fam.w_bar, -1.0), a2),
                                holder_norm(fam.u_eps_path - u, 0.5 * a2)});
        }
        out.ok = true;
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    const std::vector<std::string> dist_names{"holder_U_eps_minus_U_area", "holder_W_eps_minus_W_bar_area", "holder_U_eps_minus_U_path"};
    for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
        for (std::size_t l = 0; l < lifts.size(); ++l) {
            double worst = 0.0;
            for (const auto& rep : reps) worst = std::max(worst, rep.defect[j][l]);
            r.add(c.epsilons[j], "chen_defect_rel_" + lifts[l], worst, 0.0);
            r.check("chen_defect_rel_" + lifts[l] + "_eps=" + detail::fmt(c.epsilons[j]), worst, "<=", 1e-10);
        }
        for (std::size_t q = 0; q < dist_names.size(); ++q) {
            std::vector<double> v;
            for (const auto& rep : reps) v.push_back(rep.dist[j][q]);
            const Estimate m = v.size() >= 2 ? sample_mean(v) : Estimate{v.front(), 0.0};
            r.add(c.epsilons[j], dist_names[q], m.value, m.std_error);
            r.curves[dist_names[q]].emplace_back(c.epsilons[j], m.value);
        }
    }
    r.notes.push_back("Lift distances are pathwise on a shared driver; the lifts converge in law only, so these are "
                      "reported without a check.");
    r.notes.push_back("Chen defects are relative to the largest area entry; all grid triples are checked when their "
                      "count is at most 3e7, otherwise dyadic, bisection and consecutive triples.");
    return r;
}

// (f) Fourth cumulant of W = U + V^eps at the first spatial point.
ExperimentReport run_cumulant_gaussianity(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    const SpatialGrid pt = SpatialGrid::scalar({c.points.front()});
    const double fbar = model.fbar(pt[0])(0, 0);
    struct Rep {
        bool ok = false;
        std::vector<double> w;
    };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        const FbmPath fbm = sampler.sample(detail::fbm_seed(c, i));
        const double u = fbar * fbm.path.terminal()(0);
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const FastPath fast = sample_ou(model.fast(), grid, c.epsilons[j], detail::fast_seed(c, i, j));
            out.w.push_back(u + v_epsilon(model, fbm, fast, pt).front().terminal()(0));
        }
        out.ok = true;
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    if (reps.size() < 1000) throw std::invalid_argument("cumulant-gaussianity: needs at least 1000 paths");
    std::vector<Estimate> k4;
    for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
        Eigen::VectorXd w(static_cast<Index>(reps.size()));
        for (std::size_t i = 0; i < reps.size(); ++i) w(static_cast<Index>(i)) = reps[i].w[j];
        const Estimate e4 = empirical_joint_cumulant(w, 4, detail::stat_seed(c, j, 4), c.resamples);
        const Estimate e2 = empirical_joint_cumulant(w, 2, detail::stat_seed(c, j, 2), c.resamples);
        r.add(c.epsilons[j], "kappa4_W", e4.value, e4.std_error);
        r.add(c.epsilons[j], "kappa2_W", e2.value, e2.std_error);
        r.curves["abs_kappa4_W"].emplace_back(c.epsilons[j], std::abs(e4.value));
        k4.push_back(e4);
    }
    for (std::size_t j = 1; j < k4.size(); ++j) {
        const double slack = 2.0 * std::hypot(k4[j].std_error, k4[j - 1].std_error);
        r.check("abs_kappa4_decreases_eps=" + detail::fmt(c.epsilons[j]), std::abs(k4[j].value), "<=", std::abs(k4[j - 1].value) + slack);
    }
    const std::size_t jmin = static_cast<std::size_t>(std::min_element(c.epsilons.begin(), c.epsilons.end()) - c.epsilons.begin());
    r.check("abs_kappa4_within_3se_eps=" + detail::fmt(c.epsilons[jmin]), std::abs(k4[jmin].value), "<=", 3.0 * k4[jmin].std_error);
    return r;
}

// (g) J~ integrals over the eps sweep: log-log slopes and the one-sided reduction bounds.
ExperimentReport run_jtilde_scaling(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const double H = c.hurst;
    const double decay = detail::make_ou(c).gap_rate();
    struct Family {
        std::string label;
        PairPartitionDiagram diagram;
    };
    const auto primary = PairPartitionDiagram::parse(c.diagram.empty() ? "delta=1,2;3,4 p=1,3;2,4" : c.diagram);
    const bool primary_connected_no_singletons = primary.connected() && primary.num_singletons() == 0 && primary.size() > 2;
    std::vector<Family> fam{
        {"primary", primary},
        {"singleton2", PairPartitionDiagram::parse("delta=1;2 p=1,2")},
        {"pair2", PairPartitionDiagram::parse("delta=1,2 p=1,2")},
        {"singleton_removal4", PairPartitionDiagram::parse("delta=1;2;3,4 p=1,3;2,4")},
        {"restriction4", PairPartitionDiagram::parse("delta=1,2,3,4 p=1,2;3,4")},
        {"restriction6", PairPartitionDiagram::parse("delta=1,2,5;3,4,6 p=1,3;2,4;5,6")},
        {"cycle4", PairPartitionDiagram::parse("delta=1,2;3,4 p=1,3;2,4")},
    };
    const auto sweep = connected_pair_diagrams(4, false);
    for (std::size_t k = 0; k < sweep.size(); ++k) fam.push_back({"nosingleton4_" + std::to_string(k), sweep[k]});
    for (const auto& f : fam) r.notes.push_back(f.label + ": " + f.diagram.to_string());

    struct Task {
        std::size_t family, eps;
    };
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < fam.size(); ++f)
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) tasks.push_back({f, j});
    const auto values = parallel_map<Estimate>(tasks.size(), c.workers, [&](std::size_t t) {
        const auto& g = fam[tasks[t].family].diagram;
        JTildeOptions o;
        if (static_cast<int>(g.size()) > jtilde_max_nodes_deterministic) {
            o.mode = JTildeMode::monte_carlo;
            o.samples = c.paths;
            o.seed = derive_seed(c.seed, {stream::instance, tasks[t].family, tasks[t].eps});
        }
        return jtilde_estimate(g, c.epsilons[tasks[t].eps], H, decay, 0.0, c.horizon, o);
    });
    auto value = [&](std::size_t f, std::size_t j) { return values[f * c.epsilons.size() + j]; };
    auto index_of = [&](const std::string& label) {
        for (std::size_t f = 0; f < fam.size(); ++f)
            if (fam[f].label == label) return f;
        throw std::logic_error("jtilde-scaling: no family " + label);
    };
    std::map<std::string, ScalingFit> fits;
    for (std::size_t f = 0; f < fam.size(); ++f) {
        std::map<double, double> m;
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const Estimate v = value(f, j);
            r.add(c.epsilons[j], "jtilde_" + fam[f].label, v.value, v.std_error);
            r.curves["jtilde_" + fam[f].label].emplace_back(c.epsilons[j], v.value);
            m[c.epsilons[j]] = v.value;
        }
        try {
            const ScalingFit fit = scaling_exponent(m);
            fits[fam[f].label] = fit;
            r.add(0.0, "slope_" + fam[f].label, fit.slope, fit.slope_stderr);
            r.add(0.0, "r2_" + fam[f].label, fit.r2, 0.0);
        } catch (const std::invalid_argument& e) {
            r.notes.push_back("no scaling fit for " + fam[f].label + ": " + e.what());
        }
    }
    const double lemma_slope = (2.0 - 2.0 * H) - 0.15;
    auto slope_check = [&](const std::string& label, bool with_r2) {
        if (!fits.count(label)) {
            r.check("slope_available_" + label, 0.0, ">=", 1.0);
            return;
        }
        r.check("slope_" + label, fits[label].slope, ">=", lemma_slope);
        if (with_r2) r.check("r2_" + label, fits[label].r2, ">=", 0.98);
    };
    if (primary_connected_no_singletons) slope_check("primary", true);
    slope_check("cycle4", true);
    for (std::size_t k = 0; k < sweep.size(); ++k) slope_check("nosingleton4_" + std::to_string(k), false);
    if (fits.count("singleton2")) r.check("abs_slope_singleton2", std::abs(fits["singleton2"].slope), "<=", 0.05);
    if (fits.count("pair2")) r.check("slope_pair2_bounded", fits["pair2"].slope, ">=", -0.05);

    // one-sided bounds with the constant fitted at the largest eps, factor 2 allowance thereafter
    auto ratio_family = [&](const std::string& name, const std::vector<double>& ratio) {
        std::vector<std::size_t> order(c.epsilons.size());
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c.epsilons[a] > c.epsilons[b]; });
        const double fitted = ratio[order.front()];
        r.add(0.0, name + "_fitted_constant", fitted, 0.0);
        for (std::size_t k = 1; k < order.size(); ++k) {
            const std::size_t j = order[k];
            r.add(c.epsilons[j], name, ratio[j], 0.0);
            r.check(name + "_eps=" + detail::fmt(c.epsilons[j]), ratio[j], "<=", 2.0 * fitted);
        }
    };
    {
        const auto red = reduce_singleton(fam[index_of("singleton_removal4")].diagram, 0, H);
        r.notes.push_back("singleton_removal4 reduces to " + red.reduced.to_string());
        std::vector<double> ratio;
        for (std::size_t j = 0; j < c.epsilons.size(); ++j) {
            const double reduced = jtilde_quadrature(red.reduced, c.epsilons[j], H, decay, 0.0, c.horizon);
            ratio.push_back(value(index_of("singleton_removal4"), j).value / (std::pow(c.epsilons[j], red.predicted_exponent) * reduced));
        }
        ratio_family("singleton_removal_ratio", ratio);
        if (fits.count("singleton_removal4"))
            r.check("slope_singleton_removal4", fits["singleton_removal4"].slope, ">=", red.predicted_exponent - 0.15);
    }
    for (const auto& [label, keep] : std::vector<std::pair<std::string, std::vector<int>>>{{"restriction4", {0, 1}}, {"restriction6", {0, 1, 2, 3}}}) {
        const auto sub = fam[index_of(label)].diagram.restricted(keep);
        r.notes.push_back(label + " restricts to " + sub.to_string());
        std::vector<double> ratio;
        for (std::size_t j = 0; j < c.epsilons.size(); ++j)
            ratio.push_back(value(index_of(label), j).value / jtilde_quadrature(sub, c.epsilons[j], H, decay, 0.0, c.horizon));
        ratio_family(label + "_ratio", ratio);
    }
    return r;
}

// (h) Gronwall and residue certificates against solved controlled equations on random instances.
ExperimentReport run_residue_bound(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, 1);
    const HolderExponents ex = detail::lemma_exponents(c.hurst);
    const std::vector<std::string> models{"averaging-sine", "averaging-rational"};
    struct Rep {
        bool ok = false;
        double sup_margin = 0.0, holder_margin = 0.0, residue_margin = 0.0, residue_sup_margin = 0.0;
    };
    // margin = log(bound) - log(measured); a violation is a negative margin
    static constexpr double big = std::numeric_limits<double>::max();
    auto margin = [](double log_bound, double measured) {
        return measured > 0.0 ? std::min(log_bound - std::log(measured), big) : big;
    };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        Engine eng(derive_seed(c.seed, {stream::instance, i}));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const ModelSpec model = make_catalogue_model(models[static_cast<std::size_t>(unit(eng) * 2.0) % 2], detail::make_ou(c));
        const double x0 = -1.0 + 2.0 * unit(eng);
        const double kappa = 0.5 + 1.5 * unit(eng);
        const double f_scale = 0.5 + 1.5 * unit(eng);
        const double y0 = gauss(eng);
        const double delta = std::pow(10.0, -3.0 + 2.0 * unit(eng));
        try {
            const FbmPath X = sampler.sample(derive_seed(c.seed, {stream::fbm, i}));
            const FbmPath F = sampler.sample(derive_seed(c.seed, {stream::limit_noise, i}));
            const FbmPath W = sampler.sample(derive_seed(c.seed, {stream::perturbation, i}));
            const HolderPath xbar = simulate_averaged(model, X, Eigen::VectorXd::Constant(1, x0));
            OperatorPath A = dfbar_along(model, xbar);
            OperatorPath At = A;
            for (std::size_t k = 0; k < grid.n_points(); ++k) {
                A.block(k) *= kappa;
                At.block(k) = A.block(k).array() + delta * (1.0 + grid.time(k));
            }
            const HolderPath f = F.path.scaled(f_scale);
            HolderPath ft = f;
            for (std::size_t k = 0; k < grid.n_points(); ++k) ft.at(k).array() += delta * grid.time(k);
            const HolderPath Xt = X.path + W.path.scaled(delta);
            const Eigen::VectorXd Y0 = Eigen::VectorXd::Constant(1, y0), Yt0 = Eigen::VectorXd::Constant(1, y0 + delta);
            YdeOptions opts;
            opts.blowup_threshold = default_blowup_threshold;
            const HolderPath Y = solve_controlled_yde(A, X.path, f, Y0, opts);
            const HolderPath Yt = solve_controlled_yde(At, Xt, ft, Yt0, opts);

            const HolderPath a_flat = A.flattened(), at_flat = At.flattened();
            GronwallInputs g;
            g.a_gamma = holder_norm(a_flat, ex.gamma);
            g.a_sup = A.sup_norm();
            g.x_beta = holder_norm(X.path, ex.beta);
            g.f_alpha = holder_norm(f, ex.alpha);
            g.y0 = std::abs(y0);
            g.horizon = c.horizon;
            g.exponents = ex;
            const BoundCertificate gc = gronwall_bound(g);
            out.sup_margin = margin(gc.log_sup, sup_norm(Y));
            out.holder_margin = margin(gc.log_holder, holder_norm(Y, ex.alpha));

            ResidueInputs q;
            q.a_gamma = g.a_gamma;
            q.a_sup = g.a_sup;
            q.x_beta = g.x_beta;
            q.at_gamma = holder_norm(at_flat, ex.gamma);
            q.at_sup = At.sup_norm();
            q.xt_beta = holder_norm(Xt, ex.beta);
            q.zt0 = std::abs(y0 + delta);
            q.zt_alpha = holder_norm(ft, ex.alpha);
            q.dz0 = delta;
            q.dz_alpha = holder_norm(f - ft, ex.alpha);
            q.dx_beta = holder_norm(X.path - Xt, ex.beta);
            q.da_gamma = holder_norm(a_flat - at_flat, ex.gamma);
            q.da_sup = delta * (1.0 + c.horizon);
            q.horizon = c.horizon;
            q.exponents = ex;
            const BoundCertificate rc = residue_bound(q);
            out.residue_margin = margin(rc.log_holder, holder_norm(Y - Yt, ex.alpha));
            out.residue_sup_margin = margin(rc.log_sup, sup_norm(Y - Yt));
            out.ok = true;
        } catch (const BlowUpError&) {
        }
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    const std::vector<std::pair<std::string, double Rep::*>> fields{{"gronwall_sup", &Rep::sup_margin},
                                                                    {"gronwall_holder", &Rep::holder_margin},
                                                                    {"residue_holder", &Rep::residue_margin},
                                                                    {"residue_sup", &Rep::residue_sup_margin}};
    for (const auto& [name, field] : fields) {
        double worst = big;
        std::size_t violations = 0;
        for (const auto& rep : reps)
            if (rep.ok) {
                worst = std::min(worst, rep.*field);
                if (rep.*field < 0.0) ++violations;
            }
        r.add(0.0, "min_log_margin_" + name, worst, 0.0);
        r.add(0.0, "violations_" + name, static_cast<double>(violations), 0.0);
        r.check("violations_" + name, static_cast<double>(violations), "==", 0.0);
    }
    r.notes.push_back("Measured Hoelder norms are discrete (grid) norms; bounds use the same discrete norms as inputs.");
    return r;
}

// (i) W1 of terminal values of the averaged equation under the driver scaling X -> (1 + delta) X.
// The driver distance W1_beta(X, (1 + delta) X) equals delta E|X|_beta: the scaling coupling attains it and
// |.|_beta is a 1-Lipschitz test function.
ExperimentReport run_rde_wasserstein_stability(const ExperimentConfig& c) {
    ExperimentReport r = detail::start_report(c);
    const ModelSpec model = detail::make_model(c);
    const TimeGrid grid = detail::make_grid(c);
    const HurstParameter H(c.hurst);
    const FbmSampler sampler(grid, H, model.driver_dim());
    const double beta = detail::lemma_exponents(c.hurst).beta;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(model.state_dim(), c.x0);
    struct Rep {
        bool ok = false;
        double y = 0.0, x_beta = 0.0;
        std::vector<double> yt;
    };
    const auto reps = parallel_map<Rep>(c.paths, c.workers, [&](std::size_t i) {
        Rep out;
        try {
            const FbmPath X = sampler.sample(detail::fbm_seed(c, i));
            out.y = solve_averaged(model, X.path, x0).terminal()(0);
            out.x_beta = holder_norm(X.path, beta);
            for (double d : c.perturbations) out.yt.push_back(solve_averaged(model, X.path.scaled(1.0 + d), x0).terminal()(0));
            out.ok = true;
        } catch (const BlowUpError&) {
        }
        return out;
    });
    if (!detail::record_replicates(r, reps.size(), detail::count_failed(reps))) return r;
    std::vector<const Rep*> ok;
    for (const auto& rep : reps)
        if (rep.ok) ok.push_back(&rep);
    std::vector<double> y, xb;
    for (const Rep* rep : ok) y.push_back(rep->y), xb.push_back(rep->x_beta);
    const Estimate xmean = sample_mean(xb);
    r.add(0.0, "mean_driver_holder_norm", xmean.value, xmean.std_error);
    std::vector<double> ratio, w1s;
    for (std::size_t k = 0; k < c.perturbations.size(); ++k) {
        const double d = c.perturbations[k];
        std::vector<double> yt;
        for (const Rep* rep : ok) yt.push_back(rep->yt[k]);
        const double driver = d * xmean.value;
        const double w1 = w1_distance(y, yt);
        // paired bootstrap: rows keep the coupling between the two samples
        std::vector<double> by(y.size()), byt(y.size());
        const double se = bootstrap_stderr(
            y.size(),
            [&](const std::vector<std::size_t>& rows) {
                for (std::size_t i = 0; i < rows.size(); ++i) by[i] = y[rows[i]], byt[i] = yt[rows[i]];
                return w1_distance(by, byt);
            },
            detail::stat_seed(c, k), c.resamples);
        r.add(d, "w1_terminal", w1, se);
        r.add(d, "driver_distance_beta", driver, d * xmean.std_error);
        r.add(d, "ratio_w1_to_driver_distance", w1 / driver, se / driver);
        r.curves["w1_terminal"].emplace_back(d, w1);
        ratio.push_back(w1 / driver);
        w1s.push_back(w1);
    }
    const std::size_t kmax = static_cast<std::size_t>(std::max_element(c.perturbations.begin(), c.perturbations.end()) - c.perturbations.begin());
    const double fitted = ratio[kmax];
    r.add(0.0, "fitted_constant", fitted, 0.0);
    for (std::size_t k = 0; k < ratio.size(); ++k)
        if (k != kmax) r.check("ratio_delta=" + detail::fmt(c.perturbations[k]), ratio[k], "<=", 2.0 * fitted);
    try {
        const ScalingFit fit = convergence_regression(c.perturbations, w1s);
        r.add(0.0, "w1_slope_in_delta", fit.slope, fit.slope_stderr);
    } catch (const std::invalid_argument& e) {
        r.notes.push_back(std::string("no slope fit: ") + e.what());
    }
    r.notes.push_back("epsilon column holds the perturbation size delta; the perturbed driver is (1 + delta) X and the "
                      "driver distance delta * E|X|_beta is exact for this pair of laws.");
    return r;
}

ExperimentReport run_experiment(ExperimentConfig c) {
    c.experiment = canonical_experiment(c.experiment);
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport r;
    const auto& e = c.experiment;
    if (e == "averaging-convergence") r = run_averaging_convergence(c);
    else if (e == "homogenization-covariance") r = run_homogenization_covariance(c);
    else if (e == "fluctuation-theorem") r = run_fluctuation_theorem(c);
    else if (e == "lift-convergence") r = run_lift_convergence(c);
    else if (e == "cross-independence") r = run_cross_independence(c);
    else if (e == "cumulant-gaussianity") r = run_cumulant_gaussianity(c);
    else if (e == "jtilde-scaling") r = run_jtilde_scaling(c);
    else if (e == "residue-bound") r = run_residue_bound(c);
    else r = run_rde_wasserstein_stability(c);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace fracfluct::harness
