#pragma once

#include "config.hpp"
#include "report.hpp"

namespace fracfluct::harness {

// Each runner executes one experiment for a validated config and returns its report;
// results depend only on the config echo, never on the worker count.
ExperimentReport run_averaging_convergence(const ExperimentConfig& c);
ExperimentReport run_homogenization_covariance(const ExperimentConfig& c);
ExperimentReport run_cross_independence(const ExperimentConfig& c);
ExperimentReport run_fluctuation_theorem(const ExperimentConfig& c);
ExperimentReport run_lift_convergence(const ExperimentConfig& c);
ExperimentReport run_cumulant_gaussianity(const ExperimentConfig& c);
ExperimentReport run_jtilde_scaling(const ExperimentConfig& c);
ExperimentReport run_residue_bound(const ExperimentConfig& c);
ExperimentReport run_rde_wasserstein_stability(const ExperimentConfig& c);

// Dispatch by full name or letter alias; canonicalizes, validates and records wall time.
ExperimentReport run_experiment(ExperimentConfig c);

}  // namespace fracfluct::harness
