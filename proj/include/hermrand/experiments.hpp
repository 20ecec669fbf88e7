#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hermrand/config.hpp"

namespace hermrand {

/// One row of an experiment's flat output. `series` separates the curves an
/// experiment produces (empirical CCDF vs exact oracle, median vs mean, ...).
struct ReportRow {
  std::string series;
  double abscissa = 0.0;
  double statistic = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_samples = 0;
};

struct FitReport {
  std::string experiment;
  std::string model;
  std::vector<ReportRow> rows;
  /// Fitted constants and R^2.
  nlohmann::ordered_json fit = nlohmann::ordered_json::object();
  /// Experiment-specific checks and side quantities.
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  /// Set when a fit had too few usable bins; rows are still valid.
  bool insufficient = false;
  std::string insufficient_reason;
  std::uint64_t seed = 0;
  std::string config_hash;
  double runtime_seconds = 0.0;

  /// Everything except the runtime is a pure function of (config, seed).
  nlohmann::ordered_json to_json(bool include_timing = true) const;
  const ReportRow* find(const std::string& series, double abscissa) const;
  std::vector<ReportRow> series(const std::string& name) const;
};

/// |u(x0)| tails on the sphere: empirical CCDF over t = tau sqrt(e_L), exact
/// oracle for isotropic Gaussian laws, exponential fits in N t^2 / e_L.
FitReport tail_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Median, mean and spread of a norm functional, optionally over an r-grid.
FitReport norm_statistics_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Per-level medians of sup <x>^{theta/2}|u| h^{-(d-theta)/4}, sqrt-log fit
/// and the fitted [C0, C1] sqrt(log k) band.
FitReport linfty_scaling_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Medians of ||u||_{L^{r, theta(r/2-1)}} h^{-beta/2} across r, log-log fit in r.
FitReport lr_median_scaling_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Sup-norm profile of random (and tensor) eigenbases across levels.
FitReport basis_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// P(||u||_{W^{s,r}} >= K ||u||_{B^0_{2,1}}) for a truncated dyadic series.
FitReport besov_sobolev_gain_experiment(const ExperimentConfig& cfg, int jobs = 1);

FitReport lipschitz_concentration_experiment(const ExperimentConfig& cfg, int jobs = 1);
FitReport mean_median_gap_experiment(const ExperimentConfig& cfg, int jobs = 1);
FitReport norm_concentration_experiment(const ExperimentConfig& cfg, int jobs = 1);
FitReport paley_zygmund_khinchin_check(const ExperimentConfig& cfg, int jobs = 1);

/// Dispatch on cfg.experiment (and cfg.study for "concentration").
FitReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// sup_x (<x>^{2w} e_x)^{1/2} over the window; e_x is radial, so the search
/// runs along one axis.
double weighted_spectral_sup(const SpectralWindow& w, double weight_exponent);

/// Lipschitz constant on the sphere of the functional in cfg (before scaling).
double lipschitz_bound(const SpectralWindow& w, const FunctionalSpec& f);

}  // namespace hermrand
