#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hermrand {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::vector<double> data, double q);
double median(std::vector<double> data);
double mean(std::span<const double> data);

struct Estimate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Sample statistic with a 95% bootstrap percentile interval.
Estimate bootstrap_median(std::span<const double> data, int resamples, std::uint64_t seed);
Estimate bootstrap_mean(std::span<const double> data, int resamples, std::uint64_t seed);

/// sup_t |F_n(t) - F(t)| for a continuous reference CDF.
double ks_distance(std::vector<double> data, const std::function<double(double)>& cdf);

/// Binomial standard error sqrt(p(1-p)/n).
double binomial_se(double p, std::size_t n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Centered R^2 with an intercept; uncentered (regression through the
  /// origin) without one.
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares of y on x. Throws kDegenerateAbscissa when x has no spread.
LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                                 bool intercept);

enum class ScalingModel { kSqrtLog, kPowerLaw, kSqrtR };

std::string to_string(ScalingModel m);
ScalingModel scaling_model_from_string(const std::string& s);

struct ScalingPoint {
  double abscissa = 0.0;
  double statistic = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ScalingFit {
  ScalingModel model = ScalingModel::kPowerLaw;
  /// sqrt-log: C in y = C sqrt(log x). power-law / sqrt-r: prefactor exp(intercept).
  double constant = 0.0;
  /// power-law / sqrt-r: exponent of x; sqrt-log: 0.5 by construction.
  double slope = 0.0;
  double r2 = 0.0;
};

/// sqrt-log: least squares of y on sqrt(log x) through the origin;
/// power-law and sqrt-r: least squares of log y on log x. Needs >= 4 points.
ScalingFit scaling_fit(std::span<const ScalingPoint> points, ScalingModel model);

struct TailFit {
  double slope = 0.0;  ///< c in -log P = c x
  double r2 = 0.0;
  std::vector<std::size_t> used;  ///< indices of bins kept
};

/// Weighted fit of -log P_hat = c x through the origin; binomial weights
/// M P / (1 - P); bins with fewer than `min_exceedances` dropped. Throws
/// kInsufficientSamples if fewer than two bins remain.
TailFit exponential_tail_fit(std::span<const double> x, std::span<const double> p_hat, std::size_t samples,
                             std::size_t min_exceedances = 20);

}  // namespace hermrand
