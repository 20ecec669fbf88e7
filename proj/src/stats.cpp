#include "hermrand/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hermrand/error.hpp"
#include "hermrand/rng.hpp"

namespace hermrand {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kInsufficientSamples, "quantile of an empty sample");
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> data, double q) {
  std::sort(data.begin(), data.end());
  return quantile_sorted(data, q);
}

double median(std::vector<double> data) { return quantile(std::move(data), 0.5); }

double mean(std::span<const double> data) {
  if (data.empty()) throw Error(ErrorCode::kInsufficientSamples, "mean of an empty sample");
  return std::accumulate(data.begin(), data.end(), 0.0) / data.size();
}

namespace {
template <class Stat>
Estimate bootstrap(std::span<const double> data, int resamples, std::uint64_t seed, Stat stat) {
  Estimate e;
  std::vector<double> copy(data.begin(), data.end());
  e.value = stat(copy);
  std::vector<double> stats(resamples);
  std::vector<double> buf(data.size());
  for (int b = 0; b < resamples; ++b) {
    Stream rng(seed, static_cast<std::uint64_t>(b), 0xb007);
    for (auto& v : buf) v = data[rng() % data.size()];
    stats[b] = stat(buf);
  }
  std::sort(stats.begin(), stats.end());
  e.ci_lo = quantile_sorted(stats, 0.025);
  e.ci_hi = quantile_sorted(stats, 0.975);
  return e;
}
}  // namespace

Estimate bootstrap_median(std::span<const double> data, int resamples, std::uint64_t seed) {
  return bootstrap(data, resamples, seed, [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
  });
}

Estimate bootstrap_mean(std::span<const double> data, int resamples, std::uint64_t seed) {
  return bootstrap(data, resamples, seed, [](std::vector<double>& v) { return mean(v); });
}

double ks_distance(std::vector<double> data, const std::function<double(double)>& cdf) {
  if (data.empty()) throw Error(ErrorCode::kInsufficientSamples, "KS distance of an empty sample");
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = cdf(data[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double binomial_se(double p, std::size_t n) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)); }

LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                                 bool intercept) {
  if (x.size() != y.size() || (!w.empty() && w.size() != x.size())) {
    throw Error(ErrorCode::kLengthMismatch, "fit inputs differ in length");
  }
  auto wt = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
  LinearFit fit;
  fit.points = x.size();
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += wt(i);
    sx += wt(i) * x[i];
    sy += wt(i) * y[i];
  }
  if (!(sw > 0.0)) throw Error(ErrorCode::kInsufficientSamples, "no positive weights");
  const double mx = intercept ? sx / sw : 0.0;
  const double my = intercept ? sy / sw : 0.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += wt(i) * (x[i] - mx) * (x[i] - mx);
    sxy += wt(i) * (x[i] - mx) * (y[i] - my);
    syy += wt(i) * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-24 * sw * std::max(1.0, mx * mx))) throw Error(ErrorCode::kDegenerateAbscissa, "abscissae have no spread");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += wt(i) * r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::string to_string(ScalingModel m) {
  switch (m) {
    case ScalingModel::kSqrtLog: return "sqrt-log";
    case ScalingModel::kPowerLaw: return "power-law";
    case ScalingModel::kSqrtR: return "sqrt-r";
  }
  return "unknown";
}

ScalingModel scaling_model_from_string(const std::string& s) {
  if (s == "sqrt-log") return ScalingModel::kSqrtLog;
  if (s == "power-law") return ScalingModel::kPowerLaw;
  if (s == "sqrt-r") return ScalingModel::kSqrtR;
  throw Error(ErrorCode::kConfig, "unknown scaling model '" + s + "'");
}

ScalingFit scaling_fit(std::span<const ScalingPoint> points, ScalingModel model) {
  if (points.size() < 4) throw Error(ErrorCode::kInsufficientSamples, "scaling fit needs at least 4 points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.abscissa > 0.0) || !(p.statistic > 0.0)) throw Error(ErrorCode::kDomain, "scaling fit needs positive data");
  }
  ScalingFit out;
  out.model = model;
  if (model == ScalingModel::kSqrtLog) {
    for (const auto& p : points) {
      if (!(p.abscissa > 1.0)) throw Error(ErrorCode::kDegenerateAbscissa, "sqrt-log model needs abscissae > 1");
      x.push_back(std::sqrt(std::log(p.abscissa)));
      y.push_back(p.statistic);
    }
    const auto fit = weighted_least_squares(x, y, {}, false);
    out.constant = fit.slope;
    out.slope = 0.5;
    out.r2 = fit.r2;
    return out;
  }
  for (const auto& p : points) {
    x.push_back(std::log(p.abscissa));
    y.push_back(std::log(p.statistic));
  }
  const auto fit = weighted_least_squares(x, y, {}, true);
  out.constant = std::exp(fit.intercept);
  out.slope = fit.slope;
  out.r2 = fit.r2;
  return out;
}

TailFit exponential_tail_fit(std::span<const double> x, std::span<const double> p_hat, std::size_t samples,
                             std::size_t min_exceedances) {
  if (x.size() != p_hat.size()) throw Error(ErrorCode::kLengthMismatch, "tail fit inputs differ in length");
  TailFit out;
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = p_hat[i];
    const double count = p * samples;
    if (count + 1e-9 < static_cast<double>(min_exceedances) || p >= 1.0 || x[i] <= 0.0) continue;
    out.used.push_back(i);
    xs.push_back(x[i]);
    ys.push_back(-std::log(p));
    ws.push_back(samples * p / (1.0 - p));
  }
  if (xs.size() < 2) throw Error(ErrorCode::kInsufficientSamples, "fewer than two tail bins with enough exceedances");
  const auto fit = weighted_least_squares(xs, ys, ws, false);
  out.slope = fit.slope;
  out.r2 = fit.r2;
  return out;
}

}  // namespace hermrand
