#include "hermrand/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <boost/random/normal_distribution.hpp>

#include "hermrand/basis.hpp"
#include "hermrand/error.hpp"
#include "hermrand/grid.hpp"
#include "hermrand/norms.hpp"
#include "hermrand/parallel.hpp"
#include "hermrand/rng.hpp"
#include "hermrand/stats.hpp"

namespace hermrand {

namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

ojson num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

FitReport start_report(const ExperimentConfig& cfg, std::string model) {
  FitReport r;
  r.experiment = cfg.experiment == "concentration" ? "concentration/" + cfg.study : cfg.experiment;
  r.model = std::move(model);
  r.seed = cfg.seed;
  r.config_hash = cfg.hash;
  return r;
}

ReportRow proportion_row(std::string series, double x, std::size_t hits, std::size_t m) {
  const double p = static_cast<double>(hits) / static_cast<double>(m);
  const double se = binomial_se(p, m);
  return {std::move(series), x, p, std::max(0.0, p - 1.96 * se), std::min(1.0, p + 1.96 * se), m};
}

ReportRow estimate_row(std::string series, double x, const Estimate& e, std::size_t m) {
  return {std::move(series), x, e.value, e.ci_lo, e.ci_hi, m};
}

bool is_gaussian(const RandomLaw& law) {
  return law.kind() == LawKind::kComplexGaussian || law.kind() == LawKind::kRealGaussian;
}

bool is_isotropic(const CoefficientProfile& p) {
  const auto rep = validate_profile(p.gamma, p.size());
  return std::abs(rep.k0 - 1.0) < 1e-12 && std::abs(rep.k1 - 1.0) < 1e-12;
}

/// Coefficients of sample i, normalized onto the unit sphere.
std::vector<std::complex<double>> sphere_coefficients(const CoefficientProfile& prof, const RandomLaw& law,
                                                      std::uint64_t seed, std::size_t i) {
  auto c = sample_coefficients(prof, law, seed, i);
  return normalize_to_sphere(c, seed, i).coeffs;
}

/// P(|u_1| >= t) for u uniform on the unit sphere of C^n (complex) or R^n (real).
double sphere_marginal_ccdf(std::uint64_t n, double t, bool complex) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  if (complex) return uniform_marginal_ccdf(n, t);
  if (n == 1) return 1.0;
  return boost::math::ibeta((static_cast<double>(n) - 1.0) / 2.0, 0.5, 1.0 - t * t);
}

/// Bins usable for an exponential tail fit: 0 < x and 0 < P < 1.
struct TailBins {
  std::vector<double> x, p;
  std::vector<std::size_t> source;
};

TailBins tail_bins(const std::vector<double>& x, const std::vector<double>& p, double x_max = kInfinity) {
  TailBins b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && x[i] <= x_max && p[i] > 0.0 && p[i] < 1.0) {
      b.x.push_back(x[i]);
      b.p.push_back(p[i]);
      b.source.push_back(i);
    }
  }
  return b;
}

void mark_insufficient(FitReport& r, const Error& e) {
  if (e.code() != ErrorCode::kInsufficientSamples && e.code() != ErrorCode::kDegenerateAbscissa) throw e;
  r.insufficient = true;
  if (!r.insufficient_reason.empty()) r.insufficient_reason += "; ";
  r.insufficient_reason += e.what();
}

/// Smallest y_i / (c x_i) over the bins a through-origin fit used.
double min_ratio_to_fit(const TailFit& f, const TailBins& b) {
  double m = kInfinity;
  for (std::size_t u : f.used) m = std::min(m, -std::log(b.p[u]) / (f.slope * b.x[u]));
  return m;
}

struct NormPlan {
  double r = 2.0;
  double s = 0.0;
  bool sobolev = false;
  double sobolev_order = 0.0;
  std::unique_ptr<QuadratureGrid> grid;
  std::unique_ptr<NormEvaluator> eval;
};

/// Grid and evaluator for one norm functional of expansions up to `level`.
std::unique_ptr<NormPlan> make_norm_plan(int dim, int level, const std::string& kind, double r, double s) {
  auto p = std::make_unique<NormPlan>();
  p->r = kind == "sup-norm" ? kInfinity : r;
  if (kind == "sobolev-norm") {
    p->sobolev = true;
    p->sobolev_order = s;
    p->s = 0.0;
  } else {
    p->s = s;
  }
  p->grid = std::make_unique<QuadratureGrid>(lp_grid(dim, level, p->r, p->s));
  p->eval = std::make_unique<NormEvaluator>(*p->grid, level);
  return p;
}

double eval_norm(const NormPlan& plan, const std::vector<MultiIndex>& idx, std::vector<std::complex<double>> c) {
  if (plan.sobolev) {
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::pow(idx[j].eigenvalue(), plan.sobolev_order / 2.0);
  }
  return plan.eval->weighted(idx, c, NormSpec{plan.r, plan.s}).value;
}

std::vector<double> sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

ojson fit_json(const LinearFit& f) { return ojson{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; }

}  // namespace

ojson FitReport::to_json(bool include_timing) const {
  ojson j;
  j["experiment"] = experiment;
  j["model"] = model;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["version"] = HERMRAND_VERSION;
  ojson rs = ojson::array();
  for (const auto& r : rows) {
    rs.push_back(ojson{{"series", r.series},
                       {"abscissa", num(r.abscissa)},
                       {"statistic", num(r.statistic)},
                       {"ci_lo", num(r.ci_lo)},
                       {"ci_hi", num(r.ci_hi)},
                       {"n_samples", r.n_samples}});
  }
  j["rows"] = std::move(rs);
  j["fit"] = fit;
  j["diagnostics"] = diagnostics;
  j["warnings"] = warnings;
  j["insufficient"] = insufficient;
  if (insufficient) j["insufficient_reason"] = insufficient_reason;
  if (include_timing) j["runtime_seconds"] = runtime_seconds;
  return j;
}

const ReportRow* FitReport::find(const std::string& s, double abscissa) const {
  for (const auto& r : rows)
    if (r.series == s && r.abscissa == abscissa) return &r;
  return nullptr;
}

std::vector<ReportRow> FitReport::series(const std::string& name) const {
  std::vector<ReportRow> out;
  for (const auto& r : rows)
    if (r.series == name) out.push_back(r);
  return out;
}

double weighted_spectral_sup(const SpectralWindow& w, double weight_exponent) {
  const double lambda = 2.0 * w.max_level() + w.dim;
  const double radius = 1.5 * std::sqrt(lambda) + 6.0;
  const double step = std::numbers::pi / (20.0 * std::sqrt(lambda));
  const int n = static_cast<int>(std::ceil(radius / step));
  std::vector<double> x(w.dim, 0.0);
  auto f = [&](double rho) {
    x[0] = rho;
    return std::pow(1.0 + rho * rho, weight_exponent) * spectral_function(w, x);
  };
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(i * step);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  // Golden-section search on the bracketing cells.
  double lo = std::max(0.0, (best - 1) * step), hi = (best + 1) * step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return std::sqrt(std::max({best_v, fc, fd}));
}

double lipschitz_bound(const SpectralWindow& w, const FunctionalSpec& f) {
  if (f.kind == "coordinate") return 1.0;
  if (f.kind == "point") return std::sqrt(spectral_function(w, f.x0));
  const double lambda_max = 2.0 * w.max_level() + w.dim;
  double r = f.r, s = f.s, pre = 1.0;
  if (f.kind == "sobolev-norm") {
    pre = std::pow(lambda_max, s / 2.0);
    s = 0.0;
  }
  if (f.kind == "sup-norm" || std::isinf(r)) return pre * weighted_spectral_sup(w, s);
  if (r == 2.0) {
    // |x|^2 <= H on the window, so <x>^s <= (1 + lambda_max)^{s/2} for s in [0, 2].
    if (s < 0.0 || s > 2.0) throw Error(ErrorCode::kConfig, "no Lipschitz bound for L^{2,s} with s outside [0, 2]");
    return pre * std::pow(1.0 + lambda_max, s / 4.0);
  }
  if (r < 2.0) throw Error(ErrorCode::kConfig, "no Lipschitz bound for r < 2");
  return pre * std::pow(weighted_spectral_sup(w, s / (r - 2.0)), 1.0 - 2.0 / r);
}

FitReport tail_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "exponential-tail");
  const auto w = cfg.window.build();
  const auto prof = cfg.profile.build(w);
  const auto& x0 = cfg.functional.x0;
  std::vector<double> phi(prof.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = eigenfunction_eval(prof.indices[j], x0);
  const double e_l = spectral_function(w, x0);
  if (!(e_l > 0.0)) throw Error(ErrorCode::kConfig, "the spectral function vanishes at x0");
  const std::size_t m = cfg.samples;
  const auto n = static_cast<double>(w.n_h);

  std::vector<double> tau(m);
  parallel_for(
      m, jobs,
      [&](std::size_t i) {
        const auto c = sample_coefficients(prof, cfg.law, cfg.seed, i);
        double norm_sq = 0.0;
        std::complex<double> z = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
          norm_sq += std::norm(c[j]);
          z += c[j] * phi[j];
        }
        if (!(norm_sq > 0.0)) throw Error(ErrorCode::kZeroVector, "sample drew the zero vector");
        tau[i] = std::abs(z) / std::sqrt(norm_sq * e_l);
      },
      256);
  const auto sorted = sorted_copy(tau);

  std::vector<double> xs, ps;
  for (double tg : cfg.tau_grid) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), tg) - sorted.begin();
    const std::size_t hits = m - static_cast<std::size_t>(below);
    rep.rows.push_back(proportion_row("ccdf", tg * std::sqrt(e_l), hits, m));
    xs.push_back(n * tg * tg);
    ps.push_back(rep.rows.back().statistic);
  }
  std::size_t over_cap = 0;
  for (double t : tau) over_cap += t > 1.0 + 1e-12;
  rep.diagnostics["e_L"] = e_l;
  rep.diagnostics["N"] = w.n_h;
  rep.diagnostics["tau_grid"] = cfg.tau_grid;
  rep.diagnostics["x_grid"] = xs;
  rep.diagnostics["max_tau"] = sorted.back();
  rep.diagnostics["cap_violations"] = over_cap;

  const bool oracle = is_isotropic(prof) && is_gaussian(cfg.law);
  if (oracle) {
    const bool complex = cfg.law.is_complex();
    double max_z = 0.0;
    for (std::size_t g = 0; g < cfg.tau_grid.size(); ++g) {
      const double phi_t = sphere_marginal_ccdf(w.n_h, cfg.tau_grid[g], complex);
      const double se = binomial_se(phi_t, m);
      rep.rows.push_back({"oracle", cfg.tau_grid[g] * std::sqrt(e_l), phi_t, phi_t, phi_t, m});
      const double diff = std::abs(ps[g] - phi_t);
      if (se > 0.0) max_z = std::max(max_z, diff / se);
      else if (diff > 0.0) max_z = kInfinity;
    }
    const double ks = ks_distance(tau, [&](double t) { return 1.0 - sphere_marginal_ccdf(w.n_h, t, complex); });
    rep.diagnostics["oracle"] = complex ? "(1 - tau^2)^(N-1)" : "I_{1-tau^2}((N-1)/2, 1/2)";
    rep.diagnostics["ks_distance"] = ks;
    rep.diagnostics["ks_band"] = 1.63 / std::sqrt(static_cast<double>(m));
    rep.diagnostics["max_abs_z"] = num(max_z);
    rep.diagnostics["within_3se"] = max_z <= 3.0;
  }

  try {
    const auto all = tail_bins(xs, ps);
    const auto up = exponential_tail_fit(all.x, all.p, m);
    rep.fit["c_upper"] = up.slope;
    rep.fit["r2_upper"] = up.r2;
    rep.fit["bins_upper"] = up.used.size();
    rep.diagnostics["min_ratio_to_upper_fit"] = min_ratio_to_fit(up, all);
    if (up.used.size() < all.x.size()) {
      rep.warnings.push_back("dropped " + std::to_string(all.x.size() - up.used.size()) +
                             " bins with fewer than 20 exceedances");
    }
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }
  const double tau_lo = is_gaussian(cfg.law) ? cfg.epsilon0 : cfg.epsilon0 / std::sqrt(n);
  rep.fit["lower_range_tau_max"] = tau_lo;
  try {
    const auto low = tail_bins(xs, ps, n * tau_lo * tau_lo);
    const auto lf = exponential_tail_fit(low.x, low.p, m);
    rep.fit["c_lower"] = lf.slope;
    rep.fit["r2_lower"] = lf.r2;
    rep.fit["bins_lower"] = lf.used.size();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientSamples) throw;
    rep.warnings.push_back("lower-range fit skipped: fewer than two usable bins with tau <= " + std::to_string(tau_lo));
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport norm_statistics_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "descriptive");
  const auto w = cfg.window.build();
  const auto prof = cfg.profile.build(w);
  const auto& f = cfg.functional;
  const std::size_t m = cfg.samples;
  const bool linear = f.kind == "point" || f.kind == "coordinate";
  std::vector<double> rs = cfg.r_grid.empty() || linear ? std::vector<double>{f.r} : cfg.r_grid;

  std::vector<std::unique_ptr<NormPlan>> plans;
  if (!linear)
    for (double r : rs) plans.push_back(make_norm_plan(w.dim, w.max_level(), f.kind, r, f.s));
  std::vector<double> phi;
  if (f.kind == "point") {
    for (const auto& j : prof.indices) phi.push_back(eigenfunction_eval(j, f.x0));
  }

  std::vector<std::vector<double>> values(rs.size(), std::vector<double>(m));
  parallel_for(m, jobs, [&](std::size_t i) {
    const auto c = sphere_coefficients(prof, cfg.law, cfg.seed, i);
    if (f.kind == "coordinate") {
      values[0][i] = f.scale * std::abs(c[0]);
    } else if (f.kind == "point") {
      std::complex<double> z = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) z += c[j] * phi[j];
      values[0][i] = f.scale * std::abs(z);
    } else {
      for (std::size_t a = 0; a < rs.size(); ++a) values[a][i] = f.scale * eval_norm(*plans[a], prof.indices, c);
    }
  });

  ojson per_r = ojson::array();
  for (std::size_t a = 0; a < rs.size(); ++a) {
    const auto sorted = sorted_copy(values[a]);
    const auto med = bootstrap_median(values[a], cfg.bootstrap, derive_seed(cfg.seed, 2 * a));
    const auto avg = bootstrap_mean(values[a], cfg.bootstrap, derive_seed(cfg.seed, 2 * a + 1));
    rep.rows.push_back(estimate_row("median", rs[a], med, m));
    rep.rows.push_back(estimate_row("mean", rs[a], avg, m));
    per_r.push_back(ojson{{"r", num(rs[a])},
                          {"iqr", quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)},
                          {"q05", quantile_sorted(sorted, 0.05)},
                          {"q95", quantile_sorted(sorted, 0.95)},
                          {"min", sorted.front()},
                          {"max", sorted.back()},
                          {"relative_gap", std::abs(med.value - avg.value) / med.value}});
  }
  rep.diagnostics["N"] = w.n_h;
  rep.diagnostics["per_r"] = std::move(per_r);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport lr_median_scaling_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "sqrt-r");
  const auto w = cfg.window.build();
  const auto prof = cfg.profile.build(w);
  const std::size_t m = cfg.samples;
  const double theta = cfg.theta;
  const double h = w.h;

  std::vector<std::unique_ptr<NormPlan>> plans;
  for (double r : cfg.r_grid) {
    const double s = std::isinf(r) ? theta / 2.0 : theta * (r / 2.0 - 1.0);
    plans.push_back(make_norm_plan(w.dim, w.max_level(), "weighted-norm", r, s));
  }
  std::vector<std::vector<double>> values(cfg.r_grid.size(), std::vector<double>(m));
  parallel_for(m, jobs, [&](std::size_t i) {
    const auto c = sphere_coefficients(prof, cfg.law, cfg.seed, i);
    for (std::size_t a = 0; a < plans.size(); ++a) values[a][i] = eval_norm(*plans[a], prof.indices, c);
  });

  std::vector<ScalingPoint> pts;
  ojson raw = ojson::array();
  for (std::size_t a = 0; a < cfg.r_grid.size(); ++a) {
    const double r = cfg.r_grid[a];
    const double beta = beta_exponent(w.dim, r, theta);
    const double norm = std::pow(h, -beta / 2.0);
    std::vector<double> scaled(values[a]);
    for (auto& v : scaled) v *= norm;
    const auto med = bootstrap_median(scaled, cfg.bootstrap, derive_seed(cfg.seed, a));
    rep.rows.push_back(estimate_row("normalized_median", r, med, m));
    rep.rows.push_back({"raw_median", r, median(values[a]), 0.0, 0.0, m});
    rep.rows.back().ci_lo = med.ci_lo / norm;
    rep.rows.back().ci_hi = med.ci_hi / norm;
    pts.push_back({r, med.value, med.ci_lo, med.ci_hi});
    raw.push_back(ojson{{"r", num(r)}, {"beta", beta}, {"h_power", norm}, {"mean", mean(values[a])}});
  }
  rep.diagnostics["h"] = h;
  rep.diagnostics["N"] = w.n_h;
  rep.diagnostics["per_r"] = std::move(raw);
  try {
    const auto fit = scaling_fit(pts, ScalingModel::kSqrtR);
    rep.fit["slope"] = fit.slope;
    rep.fit["constant"] = fit.constant;
    rep.fit["r2"] = fit.r2;
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport linfty_scaling_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "sqrt-log");
  const int d = cfg.window.dim;
  const double theta = cfg.theta;
  const std::size_t m = cfg.samples;

  struct Level {
    int k;
    std::vector<double> sorted;
    double cap;
  };
  std::vector<Level> levels;
  std::vector<ScalingPoint> pts;
  ojson per_k = ojson::array();
  for (std::size_t a = 0; a < cfg.k_grid.size(); ++a) {
    const int k = cfg.k_grid[a];
    const auto w = single_level_window(d, k);
    const auto prof = cfg.profile.build(w);
    const auto grid = sup_grid(d, k);
    const NormEvaluator eval(grid, k);
    const double factor = std::pow(w.h, -(d - theta) / 4.0);
    const double cap = weighted_spectral_sup(w, theta / 2.0) * factor;
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
    std::vector<double> v(m);
    parallel_for(m, jobs, [&](std::size_t i) {
      const auto c = sphere_coefficients(prof, cfg.law, seed, i);
      v[i] = eval.weighted(prof.indices, c, NormSpec{kInfinity, theta / 2.0}).value * factor;
    });
    const auto med = bootstrap_median(v, cfg.bootstrap, derive_seed(seed, 0xb00));
    auto sorted = sorted_copy(v);
    std::size_t over = 0;
    for (double x : v) over += x > cap * (1.0 + 1e-9);
    rep.rows.push_back(estimate_row("median", k, med, m));
    const double q_lo = quantile_sorted(sorted, 0.005), q_hi = quantile_sorted(sorted, 0.995);
    rep.rows.push_back({"q005", static_cast<double>(k), q_lo, q_lo, q_lo, m});
    rep.rows.push_back({"q995", static_cast<double>(k), q_hi, q_hi, q_hi, m});
    rep.rows.push_back({"cap", static_cast<double>(k), cap, cap, cap, m});
    per_k.push_back(ojson{{"k", k},
                          {"h", w.h},
                          {"N", w.n_h},
                          {"grid_points", grid.size()},
                          {"max", sorted.back()},
                          {"cap", cap},
                          {"cap_violations", over}});
    if (k >= 2) pts.push_back({static_cast<double>(k), med.value, med.ci_lo, med.ci_hi});
    levels.push_back({k, std::move(sorted), cap});
  }
  if (pts.size() < levels.size()) rep.warnings.push_back("levels k < 2 left out of the sqrt-log fit");
  try {
    const auto fit = scaling_fit(pts, ScalingModel::kSqrtLog);
    rep.fit["C"] = fit.constant;
    rep.fit["r2"] = fit.r2;
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }

  // Fitted band: the extreme per-level quantiles define [C0, C1] sqrt(log k).
  double c0 = kInfinity, c1 = 0.0;
  for (const auto& l : levels) {
    if (l.k < 2) continue;
    const double root = std::sqrt(std::log(static_cast<double>(l.k)));
    c0 = std::min(c0, quantile_sorted(l.sorted, 0.005) / root);
    c1 = std::max(c1, quantile_sorted(l.sorted, 0.995) / root);
  }
  if (c1 > 0.0) {
    double min_frac = 1.0;
    std::size_t idx = 0;
    for (const auto& l : levels) {
      if (l.k < 2) continue;
      const double root = std::sqrt(std::log(static_cast<double>(l.k)));
      const auto lo = std::lower_bound(l.sorted.begin(), l.sorted.end(), c0 * root);
      const auto hi = std::upper_bound(l.sorted.begin(), l.sorted.end(), c1 * root);
      const double frac = static_cast<double>(hi - lo) / static_cast<double>(m);
      min_frac = std::min(min_frac, frac);
      for (; idx < per_k.size(); ++idx) {
        if (per_k[idx]["k"] == l.k) {
          per_k[idx]["fraction_in_band"] = frac;
          break;
        }
      }
    }
    rep.fit["C0"] = c0;
    rep.fit["C1"] = c1;
    rep.fit["band_ratio"] = c1 / c0;
    rep.fit["min_fraction_in_band"] = min_frac;
  }
  rep.diagnostics["theta"] = theta;
  rep.diagnostics["per_k"] = std::move(per_k);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport basis_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "bounded-ratio");
  const int d = cfg.window.dim;
  for (const auto& mode_name : cfg.modes) {
    const auto mode = mode_name == "haar" ? BasisMode::kHaar : BasisMode::kTensor;
    const auto prof = supnorm_profile(d, cfg.k_grid, cfg.seeds, mode, jobs);
    double lo = kInfinity, hi = 0.0;
    bool increasing = true;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      const auto& st = prof[i];
      const double norm = std::pow(st.eigenvalue, d / 4.0) / std::sqrt(1.0 + std::log(st.eigenvalue));
      const auto [mn, mx] = std::minmax_element(st.per_seed.begin(), st.per_seed.end());
      const std::size_t cells = mode == BasisMode::kHaar ? st.per_seed.size() : 1;
      rep.rows.push_back({mode_name + "_ratio", static_cast<double>(st.k), st.ratio, *mn * norm, *mx * norm, cells});
      rep.rows.push_back({mode_name + "_sup", static_cast<double>(st.k), st.max_sup, *mn, *mx, cells});
      rep.rows.push_back({mode_name + "_ratio_without_log", static_cast<double>(st.k),
                          st.max_sup * std::pow(st.eigenvalue, d / 4.0), 0.0, 0.0, cells});
      rep.rows.back().ci_lo = rep.rows.back().ci_hi = rep.rows.back().statistic;
      lo = std::min(lo, st.ratio);
      hi = std::max(hi, st.ratio);
      if (i > 0 && !(st.ratio > prof[i - 1].ratio)) increasing = false;
    }
    rep.fit[mode_name] = ojson{{"M", hi}, {"ratio_min", lo}, {"spread", hi / lo}, {"strictly_increasing", increasing}};
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport besov_sobolev_gain_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "gaussian-in-K");
  const int d = cfg.window.dim;
  const double r = cfg.functional.r;
  const double s = d * (0.5 - 1.0 / r);
  const std::size_t m = cfg.samples;

  // Blocks n = 1..blocks: eigenvalues in [2^n, 2^{n+1}).
  std::vector<MultiIndex> idx;
  std::vector<double> gamma;
  std::vector<std::size_t> block_start;
  ojson blocks = ojson::array();
  int top = 0;
  for (int n = 1; n <= cfg.blocks; ++n) {
    std::vector<MultiIndex> part;
    for (int k = 0; 2 * k + d < (1 << (n + 1)); ++k) {
      if (2 * k + d < (1 << n)) continue;
      auto lv = level_multi_indices(d, k);
      part.insert(part.end(), lv.begin(), lv.end());
      top = std::max(top, k);
    }
    if (part.empty()) {
      rep.warnings.push_back("block " + std::to_string(n) + " holds no eigenvalue");
      continue;
    }
    const double g = std::pow(2.0, -n * cfg.decay) / std::sqrt(static_cast<double>(part.size()));
    block_start.push_back(idx.size());
    blocks.push_back(ojson{{"n", n}, {"size", part.size()}, {"gamma", g}});
    for (auto& j : part) {
      idx.push_back(std::move(j));
      gamma.push_back(g);
    }
  }
  block_start.push_back(idx.size());
  const auto grid = lp_grid(d, top, r, 0.0);
  const NormEvaluator eval(grid, top);
  std::vector<double> mult(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) mult[j] = std::pow(idx[j].eigenvalue(), s / 2.0);

  std::vector<double> ratio(m);
  parallel_for(m, jobs, [&](std::size_t i) {
    Stream rng(cfg.seed, i);
    std::vector<std::complex<double>> c(idx.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = gamma[j] * cfg.law.draw(rng);
    double besov = 0.0;
    for (std::size_t b = 0; b + 1 < block_start.size(); ++b) {
      double sq = 0.0;
      for (std::size_t j = block_start[b]; j < block_start[b + 1]; ++j) sq += std::norm(c[j]);
      besov += std::sqrt(sq);
    }
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= mult[j];
    const double sob = eval.weighted(idx, c, NormSpec{r, 0.0}).value;
    ratio[i] = besov > 0.0 ? sob / besov : 0.0;
  });
  const auto sorted = sorted_copy(ratio);

  std::vector<double> ks = cfg.k_threshold_grid;
  if (ks.empty()) {
    ks.push_back(0.0);
    for (double p : {0.5, 0.3, 0.2, 0.1, 0.05, 0.03, 0.02, 0.01, 0.005}) {
      if (p * static_cast<double>(m) >= 20.0) ks.push_back(quantile_sorted(sorted, 1.0 - p));
    }
  }
  std::vector<double> x, y, wts;
  for (double k : ks) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin();
    const std::size_t hits = m - static_cast<std::size_t>(below);
    rep.rows.push_back(proportion_row("ccdf", k, hits, m));
    const double p = rep.rows.back().statistic;
    if (k > 0.0 && p < 1.0 && hits >= 20) {
      x.push_back(k * k);
      y.push_back(-std::log(p));
      wts.push_back(static_cast<double>(m) * p / (1.0 - p));
    }
  }
  bool increasing = true, convex = true;
  std::vector<double> slopes;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (y[i] < y[i - 1]) increasing = false;
    if (x[i] > x[i - 1]) slopes.push_back((y[i] - y[i - 1]) / (x[i] - x[i - 1]));
  }
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (slopes[i] < slopes[i - 1]) convex = false;
  rep.diagnostics["s"] = s;
  rep.diagnostics["blocks"] = std::move(blocks);
  rep.diagnostics["median_ratio"] = quantile_sorted(sorted, 0.5);
  rep.diagnostics["increasing"] = increasing;
  rep.diagnostics["convex"] = convex;
  rep.diagnostics["segment_slopes"] = slopes;
  try {
    if (x.size() < 3) throw Error(ErrorCode::kInsufficientSamples, "fewer than three K bins with 20 exceedances");
    const auto fit = weighted_least_squares(x, y, wts, true);
    rep.fit = fit_json(fit);
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport lipschitz_concentration_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "sub-gaussian");
  const auto w = cfg.window.build();
  const auto prof = cfg.profile.build(w);
  const auto& f = cfg.functional;
  const std::size_t m = cfg.samples;
  const double n = static_cast<double>(w.n_h);
  const double lip = lipschitz_bound(w, f) * f.scale;

  std::unique_ptr<NormPlan> plan;
  std::vector<double> phi;
  if (f.kind == "point") {
    for (const auto& j : prof.indices) phi.push_back(eigenfunction_eval(j, f.x0));
  } else if (f.kind != "coordinate") {
    plan = make_norm_plan(w.dim, w.max_level(), f.kind, f.r, f.s);
  }
  std::vector<double> v(m);
  parallel_for(m, jobs, [&](std::size_t i) {
    const auto c = sphere_coefficients(prof, cfg.law, cfg.seed, i);
    double val;
    if (f.kind == "coordinate") {
      val = std::abs(c[0]);
    } else if (f.kind == "point") {
      std::complex<double> z = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) z += c[j] * phi[j];
      val = std::abs(z);
    } else {
      val = eval_norm(*plan, prof.indices, c);
    }
    v[i] = f.scale * val;
  });
  const double med = median(v);
  std::vector<double> dev(m);
  for (std::size_t i = 0; i < m; ++i) dev[i] = std::abs(v[i] - med);
  const auto sorted = sorted_copy(dev);

  const bool oracle = f.kind == "coordinate" && is_isotropic(prof) && is_gaussian(cfg.law);
  std::vector<double> xs, ps;
  double max_z = 0.0;
  for (double rho : cfg.rho_grid) {
    const double t = rho * lip / std::sqrt(n);
    const auto upto = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    rep.rows.push_back(proportion_row("tail", rho, m - static_cast<std::size_t>(upto), m));
    xs.push_back(rho * rho);
    ps.push_back(rep.rows.back().statistic);
    if (oracle) {
      const bool cx = cfg.law.is_complex();
      const double hi = (med + t) / f.scale, lo = (med - t) / f.scale;
      const double p = sphere_marginal_ccdf(w.n_h, hi, cx) + (lo > 0.0 ? 1.0 - sphere_marginal_ccdf(w.n_h, lo, cx) : 0.0);
      rep.rows.push_back({"oracle", rho, p, p, p, m});
      const double se = binomial_se(p, m);
      if (se > 0.0) max_z = std::max(max_z, std::abs(ps.back() - p) / se);
    }
  }
  rep.diagnostics["N"] = w.n_h;
  rep.diagnostics["lipschitz"] = lip;
  rep.diagnostics["median"] = med;
  if (oracle) rep.diagnostics["oracle_max_abs_z"] = max_z;
  try {
    const auto bins = tail_bins(xs, ps);
    const auto fit = exponential_tail_fit(bins.x, bins.p, m);
    rep.fit["kappa"] = fit.slope;
    rep.fit["r2"] = fit.r2;
    rep.fit["bins"] = fit.used.size();
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport mean_median_gap_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "sqrt-n");
  const std::size_t m = cfg.samples;
  double c_lo = kInfinity, c_hi = 0.0, gap16 = 0.0;
  ojson per_n = ojson::array();
  std::vector<double> gaps16;
  for (int n : cfg.n_grid) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    std::vector<double> v(m);
    parallel_for(
        m, jobs,
        [&](std::size_t i) {
          Stream rng(seed, i);
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += std::norm(cfg.law.draw(rng));
          v[i] = std::sqrt(s);
        },
        64);
    const auto med = bootstrap_median(v, cfg.bootstrap, derive_seed(seed, 1));
    const auto avg = bootstrap_mean(v, cfg.bootstrap, derive_seed(seed, 2));
    rep.rows.push_back(estimate_row("median", n, med, m));
    rep.rows.push_back(estimate_row("mean", n, avg, m));
    const double gap = std::abs(med.value - avg.value);
    rep.rows.push_back({"gap", static_cast<double>(n), gap, gap, gap, m});
    const double ratio = med.value / std::sqrt(static_cast<double>(n));
    c_lo = std::min(c_lo, ratio);
    c_hi = std::max(c_hi, ratio);
    if (n >= 16) {
      gap16 = std::max(gap16, gap);
      gaps16.push_back(gap);
    }
    per_n.push_back(ojson{{"N", n}, {"gap", gap}, {"median_over_sqrt_n", ratio}});
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < gaps16.size(); ++i)
    if (gaps16[i] > gaps16[i - 1]) nonincreasing = false;
  rep.fit["C1"] = c_lo;
  rep.fit["C2"] = c_hi;
  rep.fit["max_gap_n_ge_16"] = gap16;
  rep.diagnostics["gap_nonincreasing_beyond_16"] = nonincreasing;
  rep.diagnostics["per_n"] = std::move(per_n);
  if (cfg.law.kind() == LawKind::kRealGaussian) {
    rep.diagnostics["half_normal_mean"] = std::sqrt(2.0 / std::numbers::pi);
    rep.diagnostics["half_normal_median"] = 0.6744897501960817;
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport norm_concentration_experiment(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "exponential-in-N");
  const std::size_t m = cfg.samples;
  std::vector<double> xs, ps;
  for (int n : cfg.n_grid) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    std::vector<char> hit(m);
    parallel_for(
        m, jobs,
        [&](std::size_t i) {
          Stream rng(seed, i);
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += std::norm(cfg.law.draw(rng));
          hit[i] = std::abs(s / n - 1.0) > cfg.threshold;
        },
        256);
    const auto hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    rep.rows.push_back(proportion_row("tail", n, hits, m));
    xs.push_back(n);
    ps.push_back(rep.rows.back().statistic);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (!(ps[i] < ps[i - 1])) decreasing = false;
  rep.diagnostics["threshold"] = cfg.threshold;
  rep.diagnostics["strictly_decreasing"] = decreasing;
  try {
    const auto bins = tail_bins(xs, ps);
    const auto fit = exponential_tail_fit(bins.x, bins.p, m);
    rep.fit["c"] = fit.slope;
    rep.fit["r2"] = fit.r2;
    rep.fit["bins"] = fit.used.size();
    rep.diagnostics["min_ratio_to_fit"] = min_ratio_to_fit(fit, bins);
  } catch (const Error& e) {
    mark_insufficient(rep, e);
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport paley_zygmund_khinchin_check(const ExperimentConfig& cfg, int jobs) {
  Clock clock;
  auto rep = start_report(cfg, "moment-bounds");
  const std::size_t m = cfg.samples;
  const int n = cfg.n_grid.front();
  const double lambda = cfg.pz_lambda;
  bool pz_all = true;
  double fitted_c = 0.0, l4_l2 = 0.0;
  std::vector<double> kmax(cfg.moments.size(), 0.0), kmin(cfg.moments.size(), kInfinity);
  for (int t = 0; t < cfg.trials; ++t) {
    Stream arng(cfg.seed, static_cast<std::uint64_t>(t), 0xa11);
    boost::random::normal_distribution<double> g;
    std::vector<double> a(n);
    double norm = 0.0;
    for (auto& x : a) {
      x = g(arng);
      norm += x * x;
    }
    for (auto& x : a) x /= std::sqrt(norm);
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    std::vector<double> mod(m);
    parallel_for(
        m, jobs,
        [&](std::size_t i) {
          Stream rng(seed, i);
          std::complex<double> y = 0.0;
          for (int j = 0; j < n; ++j) y += a[j] * cfg.law.draw(rng);
          mod[i] = std::abs(y);
        },
        256);
    double ez = 0.0, ez2 = 0.0;
    for (double v : mod) {
      ez += v * v;
      ez2 += v * v * v * v;
    }
    ez /= static_cast<double>(m);
    ez2 /= static_cast<double>(m);
    std::size_t above = 0;
    for (double v : mod) above += v * v > lambda * ez;
    rep.rows.push_back(proportion_row("pz_lhs", t, above, m));
    const double rhs = std::pow((1.0 - lambda) * ez, 2) / ez2;
    rep.rows.push_back({"pz_rhs", static_cast<double>(t), rhs, rhs, rhs, m});
    if (rep.rows[rep.rows.size() - 2].statistic < rhs) pz_all = false;
    double l2 = 0.0, l4 = 0.0;
    for (std::size_t q = 0; q < cfg.moments.size(); ++q) {
      const int k = cfg.moments[q];
      double s = 0.0;
      for (double v : mod) s += std::pow(v, k);
      const double lk = std::pow(s / static_cast<double>(m), 1.0 / k);
      kmax[q] = std::max(kmax[q], lk);
      kmin[q] = std::min(kmin[q], lk);
      fitted_c = std::max(fitted_c, lk / std::sqrt(static_cast<double>(k)));
      if (k == 2) l2 = lk;
      if (k == 4) l4 = lk;
    }
    if (l2 > 0.0 && l4 > 0.0) l4_l2 = std::max(l4_l2, l4 / l2);
  }
  for (std::size_t q = 0; q < cfg.moments.size(); ++q) {
    rep.rows.push_back({"khinchin", static_cast<double>(cfg.moments[q]), kmax[q], kmin[q], kmax[q], m});
  }
  rep.fit["khinchin_C"] = fitted_c;
  rep.diagnostics["N"] = n;
  rep.diagnostics["lambda"] = lambda;
  rep.diagnostics["pz_all_hold"] = pz_all;
  if (l4_l2 > 0.0) {
    rep.diagnostics["max_l4_over_l2"] = l4_l2;
    rep.diagnostics["khinchin_l4_bound"] = 2.0 * fitted_c;
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

FitReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  const auto& e = cfg.experiment;
  if (e == "tail") return tail_experiment(cfg, jobs);
  if (e == "median") return norm_statistics_experiment(cfg, jobs);
  if (e == "linfty") return linfty_scaling_experiment(cfg, jobs);
  if (e == "lr") return lr_median_scaling_experiment(cfg, jobs);
  if (e == "basis") return basis_experiment(cfg, jobs);
  if (e == "besov") return besov_sobolev_gain_experiment(cfg, jobs);
  if (e == "concentration") {
    if (cfg.study == "lipschitz") return lipschitz_concentration_experiment(cfg, jobs);
    if (cfg.study == "mean-median-gap") return mean_median_gap_experiment(cfg, jobs);
    if (cfg.study == "norm-concentration") return norm_concentration_experiment(cfg, jobs);
    if (cfg.study == "paley-zygmund-khinchin") return paley_zygmund_khinchin_check(cfg, jobs);
  }
  throw Error(ErrorCode::kConfig, "unknown experiment '" + e + "'");
}

}  // namespace hermrand
