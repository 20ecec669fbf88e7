// Acceptance run: one PASS/FAIL line per criterion, runtime limits included.
// Exit status is the number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "hermrand/config.hpp"
#include "hermrand/experiments.hpp"
#include "hermrand/hermite.hpp"
#include "hermrand/measures.hpp"
#include "hermrand/parallel.hpp"
#include "hermrand/quadrature.hpp"
#include "hermrand/rng.hpp"
#include "hermrand/selftest.hpp"
#include "hermrand/spectral.hpp"
#include "hermrand/stats.hpp"

using namespace hermrand;
using nlohmann::json;

namespace {

int jobs = 1;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig config_file(const std::string& file, const std::string& experiment) {
  auto j = load_json(std::string(HERMRAND_CONFIG_DIR) + "/" + file);
  return parse_config(j, experiment);
}

Outcome mehler() {
  double worst = 0.0;
  for (int d : {1, 2})
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      const double lambda_max = 14.0 * std::log(10.0) / t + 10.0;
      for (double r : {0.0, 0.75, 1.5, 2.25, 3.0}) {
        std::vector<double> x(d, 0.0);
        x[0] = r * std::cos(1.1);
        if (d == 2) x[1] = r * std::sin(1.1);
        const double c = heat_kernel_diag_closed(d, t, x);
        worst = std::max(worst, std::abs(heat_kernel_diag_series(d, t, x, lambda_max) - c) / c);
      }
    }
  return {worst < 1e-8, fmt("max relative residual %.2e (< 1e-8)", worst)};
}

Outcome gram() {
  // d = 1, n <= 100 on a 128-point rule.
  const auto rule = gauss_hermite_rule(128);
  const int n1 = 100;
  std::vector<std::vector<double>> h(rule.nodes.size(), std::vector<double>(n1 + 1));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) hermite_functions(rule.nodes[i], h[i], n1);
  double worst1 = 0.0;
  for (int a = 0; a <= n1; ++a)
    for (int b = a; b <= n1; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) g += rule.scaled_weights[i] * h[i][a] * h[i][b];
      worst1 = std::max(worst1, std::abs(g - (a == b)));
    }

  // d = 2 tensor products with degrees <= 30 per axis: corners, diagonal and a
  // random sample of index pairs, integrated on the 31 x 31 product rule.
  const int n2 = 30;
  const auto r2 = gauss_hermite_rule(31);
  std::vector<std::vector<double>> g(r2.nodes.size(), std::vector<double>(n2 + 1));
  for (std::size_t i = 0; i < r2.nodes.size(); ++i) hermite_functions(r2.nodes[i], g[i], n2);
  std::vector<std::pair<int, int>> idx{{0, 0}, {30, 0}, {0, 30}, {30, 30}, {29, 30}, {15, 15}};
  Stream rng(2024, 0);
  while (idx.size() < 150) {
    const int a = static_cast<int>(rng.uniform() * (n2 + 1)), b = static_cast<int>(rng.uniform() * (n2 + 1));
    if (std::find(idx.begin(), idx.end(), std::pair{a, b}) == idx.end()) idx.emplace_back(a, b);
  }
  double worst2 = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p)
    for (std::size_t q = p; q < idx.size(); ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < r2.nodes.size(); ++i)
        for (std::size_t j = 0; j < r2.nodes.size(); ++j)
          s += r2.scaled_weights[i] * r2.scaled_weights[j] * g[i][idx[p].first] * g[j][idx[p].second] *
               g[i][idx[q].first] * g[j][idx[q].second];
      worst2 = std::max(worst2, std::abs(s - (p == q)));
    }
  return {worst1 < 1e-10 && worst2 < 1e-10,
          fmt("d=1 max |G-I| %.2e, d=2 (%zu indices) max |G-I| %.2e (< 1e-10)", worst1, idx.size(), worst2)};
}

Outcome sphere() {
  const std::size_t m = 100000;
  const double band = 1.36 / std::sqrt(static_cast<double>(m)) * 1.2;
  std::string detail;
  bool ok = true;
  for (int n : {2, 10, 33}) {
    const auto prof = isotropic_profile(level_range_window(1, 0, n - 1));
    std::vector<double> t(m);
    parallel_for(
        m, jobs,
        [&](std::size_t i) {
          const auto c = sample_coefficients(prof, RandomLaw::complex_gaussian(), 303, i);
          t[i] = std::abs(normalize_to_sphere(c).coeffs[0]);
        },
        256);
    const double ks = ks_distance(t, [n](double x) {
      x = std::clamp(x, 0.0, 1.0);
      return 1.0 - std::pow(1.0 - x * x, n - 1);
    });
    ok = ok && ks < band;
    detail += fmt("N=%d KS %.4f; ", n, ks);
  }
  return {ok, detail + fmt("band %.4f", band)};
}

Outcome weyl() {
  const auto c10 = weyl_count(2, 10.0);
  const double ratio = static_cast<double>(weyl_count(2, 200.0)) / (200.0 * 200.0 / 8.0);
  return {c10 == 15 && ratio >= 0.95 && ratio <= 1.05,
          fmt("weyl_count(2,10) = %llu, weyl_count(2,200)/5000 = %.4f", static_cast<unsigned long long>(c10), ratio)};
}

Outcome trace() {
  double worst = 0.0;
  for (int k : {0, 5, 20, 64}) {
    const auto w = single_level_window(2, k);
    const auto r = spectral_increment_norm(w, 1.0, 0.0, increment_grid(w, 1.0, 0.0));
    worst = std::max(worst, std::abs(r.value - static_cast<double>(w.n_h)) / static_cast<double>(w.n_h));
  }
  return {worst < 1e-8, fmt("max relative error %.2e (< 1e-8)", worst)};
}

Outcome tail() {
  const auto g = run_experiment(config_file("tail_gaussian.json", "tail"), jobs);
  const auto ccdf = g.series("ccdf");
  const double e_l = g.diagnostics["e_L"].get<double>();
  const int n = g.diagnostics["N"].get<int>();
  double max_z = 0.0;
  for (const auto& row : ccdf) {
    const double tau = row.abscissa / std::sqrt(e_l);
    const double phi = std::pow(1.0 - tau * tau, n - 1);
    max_z = std::max(max_z, std::abs(row.statistic - phi) / binomial_se(phi, row.n_samples));
  }
  const bool gauss_ok = ccdf.size() == 10 && n == 11 && max_z <= 3.0;

  const auto r = run_experiment(config_file("tail_rademacher.json", "tail"), jobs);
  const double ratio = r.diagnostics.value("min_ratio_to_upper_fit", 0.0);
  const double r2 = r.fit.value("r2_upper", 0.0);
  const bool rad_ok = !r.insufficient && ratio >= 0.8 && r2 > 0.9;
  return {gauss_ok && rad_ok, fmt("Gaussian max |z| %.2f over %zu points (<= 3); Rademacher min ratio %.3f (>= 0.8), R2 %.3f (> 0.9)",
                                  max_z, ccdf.size(), ratio, r2)};
}

Outcome lr() {
  const auto r = run_experiment(config_file("lr_gaussian.json", "lr"), jobs);
  const double slope = r.fit.value("slope", NAN), r2 = r.fit.value("r2", NAN);
  std::string meds;
  for (const auto& row : r.series("normalized_median")) meds += fmt(" %.3f", row.statistic);
  return {std::abs(slope - 0.5) <= 0.1 && r2 > 0.9,
          fmt("slope %.3f (0.5 +- 0.1), R2 %.3f (> 0.9); normalized medians r=2,4,8,16:%s", slope, r2, meds.c_str())};
}

Outcome linfty() {
  const auto r = run_experiment(config_file("linfty_gaussian.json", "linfty"), jobs);
  const double r2 = r.fit.value("r2", NAN), band = r.fit.value("band_ratio", NAN), frac = r.fit.value("min_fraction_in_band", 0.0);
  return {!r.insufficient && r2 > 0.95 && band < 3.0 && frac >= 0.99,
          fmt("C %.3f, R2 %.4f (> 0.95); band [%.3f, %.3f], C1/C0 %.2f (< 3); min fraction in band %.4f (>= 0.99)",
              r.fit.value("C", NAN), r2, r.fit.value("C0", NAN), r.fit.value("C1", NAN), band, frac)};
}

Outcome basis() {
  const auto r = run_experiment(config_file("basis_sweep.json", "basis"), jobs);
  const double spread = r.fit["haar"]["spread"].get<double>();
  const bool inc = r.fit["tensor"]["strictly_increasing"].get<bool>();
  return {spread < 4.0 && inc, fmt("haar max/min %.3f (< 4); tensor strictly increasing: %s", spread, inc ? "yes" : "no")};
}

Outcome concentration() {
  const auto nc = run_experiment(config_file("norm_concentration.json", "concentration"), jobs);
  const bool dec = nc.diagnostics["strictly_decreasing"].get<bool>();
  const double ratio = nc.diagnostics.value("min_ratio_to_fit", 0.0);
  const auto mm = run_experiment(config_file("mean_median_gap.json", "concentration"), jobs);
  const double gap = mm.fit.value("max_gap_n_ge_16", INFINITY);
  return {dec && ratio >= 0.5 && gap < 1.0,
          fmt("tail strictly decreasing: %s; min ratio to linear fit %.3f (>= 0.5); max gap for N >= 16 %.4f (< 1)",
              dec ? "yes" : "no", ratio, gap)};
}

Outcome determinism() {
  const auto bad = determinism_mismatches(std::max(jobs, 3), 11);
  std::string detail = "reports identical across worker counts";
  if (!bad.empty()) {
    detail = "reports differ:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty(), detail};
}

}  // namespace

int main() {
  jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 Mehler identity", 10, mehler},
      {"2 Hermite orthonormality", 30, gram},
      {"3 sphere marginal law", 60, sphere},
      {"4 Weyl count", 1, weyl},
      {"5 trace identity", 60, trace},
      {"6 point-evaluation tails", 300, tail},
      {"7 L^r median scaling", 600, lr},
      {"8 sup-norm scaling", 1800, linfty},
      {"9 random-basis sup norms", 1200, basis},
      {"10 concentration", 300, concentration},
      {"11 determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = o.passed && secs < c.limit_seconds;
    failed += !ok;
    std::printf("%s  %-26s %s [%.1f s, limit %.0f s]\n", ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.limit_seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
