#include "hermrand/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hermrand/basis.hpp"
#include "hermrand/config.hpp"
#include "hermrand/experiments.hpp"
#include "hermrand/hermite.hpp"
#include "hermrand/measures.hpp"
#include "hermrand/parallel.hpp"
#include "hermrand/quadrature.hpp"
#include "hermrand/spectral.hpp"
#include "hermrand/stats.hpp"

namespace hermrand {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CheckResult gram_check() {
  const int order = 128, nmax = 100;
  const auto& rule = cached_gauss_hermite_rule(order);
  std::vector<std::vector<double>> h(rule.nodes.size(), std::vector<double>(nmax + 1));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) hermite_functions(rule.nodes[i], h[i], nmax);
  double worst = 0.0;
  for (int a = 0; a <= nmax; ++a)
    for (int b = a; b <= nmax; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) g += rule.scaled_weights[i] * h[i][a] * h[i][b];
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  if (!std::isfinite(worst)) worst = INFINITY;
  return {"Gram check", worst < 1e-10, fmt("max |G - I| = %.3e over n <= 100 (order 128 table)", worst)};
}

CheckResult mehler_check() {
  double worst = 0.0;
  for (int d : {1, 2})
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      const double lambda_max = 14.0 * std::log(10.0) / t + 10.0;
      for (double r : {0.0, 1.0, 2.0, 3.0, 4.0}) {
        std::vector<double> x(d, 0.0);
        x[0] = r * std::cos(0.4);
        if (d == 2) x[1] = r * std::sin(0.4);
        const double c = heat_kernel_diag_closed(d, t, x);
        worst = std::max(worst, std::abs(heat_kernel_diag_series(d, t, x, lambda_max) - c) / c);
      }
    }
  return {"Mehler identity", worst < 1e-8, fmt("max relative residual %.3e", worst)};
}

CheckResult trace_check() {
  double worst = 0.0;
  for (int k : {0, 5, 20, 64}) {
    const auto w = single_level_window(2, k);
    const auto r = spectral_increment_norm(w, 1.0, 0.0, increment_grid(w, 1.0, 0.0));
    worst = std::max(worst, std::abs(r.value - static_cast<double>(w.n_h)) / static_cast<double>(w.n_h));
  }
  return {"trace identity", worst < 1e-8, fmt("max relative error %.3e for d = 2, k in {0, 5, 20, 64}", worst)};
}

CheckResult sphere_check(int jobs, std::uint64_t seed) {
  const std::size_t m = 100000;
  const double band = 1.36 / std::sqrt(static_cast<double>(m)) * 1.2;
  double worst = 0.0;
  for (std::uint64_t n : {2u, 10u, 33u}) {
    const std::vector<std::complex<double>> gamma(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> t(m);
    parallel_for(
        m, jobs,
        [&](std::size_t i) {
          Stream rng(seed + n, i);
          double s = 0.0;
          std::complex<double> first;
          for (std::uint64_t j = 0; j < n; ++j) {
            const auto c = gamma[j] * RandomLaw::complex_gaussian().draw(rng);
            if (j == 0) first = c;
            s += std::norm(c);
          }
          t[i] = std::abs(first) / std::sqrt(s);
        },
        256);
    worst = std::max(worst, ks_distance(t, [n](double x) { return 1.0 - uniform_marginal_ccdf(n, std::clamp(x, 0.0, 1.0)); }) /
                                band);
  }
  return {"sphere marginal law", worst < 1.0, fmt("max KS / band = %.3f (N in {2, 10, 33}, M = 1e5)", worst)};
}

CheckResult unitarity_check(std::uint64_t seed) {
  double worst = 0.0, det = 0.0;
  for (int n : {1, 8, 64, 256}) {
    const auto u = haar_unitary(n, seed);
    worst = std::max(worst, (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
    det = std::max(det, std::abs(std::abs(u.determinant()) - 1.0));
  }
  return {"unitarity", worst < 1e-12 && det < 1e-10, fmt("max |U*U - I| = %.3e, max ||det U| - 1| = %.3e", worst, det)};
}

CheckResult weyl_check() {
  const auto c200 = weyl_count(2, 200.0);
  const double ratio = static_cast<double>(c200) / (200.0 * 200.0 / 8.0);
  const bool ok = weyl_count(2, 10.0) == 15 && ratio >= 0.95 && ratio <= 1.05;
  return {"Weyl count", ok, fmt("weyl_count(2, 10) = %.0f, weyl_count(2, 200) / 5000 = %.4f", weyl_count(2, 10.0), ratio)};
}

}  // namespace

std::vector<std::string> determinism_mismatches(int jobs, std::uint64_t seed) {
  using nlohmann::json;
  const std::vector<std::pair<std::string, json>> configs{
      {"tail", json{{"window", {{"dim", 2}, {"level", 6}}}, {"samples", 2000}, {"seed", seed}}},
      {"median", json{{"window", {{"dim", 2}, {"level", 8}}}, {"samples", 60}, {"r_grid", {2, 4, "inf"}}, {"seed", seed}}},
      {"linfty", json{{"window", {{"dim", 2}}}, {"k_grid", {4, 6, 8, 12}}, {"samples", 40}, {"seed", seed}}},
      {"lr", json{{"window", {{"dim", 2}, {"level", 8}}}, {"samples", 40}, {"seed", seed}}},
      {"basis", json{{"window", {{"dim", 2}}}, {"k_grid", {2, 4, 6}}, {"seeds", {seed, seed + 1}}}},
      {"besov", json{{"window", {{"dim", 2}}}, {"blocks", 3}, {"samples", 1000}, {"seed", seed}}},
      {"concentration", json{{"study", "lipschitz"}, {"window", {{"dim", 2}, {"level", 5}}}, {"samples", 2000}, {"seed", seed}}},
      {"concentration", json{{"study", "norm-concentration"}, {"samples", 2000}, {"seed", seed}}},
  };
  std::vector<std::string> bad;
  for (const auto& [name, j] : configs) {
    const auto cfg = parse_config(j, name);
    const auto a = run_experiment(cfg, 1).to_json(false).dump();
    const auto b = run_experiment(cfg, std::max(jobs, 2)).to_json(false).dump();
    if (a != b) bad.push_back(cfg.study.empty() ? name : name + "/" + cfg.study);
  }
  return bad;
}

std::vector<CheckResult> run_selftest(int jobs, std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(gram_check());
  out.push_back(mehler_check());
  out.push_back(trace_check());
  out.push_back(sphere_check(jobs, seed));
  out.push_back(unitarity_check(seed));
  out.push_back(weyl_check());
  const auto bad = determinism_mismatches(jobs, seed);
  std::string detail = "reports identical for 1 and " + std::to_string(std::max(jobs, 2)) + " workers";
  if (!bad.empty()) {
    detail = "reports differ:";
    for (const auto& b : bad) detail += " " + b;
  }
  out.push_back({"determinism", bad.empty(), detail});
  return out;
}

}  // namespace hermrand
