#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "hermrand/config.hpp"
#include "hermrand/error.hpp"
#include "hermrand/experiments.hpp"
#include "hermrand/io.hpp"
#include "hermrand/norms.hpp"
#include "hermrand/selftest.hpp"
#include "hermrand/stats.hpp"

using namespace hermrand;
using nlohmann::json;

namespace {
ExperimentConfig cfg_of(const std::string& name, const std::string& text) { return parse_config(json::parse(text), name); }

ErrorCode config_error(const std::string& name, const std::string& text) {
  try {
    parse_config(json::parse(text), name);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config accepted: " << text);
  return ErrorCode::kDomain;
}
}  // namespace

TEST_CASE("config validation") {
  CHECK(config_error("tail", R"({"samples": 5000})") == ErrorCode::kConfig);
  CHECK(config_error("tail", R"({"window": {"dim": 2, "level": 3}, "samples": 10})") == ErrorCode::kConfig);
  CHECK(config_error("tail", R"({"window": {"dim": 2, "level": 3}, "colour": 1})") == ErrorCode::kConfig);
  CHECK(config_error("median", R"({"window": {"dim": 2, "level": 3, "h": 0.5}})") == ErrorCode::kConfig);
  CHECK(config_error("median", R"({"window": {"dim": 2, "level": 3}, "law": "cauchy"})") == ErrorCode::kConfig);
  CHECK(config_error("median", R"({"window": {"dim": 2, "level": 3}, "law": {"kind": "alpha_exponential", "alpha": 1}})") ==
        ErrorCode::kConfig);
  CHECK(config_error("median", R"({"window": {"dim": 2, "level": 3}, "seed": -4})") == ErrorCode::kConfig);
  CHECK(config_error("tail", R"({"window": {"dim": 2, "level": 3}, "functional": {"kind": "point", "x0": [0]}})") ==
        ErrorCode::kConfig);
  CHECK(config_error("concentration", R"({"study": "entropy"})") == ErrorCode::kConfig);
  CHECK(config_error("tail", R"({"experiment": "linfty", "window": {"dim": 2, "level": 3}})") == ErrorCode::kConfig);
  CHECK(config_error("linfty", R"({"window": {"dim": 1}})") == ErrorCode::kConfig);
  CHECK(config_error("lr", R"({"window": {"dim": 2, "level": 3}, "r_grid": [0.5]})") == ErrorCode::kConfig);

  auto c = cfg_of("linfty", R"({"window": {"dim": 2}})");
  CHECK(c.theta == 2.0);
  CHECK(c.k_grid == std::vector<int>{16, 32, 64, 128, 256});
  auto g = cfg_of("concentration", R"({"study": "mean-median-gap"})");
  CHECK(g.law.kind() == LawKind::kRealGaussian);
  auto r = cfg_of("median", R"({"window": {"dim": 2, "level": 3}, "r_grid": [2, "inf"]})");
  CHECK(std::isinf(r.r_grid[1]));
}

TEST_CASE("config hash ignores key order and tracks content") {
  auto a = cfg_of("median", R"({"window": {"dim": 2, "level": 3}, "samples": 10, "seed": 4})");
  auto b = cfg_of("median", R"({"seed": 4, "samples": 10, "window": {"level": 3, "dim": 2}})");
  auto c = cfg_of("median", R"({"seed": 5, "samples": 10, "window": {"level": 3, "dim": 2}})");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(a.hash.size() == 16);
}

TEST_CASE("malformed config files") {
  const auto path = std::filesystem::temp_directory_path() / "hermrand_bad_config.json";
  {
    std::ofstream f(path);
    f << "{\"window\": {\"dim\": 2,";
  }
  try {
    load_json(path);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_json("/nonexistent/hermrand.json"), Error);
}

TEST_CASE("CSV formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(INFINITY) == "inf");
  FitReport r;
  r.seed = 9;
  r.config_hash = "abc";
  r.rows.push_back({"ccdf", 0.5, 0.25, 0.2, 0.3, 100});
  const auto csv = report_csv(r);
  CHECK(csv.rfind(std::string(kReportCsvHeader) + "\r\n", 0) == 0);
  CHECK(csv.find("ccdf,0.5,0.25,0.2,0.3,100,9,abc,") != std::string::npos);
}

TEST_CASE("weighted spectral sup on the ground state") {
  auto w = single_level_window(2, 0);
  const double pi = std::numbers::pi;
  CHECK(weighted_spectral_sup(w, 0.0) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-10));
  CHECK(weighted_spectral_sup(w, 1.0) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-10));
  CHECK(weighted_spectral_sup(w, 2.0) == doctest::Approx(2.0 / std::sqrt(std::exp(1.0) * pi)).epsilon(1e-10));
}

TEST_CASE("Lipschitz bounds dominate the norms") {
  auto w = single_level_window(2, 12);
  auto prof = isotropic_profile(w);
  for (auto [r, s] : {std::pair{4.0, 0.0}, std::pair{6.0, 4.0}, std::pair{kInfinity, 1.0}}) {
    FunctionalSpec f;
    f.kind = std::isinf(r) ? "sup-norm" : "weighted-norm";
    f.r = r;
    f.s = s;
    const double lip = lipschitz_bound(w, f);
    for (std::uint64_t i = 0; i < 20; ++i) {
      auto c = normalize_to_sphere(sample_coefficients(prof, RandomLaw::complex_gaussian(), 5, i)).coeffs;
      Expansion u{2, prof.indices, c};
      CHECK(weighted_norm(u, NormSpec{r, s}).value <= lip * (1.0 + 1e-9));
    }
  }
  FunctionalSpec two;
  two.r = 2.0;
  CHECK(lipschitz_bound(w, two) == 1.0);
}

TEST_CASE("tail experiment: trivial rows and the exact oracle") {
  auto c = cfg_of("tail", R"({"window": {"dim": 2, "level": 10}, "samples": 100000, "seed": 17,
                              "functional": {"kind": "point", "x0": [0.25, 0.5]},
                              "tau_grid": [0.0, 0.4472135954999579, 1.0]})");
  auto r = tail_experiment(c);
  const auto ccdf = r.series("ccdf");
  REQUIRE(ccdf.size() == 3);
  CHECK(ccdf[0].statistic == 1.0);
  CHECK(ccdf[2].statistic == 0.0);
  // tau^2 = 0.2 with N = 11: (1 - 0.2)^10.
  const double phi = std::pow(0.8, 10);
  CHECK(phi == doctest::Approx(0.107374).epsilon(1e-5));
  CHECK(std::abs(ccdf[1].statistic - phi) <= 3.0 * binomial_se(phi, 100000));
  CHECK(r.diagnostics["cap_violations"] == 0);
  CHECK(r.diagnostics["ks_distance"].get<double>() < 1.63 / std::sqrt(1e5));
}

TEST_CASE("tail experiment: KS band across N") {
  for (const char* window : {R"({"dim": 1, "levels": [0, 3]})", R"({"dim": 2, "level": 10})", R"({"dim": 1, "levels": [0, 32]})"}) {
    auto j = json::parse(R"({"samples": 100000, "seed": 5, "functional": {"kind": "point", "x0": [0.3, 0.1]}})");
    j["window"] = json::parse(window);
    if (j["window"]["dim"] == 1) j["functional"]["x0"] = {0.3};
    auto r = tail_experiment(parse_config(j, "tail"));
    CHECK(r.diagnostics["ks_distance"].get<double>() < 1.63 / std::sqrt(1e5));
    const auto ccdf = r.series("ccdf");
    for (std::size_t i = 1; i < ccdf.size(); ++i) CHECK(ccdf[i].statistic <= ccdf[i - 1].statistic);
  }
}

TEST_CASE("tail experiment: real Gaussian oracle and non-Gaussian laws") {
  auto c = cfg_of("tail", R"({"window": {"dim": 2, "level": 6}, "samples": 50000, "seed": 3, "law": "real_gaussian",
                              "functional": {"kind": "point", "x0": [0.4, -0.3]}})");
  auto r = tail_experiment(c);
  CHECK(r.diagnostics["within_3se"] == true);
  CHECK(r.diagnostics["ks_distance"].get<double>() < 1.63 / std::sqrt(5e4));

  auto a = cfg_of("tail", R"({"window": {"dim": 2, "level": 6}, "samples": 20000, "seed": 3,
                              "law": {"kind": "alpha_exponential", "alpha": 4}})");
  auto ra = tail_experiment(a);
  CHECK(!ra.diagnostics.contains("ks_distance"));
  CHECK(ra.diagnostics["cap_violations"] == 0);
  CHECK(ra.fit["c_upper"].get<double>() > 0.0);
}

TEST_CASE("tail experiment flags too few exceedances") {
  auto c = cfg_of("tail", R"({"window": {"dim": 2, "level": 10}, "samples": 1000, "seed": 3,
                              "tau_grid": [0.9, 0.95, 0.99]})");
  auto r = tail_experiment(c);
  CHECK(r.insufficient);
  CHECK(r.series("ccdf").size() == 3);
}

TEST_CASE("norm statistics") {
  // N = 1: the sphere is a circle of phases, every norm is constant.
  auto one = cfg_of("median", R"({"window": {"dim": 2, "level": 0}, "samples": 300, "r_grid": [2, 4, "inf"]})");
  auto r1 = norm_statistics_experiment(one);
  for (const auto& row : r1.series("median")) CHECK(row.ci_hi - row.ci_lo == 0.0);
  CHECK(r1.find("median", 2.0)->statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.find("median", kInfinity)->statistic == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-9));

  auto l2 = cfg_of("median", R"({"window": {"dim": 2, "level": 32}, "samples": 200})");
  auto r2 = norm_statistics_experiment(l2);
  const auto* med = r2.find("median", 2.0);
  CHECK(med->statistic == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(med->ci_lo <= 1.0 + 1e-10);
  CHECK(med->ci_hi >= 1.0 - 1e-10);
}

TEST_CASE("median and mean of the L4 norm agree") {
  auto c = cfg_of("median", R"({"window": {"dim": 2, "level": 64}, "samples": 4000, "seed": 64,
                               "functional": {"kind": "weighted-norm", "r": 4}})");
  auto r = norm_statistics_experiment(c);
  const double gap = r.diagnostics["per_r"][0]["relative_gap"].get<double>();
  CHECK(gap < 0.05);
}

TEST_CASE("L^r medians: r = 2 is exactly one") {
  auto c = cfg_of("lr", R"({"window": {"dim": 2, "level": 12}, "samples": 100, "r_grid": [2, 4, 6, 8]})");
  auto r = lr_median_scaling_experiment(c);
  CHECK(r.find("normalized_median", 2.0)->statistic == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.fit.contains("slope"));
  CHECK(r.fit["r2"].get<double>() >= 0.0);
  CHECK(r.fit["r2"].get<double>() <= 1.0);
}

TEST_CASE("sup-norm experiment respects the deterministic cap") {
  auto c = cfg_of("linfty", R"({"window": {"dim": 2}, "k_grid": [16], "samples": 1, "seed": 8})");
  auto r = linfty_scaling_experiment(c);
  const auto& k = r.diagnostics["per_k"][0];
  CHECK(k["max"].get<double>() <= k["cap"].get<double>());
  CHECK(r.insufficient);  // one level cannot carry a fit

  auto rad = cfg_of("linfty", R"({"window": {"dim": 2}, "k_grid": [4, 8, 12, 16], "samples": 30, "seed": 8,
                                  "law": "rademacher"})");
  auto rr = linfty_scaling_experiment(rad);
  for (const auto& e : rr.diagnostics["per_k"]) CHECK(e["cap_violations"] == 0);
  CHECK(rr.fit["C1"].get<double>() >= rr.fit["C0"].get<double>());
}

TEST_CASE("basis experiment on the ground level") {
  auto c = cfg_of("basis", R"({"window": {"dim": 2}, "k_grid": [0], "seeds": [1, 2]})");
  auto r = basis_experiment(c);
  CHECK(r.find("haar_sup", 0.0)->statistic == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-9));
  CHECK(r.find("tensor_sup", 0.0)->statistic == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(std::isfinite(r.find("haar_ratio", 0.0)->statistic));
}

TEST_CASE("Besov gain experiment") {
  auto c = cfg_of("besov", R"({"window": {"dim": 2}, "blocks": 4, "samples": 2000, "seed": 2,
                              "K_grid": [0.0, 0.05, 0.3, 0.35, 0.4, 0.45]})");
  auto r = besov_sobolev_gain_experiment(c);
  const auto ccdf = r.series("ccdf");
  CHECK(ccdf[0].statistic == 1.0);
  for (std::size_t i = 1; i < ccdf.size(); ++i) CHECK(ccdf[i].statistic <= ccdf[i - 1].statistic);
  CHECK(r.diagnostics["s"] == 0.5);
}

TEST_CASE("Lipschitz concentration") {
  auto c = cfg_of("concentration", R"({"study": "lipschitz", "window": {"dim": 1, "levels": [0, 15]},
                                       "samples": 100000, "seed": 29})");
  auto r = lipschitz_concentration_experiment(c);
  CHECK(r.fit["r2"].get<double>() > 0.9);
  CHECK(r.diagnostics["oracle_max_abs_z"].get<double>() < 4.5);

  // Doubling F doubles its Lipschitz bound; the fitted kappa does not move.
  auto j = c.source;
  j["functional"] = {{"kind", "coordinate"}, {"scale", 2.0}};
  auto r2 = lipschitz_concentration_experiment(parse_config(j, "concentration"));
  CHECK(std::abs(r2.fit["kappa"].get<double>() / r.fit["kappa"].get<double>() - 1.0) < 0.15);

  // The L^2 norm is constant on the sphere: no deviation at all.
  auto k = cfg_of("concentration", R"({"study": "lipschitz", "window": {"dim": 2, "level": 3}, "samples": 1000,
                                       "functional": {"kind": "weighted-norm", "r": 2}})");
  auto rk = lipschitz_concentration_experiment(k);
  for (const auto& row : rk.series("tail")) CHECK(row.statistic == 0.0);
  CHECK(rk.insufficient);
}

TEST_CASE("mean and median of Gaussian vector norms") {
  auto c = cfg_of("concentration", R"({"study": "mean-median-gap", "samples": 20000, "seed": 4, "n_grid": [1, 16, 64, 256]})");
  auto r = mean_median_gap_experiment(c);
  const auto* m1 = r.find("mean", 1.0);
  CHECK(m1->ci_lo <= std::sqrt(2.0 / std::numbers::pi) + 0.005);
  CHECK(m1->ci_hi >= std::sqrt(2.0 / std::numbers::pi) - 0.005);
  CHECK(r.fit["max_gap_n_ge_16"].get<double>() < 1.0);
  CHECK(r.fit["C1"].get<double>() > 0.5);
  CHECK(r.fit["C2"].get<double>() < 1.1);
}

TEST_CASE("norm concentration decreases with N") {
  auto c = cfg_of("concentration", R"({"study": "norm-concentration", "samples": 20000, "seed": 6})");
  auto r = norm_concentration_experiment(c);
  CHECK(r.diagnostics["strictly_decreasing"] == true);
  CHECK(r.diagnostics["min_ratio_to_fit"].get<double>() >= 0.5);
}

TEST_CASE("Paley-Zygmund and Khinchin") {
  auto c = cfg_of("concentration", R"({"study": "paley-zygmund-khinchin", "samples": 20000, "seed": 7})");
  auto r = paley_zygmund_khinchin_check(c);
  CHECK(r.diagnostics["pz_all_hold"] == true);
  CHECK(r.diagnostics["max_l4_over_l2"].get<double>() <= r.diagnostics["khinchin_l4_bound"].get<double>());
  auto rad = cfg_of("concentration", R"({"study": "paley-zygmund-khinchin", "samples": 20000, "seed": 7, "law": "rademacher"})");
  auto rr = paley_zygmund_khinchin_check(rad);
  CHECK(rr.diagnostics["pz_all_hold"] == true);
  CHECK(rr.fit["khinchin_C"].get<double>() >= 1.0 / std::sqrt(2.0) - 1e-12);
}

TEST_CASE("reports do not depend on the worker count") {
  CHECK(determinism_mismatches(3, 77).empty());
  auto c = cfg_of("tail", R"({"window": {"dim": 2, "level": 4}, "samples": 3000, "seed": 1})");
  CHECK(run_experiment(c, 1).to_json(false) == run_experiment(c, 4).to_json(false));
  CHECK(run_experiment(c, 1).to_json(false) != tail_experiment(cfg_of("tail", R"({"window": {"dim": 2, "level": 4}, "samples": 3000, "seed": 2})")).to_json(false));
}

TEST_CASE("selftest passes on a clean build") {
  for (const auto& c : run_selftest(2, 1)) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
}
