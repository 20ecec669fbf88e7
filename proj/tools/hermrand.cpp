#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hermrand/basis.hpp"
#include "hermrand/config.hpp"
#include "hermrand/error.hpp"
#include "hermrand/experiments.hpp"
#include "hermrand/io.hpp"
#include "hermrand/selftest.hpp"
#include "hermrand/spectral.hpp"

namespace fs = std::filesystem;
using namespace hermrand;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInsufficient = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out = ".";
};

struct SpectralArgs {
  int dim = 0;
  std::optional<int> level;
  std::optional<double> h, a, b;
  double delta = 0.0;
  int grid_res = 100;
  double theta = 0.0;
  std::vector<double> p{1.0, 2.0};
  bool mehler = false;
  std::vector<double> t{0.1, 0.5, 1.0, 2.0};
};

std::string trailer(std::uint64_t seed, const std::string& hash) {
  return "," + std::to_string(seed) + "," + hash + "," + HERMRAND_VERSION + "\r\n";
}

int run_spectral(const SpectralArgs& s, const Common& c) {
  nlohmann::json args{{"command", "spectral"}, {"dim", s.dim}, {"grid_res", s.grid_res}, {"theta", s.theta},
                      {"p", s.p},              {"mehler", s.mehler}, {"t", s.t}, {"delta", s.delta}};
  if (s.level) args["level"] = *s.level;
  if (s.h) args["h"] = *s.h;
  if (s.a) args["a"] = *s.a;
  if (s.b) args["b"] = *s.b;
  const std::string hash = config_hash(args);
  const std::uint64_t seed = c.seed.value_or(0);
  const fs::path out(c.out);
  ManifestEntry entry{"spectral", hash, seed, {}, 0.0, kExitOk};
  const auto start = std::chrono::steady_clock::now();

  if (s.mehler) {
    std::string csv = "dim,t,radius,series,closed,relative_residual,seed,config_hash,version\r\n";
    double worst = 0.0;
    for (double t : s.t) {
      if (!(t > 0.0)) throw Error(ErrorCode::kNonPositiveTime, "--t must be positive");
      const double lambda_max = 14.0 * std::log(10.0) / t + 10.0;
      for (int i = 0; i < 5; ++i) {
        const double r = i;
        std::vector<double> x(s.dim, 0.0);
        x[0] = r;
        const double closed = heat_kernel_diag_closed(s.dim, t, x);
        const double series = heat_kernel_diag_series(s.dim, t, x, lambda_max);
        const double res = std::abs(series - closed) / closed;
        worst = std::max(worst, res);
        csv += std::to_string(s.dim) + "," + format_number(t) + "," + format_number(r) + "," + format_number(series) + "," +
               format_number(closed) + "," + format_number(res) + trailer(seed, hash);
      }
    }
    write_text_file(out / "mehler.csv", csv);
    entry.outputs.push_back("mehler.csv");
    std::printf("Mehler identity: max relative residual %.3e\n", worst);
    entry.exit_code = worst < 1e-8 ? kExitOk : kExitCheck;
  } else {
    SpectralWindow w;
    if (s.level) {
      w = single_level_window(s.dim, *s.level);
    } else if (s.h && s.a && s.b) {
      w = enumerate_window(s.dim, *s.h, *s.a, *s.b, s.delta);
    } else {
      throw Error(ErrorCode::kConfig, "give --level or all of --h, --a, --b (or --mehler)");
    }
    if (w.empty()) throw Error(ErrorCode::kConfig, "the window contains no eigenvalue");
    const double lambda = 2.0 * w.max_level() + w.dim;
    const double radius = 1.5 * std::sqrt(lambda) + 2.0;

    std::string prof = "radius,e_axis,e_rotated,relative_residual,seed,config_hash,version\r\n";
    double worst = 0.0;
    for (int i = 0; i < s.grid_res; ++i) {
      const double r = radius * i / std::max(1, s.grid_res - 1);
      std::vector<double> x(s.dim, 0.0), y(s.dim, 0.0);
      x[0] = r;
      if (s.dim >= 2) {
        y[0] = r * std::cos(0.7);
        y[1] = r * std::sin(0.7);
      } else {
        y[0] = -r;
      }
      const double ex = spectral_function(w, x), ey = spectral_function(w, y);
      const double scale = std::max(ex, 1e-300);
      const double res = std::abs(ex - ey) / scale;
      if (ex > 1e-12 * static_cast<double>(w.n_h)) worst = std::max(worst, res);
      prof += format_number(r) + "," + format_number(ex) + "," + format_number(ey) + "," + format_number(res) +
              trailer(seed, hash);
    }
    write_text_file(out / "spectral_profile.csv", prof);

    std::string weyl = "lambda,count,leading_term,ratio,seed,config_hash,version\r\n";
    double fact = 1.0;
    for (int i = 2; i <= s.dim; ++i) fact *= i;
    for (int i = 1; i <= 20; ++i) {
      const double l = (lambda + 2.0) * i / 20.0;
      const auto n = weyl_count(s.dim, l);
      const double lead = std::pow(l, s.dim) / (std::pow(2.0, s.dim) * fact);
      weyl += format_number(l) + "," + std::to_string(n) + "," + format_number(lead) + "," +
              format_number(static_cast<double>(n) / lead) + trailer(seed, hash);
    }
    write_text_file(out / "weyl.csv", weyl);

    std::string inc = "p,theta,value,truncation,grid_too_coarse,seed,config_hash,version\r\n";
    for (double p : s.p) {
      const auto r = spectral_increment_norm(w, p, s.theta, increment_grid(w, p, s.theta));
      inc += format_number(p) + "," + format_number(s.theta) + "," + format_number(r.value) + "," +
             format_number(r.truncation) + "," + (r.grid_too_coarse ? "true" : "false") + trailer(seed, hash);
    }
    write_text_file(out / "increment.csv", inc);
    entry.outputs = {"spectral_profile.csv", "weyl.csv", "increment.csv"};
    std::printf("window [%g, %g): N_h = %llu over %zu level(s); rotation-invariance residual %.3e\n", w.a / w.h,
                w.b / w.h, static_cast<unsigned long long>(w.n_h), w.levels.size(), worst);
  }
  entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  update_manifest(out, entry);
  return entry.exit_code;
}

std::string output_stem(const ExperimentConfig& cfg) {
  if (cfg.experiment != "concentration") return cfg.experiment;
  std::string s = "concentration_" + cfg.study;
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

int run_experiment_command(const std::string& name, const std::string& config_path, const Common& c) {
  auto j = load_json(config_path);
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  if (c.seed) j["seed"] = *c.seed;
  const auto cfg = parse_config(j, name);
  if (c.jobs < 1) throw Error(ErrorCode::kConfig, "--jobs must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const auto report = run_experiment(cfg, c.jobs);
  const fs::path out(c.out);
  const std::string stem = output_stem(cfg);
  ManifestEntry entry{stem, cfg.hash, cfg.seed, {stem + ".json", stem + ".csv"}, 0.0, kExitOk};

  auto doc = report.to_json();
  doc["config"] = cfg.source;
  write_text_file(out / (stem + ".json"), doc.dump(2) + "\n");
  write_text_file(out / (stem + ".csv"), report_csv(report));
  if (cfg.experiment == "basis" && cfg.export_bases) {
    for (int k : cfg.k_grid)
      for (auto s : cfg.seeds) {
        const std::string f = "bases/basis_d" + std::to_string(cfg.window.dim) + "_k" + std::to_string(k) + "_seed" +
                              std::to_string(s) + ".json";
        auto bj = basis_to_json(random_eigenbasis(cfg.window.dim, k, s));
        bj["seed"] = s;
        bj["config_hash"] = cfg.hash;
        bj["version"] = HERMRAND_VERSION;
        write_text_file(out / f, bj.dump() + "\n");
        entry.outputs.push_back(f);
      }
  }
  if (report.insufficient) entry.exit_code = kExitInsufficient;
  entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  update_manifest(out, entry);

  std::printf("%s: %zu rows -> %s\n", stem.c_str(), report.rows.size(), (out / (stem + ".json")).string().c_str());
  if (!report.fit.empty()) std::printf("fit: %s\n", report.fit.dump().c_str());
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (report.insufficient) {
    std::fprintf(stderr, "insufficient samples: %s\n", report.insufficient_reason.c_str());
  }
  return entry.exit_code;
}

int run_selftest_command(const Common& c) {
  const auto checks = run_selftest(c.jobs, c.seed.value_or(1));
  bool ok = true;
  for (const auto& r : checks) {
    std::printf("%s  %-22s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  if (!ok) {
    std::printf("failing checks:");
    for (const auto& r : checks)
      if (!r.passed) std::printf(" [%s]", r.name.c_str());
    std::printf("\n");
  }
  return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Hermite expansions: spectral quantities, Monte-Carlo experiments and self-test"};
  app.set_version_flag("--version", HERMRAND_VERSION);
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Seed override (unsigned 64-bit)");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "Output directory");
  };

  SpectralArgs sa;
  auto* spectral = app.add_subcommand("spectral", "Spectral function profiles, Weyl counts, increment norms, Mehler check");
  spectral->set_help_flag("--help", "Print this help message and exit");
  spectral->add_option("--dim", sa.dim, "Dimension d")->required()->check(CLI::Range(1, 8));
  spectral->add_option("--level", sa.level, "Single level k (window [2k+d, 2k+d+2))")->check(CLI::NonNegativeNumber);
  spectral->add_option("--h", sa.h, "Semiclassical parameter h in (0, 1]");
  spectral->add_option("--a", sa.a, "Window start a (interval [a/h, b/h))");
  spectral->add_option("--b", sa.b, "Window end b");
  spectral->add_option("--delta", sa.delta, "Window exponent delta");
  spectral->add_option("--grid-res", sa.grid_res, "Radial sample points")->check(CLI::Range(2, 1000000));
  spectral->add_option("--theta", sa.theta, "Weight exponent theta of the increment norms");
  spectral->add_option("--p", sa.p, "Increment-norm exponents p");
  spectral->add_flag("--mehler", sa.mehler, "Check the Mehler identity instead");
  spectral->add_option("--t", sa.t, "Heat times for --mehler");
  add_common(spectral);

  auto* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo experiment from a JSON config");
  experiment->require_subcommand(1);
  std::string config_path;
  for (const auto& name : experiment_names()) {
    auto* sub = experiment->add_subcommand(name, name + " experiment");
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    add_common(sub);
  }

  auto* selftest = app.add_subcommand("selftest", "Fast invariant suite; exit 0 iff every check passes");
  add_common(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (spectral->parsed()) return run_spectral(sa, common);
    if (selftest->parsed()) return run_selftest_command(common);
    for (auto* sub : experiment->get_subcommands()) {
      if (sub->parsed()) return run_experiment_command(sub->get_name(), config_path, common);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kInsufficientSamples ? kExitInsufficient : kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheck;
  }
  return kExitUsage;
}
