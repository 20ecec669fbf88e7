#include "hermrand/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hermrand/error.hpp"
#include "hermrand/norms.hpp"

namespace hermrand {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_double(const json& v, const std::string& key) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return kInfinity;
  if (!v.is_number()) bad("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad("'" + key + "' must be finite");
  return x;
}

long long as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad("'" + key + "' must be an integer");
  return v.get<long long>();
}

double get_double(const json& j, const char* key, double def, double lo, double hi) {
  const json* v = find(j, key);
  if (v == nullptr) return def;
  const double x = as_double(*v, key);
  if (x < lo || x > hi) bad(std::string("'") + key + "' out of range");
  return x;
}

long long get_int(const json& j, const char* key, long long def, long long lo, long long hi) {
  const json* v = find(j, key);
  if (v == nullptr) return def;
  const long long x = as_int(*v, key);
  if (x < lo || x > hi) bad(std::string("'") + key + "' out of range");
  return x;
}

template <class T>
std::vector<T> get_list(const json& j, const char* key, std::vector<T> def, double lo, double hi) {
  const json* v = find(j, key);
  if (v == nullptr) return def;
  if (!v->is_array() || v->empty()) bad(std::string("'") + key + "' must be a nonempty array");
  std::vector<T> out;
  for (const auto& e : *v) {
    double x;
    if constexpr (std::is_integral_v<T>) {
      x = static_cast<double>(as_int(e, key));
    } else {
      x = as_double(e, key);
    }
    if (x < lo || x > hi) bad(std::string("'") + key + "' entry out of range");
    out.push_back(static_cast<T>(x));
  }
  return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

WindowSpec parse_window(const json& j, bool dim_only_ok) {
  check_keys(j, {"dim", "level", "levels", "h", "a", "b", "delta"}, "window");
  WindowSpec w;
  w.dim = static_cast<int>(get_int(j, "dim", 2, 1, 8));
  const bool has_level = j.contains("level");
  const bool has_levels = j.contains("levels");
  const bool has_h = j.contains("h") || j.contains("a") || j.contains("b");
  if (has_level + has_levels + has_h > 1) bad("window: give one of 'level', 'levels' or 'h'/'a'/'b'");
  if (has_level) {
    w.level = static_cast<int>(get_int(j, "level", 0, 0, 100000));
  } else if (has_levels) {
    auto lv = get_list<int>(j, "levels", {}, 0, 100000);
    if (lv.size() != 2 || lv[0] > lv[1]) bad("window 'levels' must be [k0, k1] with k0 <= k1");
    w.level_lo = lv[0];
    w.level_hi = lv[1];
  } else if (has_h) {
    for (const char* k : {"h", "a", "b"})
      if (!j.contains(k)) bad(std::string("window needs '") + k + "'");
    w.h = get_double(j, "h", 1.0, 0.0, 1.0);
    w.a = get_double(j, "a", 0.0, 0.0, 1e12);
    w.b = get_double(j, "b", 0.0, 0.0, 1e12);
    w.delta = get_double(j, "delta", 0.0, 0.0, 1.0);
    if (!(w.h > 0.0) || !(w.a > 0.0) || !(w.a < w.b)) bad("window needs h in (0, 1] and 0 < a < b");
  } else if (!dim_only_ok) {
    bad("window needs 'level', 'levels' or 'h'/'a'/'b'");
  }
  return w;
}

ProfileSpec parse_profile(const json& j) {
  ProfileSpec p;
  if (j.is_string()) {
    p.kind = j.get<std::string>();
    if (p.kind != "isotropic") bad("profile '" + p.kind + "' needs parameters");
    return p;
  }
  check_keys(j, {"kind", "sigma", "gamma"}, "profile");
  if (!j.contains("kind") || !j["kind"].is_string()) bad("profile needs a string 'kind'");
  p.kind = j["kind"].get<std::string>();
  if (p.kind == "isotropic") return p;
  if (p.kind == "power") {
    p.sigma = get_double(j, "sigma", 0.0, -1e3, 1e3);
    return p;
  }
  if (p.kind == "explicit") {
    const json* g = find(j, "gamma");
    if (g == nullptr || !g->is_array() || g->empty()) bad("explicit profile needs a nonempty 'gamma'");
    for (const auto& e : *g) {
      if (e.is_array()) {
        if (e.size() != 2) bad("complex gamma entries are [re, im]");
        p.gamma.emplace_back(as_double(e[0], "gamma"), as_double(e[1], "gamma"));
      } else {
        p.gamma.emplace_back(as_double(e, "gamma"), 0.0);
      }
    }
    return p;
  }
  bad("unknown profile kind '" + p.kind + "'");
}

FunctionalSpec parse_functional(const json& j, const FunctionalSpec& def) {
  FunctionalSpec f = def;
  check_keys(j, {"kind", "x0", "r", "s", "scale"}, "functional");
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("functional 'kind' must be a string");
    f.kind = j["kind"].get<std::string>();
  }
  static const std::set<std::string> kinds{"point", "coordinate", "weighted-norm", "sobolev-norm", "sup-norm"};
  if (!kinds.count(f.kind)) bad("unknown functional kind '" + f.kind + "'");
  if (j.contains("x0")) f.x0 = get_list<double>(j, "x0", {}, -1e6, 1e6);
  f.r = get_double(j, "r", f.r, 1.0, kInfinity);
  f.s = get_double(j, "s", f.s, -1e3, 1e3);
  f.scale = get_double(j, "scale", f.scale, 1e-300, 1e300);
  if (f.kind == "sup-norm") f.r = kInfinity;
  return f;
}

}  // namespace

SpectralWindow WindowSpec::build() const {
  SpectralWindow w;
  if (level >= 0) {
    w = single_level_window(dim, level);
  } else if (level_lo >= 0) {
    w = level_range_window(dim, level_lo, level_hi);
  } else if (h > 0.0) {
    w = enumerate_window(dim, h, a, b, delta);
  } else {
    throw Error(ErrorCode::kConfig, "window has no spectral interval");
  }
  if (w.empty()) throw Error(ErrorCode::kConfig, "window contains no eigenvalue");
  return w;
}

CoefficientProfile ProfileSpec::build(const SpectralWindow& w) const {
  try {
    if (kind == "power") return power_profile(w, sigma);
    if (kind == "explicit") return explicit_profile(w, gamma);
    return isotropic_profile(w);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("profile: ") + e.what());
  }
}

RandomLaw parse_law(const json& j) {
  json obj = j.is_string() ? json{{"kind", j}} : j;
  check_keys(obj, {"kind", "alpha", "lo", "hi", "density"}, "law");
  if (!obj.contains("kind") || !obj["kind"].is_string()) bad("law needs a string 'kind'");
  const auto kind = obj["kind"].get<std::string>();
  try {
    if (kind == "complex_gaussian") return RandomLaw::complex_gaussian();
    if (kind == "real_gaussian") return RandomLaw::real_gaussian();
    if (kind == "rademacher") return RandomLaw::rademacher();
    if (kind == "alpha_exponential") {
      if (!obj.contains("alpha")) bad("alpha_exponential needs 'alpha'");
      return RandomLaw::alpha_exponential(get_double(obj, "alpha", 2.0, -1e9, 1e9));
    }
    if (kind == "bounded_support") {
      for (const char* k : {"lo", "hi", "density"})
        if (!obj.contains(k)) bad(std::string("bounded_support needs '") + k + "'");
      return RandomLaw::bounded_support(get_double(obj, "lo", 0, -1e9, 1e9), get_double(obj, "hi", 0, -1e9, 1e9),
                                        get_list<double>(obj, "density", {}, 0.0, 1e300));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    bad(std::string("law: ") + e.what());
  }
  bad("unknown law kind '" + kind + "'");
}

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) bad("cannot open config file '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

ExperimentConfig parse_config(const json& j, const std::string& experiment) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) bad("unknown experiment '" + experiment + "'");
  check_keys(j,
             {"experiment", "seed", "samples", "bootstrap", "window", "profile", "law", "functional", "theta", "epsilon0",
              "tau_grid", "r_grid", "k_grid", "n_grid", "rho_grid", "K_grid", "seeds", "modes", "export_bases", "blocks",
              "decay", "study", "threshold", "pz_lambda", "trials", "moments", "description"},
             "config");
  if (j.contains("experiment") && j["experiment"] != experiment) {
    bad("config is for experiment '" + j["experiment"].dump() + "', not '" + experiment + "'");
  }
  if (j.contains("description") && !j["description"].is_string()) bad("'description' must be a string");

  ExperimentConfig c;
  c.experiment = experiment;
  if (const json* s = find(j, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      bad("'seed' must be a nonnegative integer");
    }
    c.seed = s->get<std::uint64_t>();
  }
  c.bootstrap = static_cast<int>(get_int(j, "bootstrap", 200, 200, 100000));
  c.theta = get_double(j, "theta", 0.0, 0.0, 64.0);
  c.epsilon0 = get_double(j, "epsilon0", 0.5, 1e-9, 1.0);

  if (experiment == "concentration") {
    if (!j.contains("study") || !j["study"].is_string()) bad("concentration needs a string 'study'");
    c.study = j["study"].get<std::string>();
    static const std::set<std::string> studies{"lipschitz", "mean-median-gap", "norm-concentration", "paley-zygmund-khinchin"};
    if (!studies.count(c.study)) bad("unknown study '" + c.study + "'");
  } else if (j.contains("study")) {
    bad("'study' only applies to the concentration experiment");
  }

  const bool needs_window = experiment == "tail" || experiment == "median" || experiment == "lr" ||
                            (experiment == "concentration" && c.study == "lipschitz");
  if (const json* w = find(j, "window")) {
    c.window = parse_window(*w, !needs_window);
  } else if (needs_window) {
    bad("'window' is required");
  }

  const bool tail_like = experiment == "tail" || experiment == "besov" ||
                         (experiment == "concentration" && (c.study == "lipschitz" || c.study == "norm-concentration"));
  const long long default_samples = tail_like ? 10000 : 1000;
  c.samples = static_cast<std::size_t>(get_int(j, "samples", default_samples, tail_like ? 1000 : 1, 100000000));

  if (const json* p = find(j, "profile")) c.profile = parse_profile(*p);
  if (const json* l = find(j, "law")) {
    c.law = parse_law(*l);
  } else if (c.study == "mean-median-gap") {
    c.law = RandomLaw::real_gaussian();
  }

  FunctionalSpec fdef;
  if (experiment == "tail") fdef.kind = "point";
  if (experiment == "linfty") fdef.kind = "sup-norm";
  if (experiment == "besov") fdef.r = 4.0;
  if (c.study == "lipschitz") fdef.kind = "coordinate";
  c.functional = fdef;
  if (const json* f = find(j, "functional")) c.functional = parse_functional(*f, fdef);
  if (c.functional.kind == "point") {
    if (c.functional.x0.empty()) c.functional.x0.assign(c.window.dim, 0.0);
    if (static_cast<int>(c.functional.x0.size()) != c.window.dim) bad("functional 'x0' length differs from the dimension");
  }
  if (experiment == "tail" && c.functional.kind != "point") bad("the tail experiment needs a point functional");

  std::vector<double> tau;
  for (int i = 1; i <= 10; ++i) tau.push_back(0.05 * i);
  c.tau_grid = get_list<double>(j, "tau_grid", tau, 0.0, 1.0);
  c.r_grid = get_list<double>(j, "r_grid", experiment == "lr" ? std::vector<double>{2, 4, 8, 16} : std::vector<double>{},
                              1.0, kInfinity);
  std::vector<int> kdef;
  if (experiment == "linfty") kdef = {16, 32, 64, 128, 256};
  if (experiment == "basis") kdef = {8, 16, 32, 64, 128};
  c.k_grid = get_list<int>(j, "k_grid", kdef, 0, 2047);
  std::vector<int> ndef;
  if (c.study == "mean-median-gap") ndef = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  if (c.study == "norm-concentration") ndef = {8, 16, 32, 64, 128};
  if (c.study == "paley-zygmund-khinchin") ndef = {32};
  c.n_grid = get_list<int>(j, "n_grid", ndef, 1, 1 << 20);
  std::vector<double> rho;
  for (int i = 1; i <= 12; ++i) rho.push_back(0.25 * i);
  c.rho_grid = get_list<double>(j, "rho_grid", rho, 0.0, 1e6);
  c.k_threshold_grid = get_list<double>(j, "K_grid", {}, 0.0, 1e12);

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  c.seeds = get_list<std::uint64_t>(j, "seeds", seeds, 0.0, 9.0e15);
  c.modes = {"haar", "tensor"};
  if (const json* m = find(j, "modes")) {
    if (!m->is_array() || m->empty()) bad("'modes' must be a nonempty array");
    c.modes.clear();
    for (const auto& e : *m) {
      if (!e.is_string() || (e != "haar" && e != "tensor")) bad("'modes' entries are \"haar\" or \"tensor\"");
      c.modes.push_back(e.get<std::string>());
    }
  }
  if (const json* e = find(j, "export_bases")) {
    if (!e->is_boolean()) bad("'export_bases' must be a boolean");
    c.export_bases = e->get<bool>();
  }
  c.blocks = static_cast<int>(get_int(j, "blocks", 5, 1, 12));
  c.decay = get_double(j, "decay", 0.5, -10.0, 10.0);
  c.threshold = get_double(j, "threshold", 0.2, 1e-9, 1e6);
  c.pz_lambda = get_double(j, "pz_lambda", 0.5, 1e-9, 1.0 - 1e-9);
  c.trials = static_cast<int>(get_int(j, "trials", 20, 1, 100000));
  c.moments = get_list<int>(j, "moments", {2, 4, 8}, 1, 64);

  if (experiment == "linfty" || experiment == "basis") {
    if (c.k_grid.empty()) bad("'k_grid' must be nonempty");
    if (experiment == "linfty" && c.window.dim < 2) bad("the L-infinity experiment needs dim >= 2");
    if (!j.contains("theta") && experiment == "linfty") c.theta = c.window.dim;
  }
  if (experiment == "lr" && c.r_grid.empty()) bad("'r_grid' must be nonempty");

  c.source = j;
  c.source["experiment"] = experiment;
  c.source["seed"] = c.seed;
  c.hash = config_hash(c.source);
  return c;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hermrand
