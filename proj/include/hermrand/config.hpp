#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hermrand/measures.hpp"
#include "hermrand/spectral.hpp"

namespace hermrand {

/// One of: {"dim", "level"}, {"dim", "levels": [k0, k1]}, {"dim", "h", "a", "b", "delta"}.
struct WindowSpec {
  int dim = 2;
  int level = -1;
  int level_lo = -1;
  int level_hi = -1;
  double h = 0.0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;

  SpectralWindow build() const;
  bool single_level() const { return level >= 0; }
};

struct ProfileSpec {
  std::string kind = "isotropic";  ///< isotropic | power | explicit
  double sigma = 0.0;
  std::vector<std::complex<double>> gamma;

  CoefficientProfile build(const SpectralWindow& w) const;
};

struct FunctionalSpec {
  /// point: |u(x0)|; coordinate: |<u, phi_first>|; weighted-norm: L^{r,s};
  /// sobolev-norm: W^{s,r}; sup-norm: sup <x>^s |u|.
  std::string kind = "weighted-norm";
  std::vector<double> x0;
  double r = 2.0;
  double s = 0.0;
  /// Multiplies the functional (and its Lipschitz bound).
  double scale = 1.0;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  int bootstrap = 200;
  WindowSpec window;
  ProfileSpec profile;
  RandomLaw law = RandomLaw::complex_gaussian();
  FunctionalSpec functional;
  double theta = 0.0;
  double epsilon0 = 0.5;

  std::vector<double> tau_grid;  ///< t / sqrt(e_L)
  std::vector<double> r_grid;
  std::vector<int> k_grid;
  std::vector<int> n_grid;
  std::vector<double> rho_grid;
  std::vector<double> k_threshold_grid;  ///< K values of the Besov experiment

  // basis
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> modes;
  bool export_bases = false;

  // besov
  int blocks = 5;
  double decay = 0.5;

  // concentration
  std::string study;
  double threshold = 0.2;
  double pz_lambda = 0.5;
  int trials = 20;
  std::vector<int> moments;

  /// Effective configuration (after CLI overrides) and its hash.
  nlohmann::json source;
  std::string hash;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"tail", "median", "linfty", "lr", "basis", "besov", "concentration"};
  return names;
}

/// Reads a JSON file; parse failures and missing files raise kConfig.
nlohmann::json load_json(const std::filesystem::path& file);

/// Validates `j` for the named experiment and fills defaults. Unknown keys,
/// wrong types and out-of-range values raise kConfig.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& experiment);

RandomLaw parse_law(const nlohmann::json& j);

/// FNV-1a 64 of the compact dump. nlohmann::json keeps object keys sorted,
/// so the hash does not depend on key order in the file.
std::string config_hash(const nlohmann::json& j);

}  // namespace hermrand
