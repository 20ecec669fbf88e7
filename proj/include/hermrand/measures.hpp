#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hermrand/rng.hpp"
#include "hermrand/spectral.hpp"

namespace hermrand {

enum class LawKind {
  kComplexGaussian,   ///< re, im independent N(0, 1/2)
  kRealGaussian,      ///< N(0, 1)
  kRademacher,        ///< +-1 with probability 1/2
  kAlphaExponential,  ///< density proportional to exp(-|y|^alpha), rescaled to unit variance
  kBoundedSupport,    ///< piecewise-constant density table, standardized
};

/// Law of the coefficients X_n: mean 0, E|X|^2 = 1.
class RandomLaw {
 public:
  static RandomLaw complex_gaussian();
  static RandomLaw real_gaussian();
  static RandomLaw rademacher();
  /// alpha >= 2. |Y|^alpha is Gamma(1/alpha) distributed, sampled exactly.
  static RandomLaw alpha_exponential(double alpha);
  /// Density proportional to `density[i]` on the i-th of equal bins covering
  /// [lo, hi]; shifted and scaled to mean 0, variance 1.
  static RandomLaw bounded_support(double lo, double hi, std::vector<double> density);

  LawKind kind() const { return kind_; }
  bool is_complex() const { return kind_ == LawKind::kComplexGaussian; }
  double alpha() const { return alpha_; }
  std::string name() const;

  std::complex<double> draw(Stream& rng) const;

  /// Support bounds after standardization (infinite for unbounded laws).
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  const std::vector<double>& density() const { return density_; }

 private:
  LawKind kind_ = LawKind::kComplexGaussian;
  double alpha_ = 0.0;
  double scale_ = 1.0;
  double shift_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double raw_lo_ = 0.0;
  double raw_hi_ = 0.0;
  std::vector<double> density_;
  std::vector<double> cdf_;
};

/// The sequence gamma over the window's multi-indices (in SpectralWindow::indices order).
struct CoefficientProfile {
  SpectralWindow window;
  std::vector<MultiIndex> indices;
  std::vector<double> eigenvalues;
  std::vector<std::complex<double>> gamma;
  double norm_sq = 0.0;

  std::size_t size() const { return gamma.size(); }
};

/// gamma_j = N^{-1/2}.
CoefficientProfile isotropic_profile(const SpectralWindow& w);
/// gamma given explicitly (length N_h).
CoefficientProfile explicit_profile(const SpectralWindow& w, std::vector<std::complex<double>> gamma);
/// gamma_j proportional to lambda_j^{-sigma}, normalized so |gamma|_Lambda = 1.
CoefficientProfile power_profile(const SpectralWindow& w, double sigma);

struct ProfileReport {
  double k0 = 0.0;
  double k1 = 0.0;
  bool lower_squeezing_violated = false;  ///< some gamma_n = 0
};

/// Tightest K0 = N max|g|^2/|g|^2, K1 = N min|g|^2/|g|^2.
ProfileReport validate_profile(std::span<const std::complex<double>> gamma, const SpectralWindow& w);
ProfileReport validate_profile(std::span<const std::complex<double>> gamma, std::size_t n);

/// (gamma_j X_j) with X_j drawn from the stream for (seed, index).
std::vector<std::complex<double>> sample_coefficients(const CoefficientProfile& profile, const RandomLaw& law,
                                                      std::uint64_t seed, std::uint64_t index = 0);

struct SphereSample {
  std::vector<std::complex<double>> coeffs;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// c / |c|. Throws kZeroVector when c = 0.
SphereSample normalize_to_sphere(std::span<const std::complex<double>> coeffs, std::uint64_t seed = 0, std::uint64_t index = 0);

/// P(|u_1| > t) = (1 - t^2)^{N-1} for u uniform on the complex unit sphere of C^N.
double uniform_marginal_ccdf(std::uint64_t n, double t);

struct KakutaniReport {
  double partial_product = 1.0;
  double divergence_sum = 0.0;
};

/// prod_{j<J} pi_j and sum_{j<J} ((gamma_j/beta_j)^{alpha/2} - 1)^2 with
/// pi_j = (1/2 (g/b)^{alpha/2} + 1/2 (b/g)^{alpha/2})^{-1/alpha}.
KakutaniReport kakutani_affinity(std::span<const double> gamma, std::span<const double> beta, double alpha, std::size_t j);

/// max over the s-grid of log(mean e^{sX}) / s^2 from `samples` draws of the real part.
double subgaussian_constant(const RandomLaw& law, std::span<const double> s_grid, std::size_t samples, std::uint64_t seed);

}  // namespace hermrand
