#include "hermrand/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "hermrand/error.hpp"

namespace hermrand {

RandomLaw RandomLaw::complex_gaussian() {
  RandomLaw law;
  law.kind_ = LawKind::kComplexGaussian;
  law.lo_ = -std::numeric_limits<double>::infinity();
  law.hi_ = std::numeric_limits<double>::infinity();
  return law;
}

RandomLaw RandomLaw::real_gaussian() {
  RandomLaw law = complex_gaussian();
  law.kind_ = LawKind::kRealGaussian;
  return law;
}

RandomLaw RandomLaw::rademacher() {
  RandomLaw law;
  law.kind_ = LawKind::kRademacher;
  law.lo_ = -1.0;
  law.hi_ = 1.0;
  return law;
}

RandomLaw RandomLaw::alpha_exponential(double alpha) {
  if (!(alpha >= 2.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kDomain, "alpha-exponential law needs finite alpha >= 2");
  RandomLaw law = complex_gaussian();
  law.kind_ = LawKind::kAlphaExponential;
  law.alpha_ = alpha;
  // E|Y|^2 = Gamma(3/alpha) / Gamma(1/alpha)
  law.scale_ = std::sqrt(std::exp(std::lgamma(1.0 / alpha) - std::lgamma(3.0 / alpha)));
  return law;
}

RandomLaw RandomLaw::bounded_support(double lo, double hi, std::vector<double> density) {
  if (!(lo < hi) || density.empty()) throw Error(ErrorCode::kDomain, "bounded-support law needs lo < hi and a nonempty table");
  double total = 0.0;
  for (double v : density) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::kDomain, "density table entries must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kDomain, "density table has zero mass");
  RandomLaw law;
  law.kind_ = LawKind::kBoundedSupport;
  law.raw_lo_ = lo;
  law.raw_hi_ = hi;
  const double width = (hi - lo) / density.size();
  double mean = 0.0, second = 0.0, acc = 0.0;
  law.cdf_.resize(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double p = density[i] / total;
    const double a = lo + i * width, b = a + width;
    mean += p * (a + b) / 2.0;
    second += p * (a * a + a * b + b * b) / 3.0;
    acc += p;
    law.cdf_[i] = acc;
  }
  law.cdf_.back() = 1.0;
  const double var = second - mean * mean;
  if (!(var > 0.0)) throw Error(ErrorCode::kDomain, "density table is degenerate");
  law.shift_ = mean;
  law.scale_ = 1.0 / std::sqrt(var);
  law.lo_ = (lo - mean) * law.scale_;
  law.hi_ = (hi - mean) * law.scale_;
  law.density_ = std::move(density);
  return law;
}

std::string RandomLaw::name() const {
  switch (kind_) {
    case LawKind::kComplexGaussian: return "complex_gaussian";
    case LawKind::kRealGaussian: return "real_gaussian";
    case LawKind::kRademacher: return "rademacher";
    case LawKind::kAlphaExponential: return "alpha_exponential";
    case LawKind::kBoundedSupport: return "bounded_support";
  }
  return "unknown";
}

std::complex<double> RandomLaw::draw(Stream& rng) const {
  switch (kind_) {
    case LawKind::kComplexGaussian: {
      boost::random::normal_distribution<double> n(0.0, std::numbers::sqrt2 / 2.0);
      const double re = n(rng);
      return {re, n(rng)};
    }
    case LawKind::kRealGaussian: {
      boost::random::normal_distribution<double> n(0.0, 1.0);
      return {n(rng), 0.0};
    }
    case LawKind::kRademacher:
      return {(rng() >> 63) ? 1.0 : -1.0, 0.0};
    case LawKind::kAlphaExponential: {
      boost::random::gamma_distribution<double> g(1.0 / alpha_);
      const double mag = std::pow(g(rng), 1.0 / alpha_);
      return {((rng() >> 63) ? mag : -mag) * scale_, 0.0};
    }
    case LawKind::kBoundedSupport: {
      const double u = rng.uniform();
      const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t i = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
      const double below = i == 0 ? 0.0 : cdf_[i - 1];
      const double frac = cdf_[i] > below ? (u - below) / (cdf_[i] - below) : 0.5;
      const double width = (raw_hi_ - raw_lo_) / cdf_.size();
      const double y = raw_lo_ + (i + frac) * width;
      return {(y - shift_) * scale_, 0.0};
    }
  }
  return {0.0, 0.0};
}

namespace {
CoefficientProfile make_profile(const SpectralWindow& w, std::vector<std::complex<double>> gamma) {
  CoefficientProfile p;
  p.window = w;
  p.indices = w.indices();
  p.eigenvalues = w.eigenvalues();
  if (gamma.size() != p.indices.size()) throw Error(ErrorCode::kLengthMismatch, "profile length differs from N_h");
  p.gamma = std::move(gamma);
  for (const auto& g : p.gamma) p.norm_sq += std::norm(g);
  if (!(p.norm_sq > 0.0)) throw Error(ErrorCode::kZeroProfile, "profile is identically zero");
  return p;
}
}  // namespace

CoefficientProfile isotropic_profile(const SpectralWindow& w) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "profile over an empty window");
  return make_profile(w, std::vector<std::complex<double>>(w.n_h, 1.0 / std::sqrt(static_cast<double>(w.n_h))));
}

CoefficientProfile explicit_profile(const SpectralWindow& w, std::vector<std::complex<double>> gamma) {
  return make_profile(w, std::move(gamma));
}

CoefficientProfile power_profile(const SpectralWindow& w, double sigma) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "profile over an empty window");
  const auto lambdas = w.eigenvalues();
  std::vector<std::complex<double>> g(lambdas.size());
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = std::pow(lambdas[i], -sigma);
    s += std::norm(g[i]);
  }
  for (auto& v : g) v /= std::sqrt(s);
  return make_profile(w, std::move(g));
}

ProfileReport validate_profile(std::span<const std::complex<double>> gamma, std::size_t n) {
  if (gamma.size() != n) throw Error(ErrorCode::kLengthMismatch, "profile length differs from N_h");
  double total = 0.0, hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (const auto& g : gamma) {
    const double a = std::norm(g);
    total += a;
    hi = std::max(hi, a);
    lo = std::min(lo, a);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroProfile, "profile is identically zero");
  ProfileReport r;
  r.k0 = n * hi / total;
  r.k1 = n * lo / total;
  r.lower_squeezing_violated = lo == 0.0;
  return r;
}

ProfileReport validate_profile(std::span<const std::complex<double>> gamma, const SpectralWindow& w) {
  return validate_profile(gamma, static_cast<std::size_t>(w.n_h));
}

std::vector<std::complex<double>> sample_coefficients(const CoefficientProfile& profile, const RandomLaw& law,
                                                      std::uint64_t seed, std::uint64_t index) {
  Stream rng(seed, index);
  std::vector<std::complex<double>> c(profile.gamma.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = profile.gamma[j] * law.draw(rng);
  return c;
}

SphereSample normalize_to_sphere(std::span<const std::complex<double>> coeffs, std::uint64_t seed, std::uint64_t index) {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  if (!(s > 0.0)) throw Error(ErrorCode::kZeroVector, "cannot normalize the zero vector");
  const double inv = 1.0 / std::sqrt(s);
  SphereSample out;
  out.seed = seed;
  out.index = index;
  out.coeffs.reserve(coeffs.size());
  for (const auto& c : coeffs) out.coeffs.push_back(c * inv);
  return out;
}

double uniform_marginal_ccdf(std::uint64_t n, double t) {
  if (n < 1) throw Error(ErrorCode::kDomain, "N must be >= 1");
  if (!(t >= 0.0) || !(t < 1.0)) throw Error(ErrorCode::kDomain, "t must lie in [0, 1)");
  return std::pow(1.0 - t * t, static_cast<double>(n - 1));
}

KakutaniReport kakutani_affinity(std::span<const double> gamma, std::span<const double> beta, double alpha, std::size_t j) {
  if (!(alpha >= 2.0)) throw Error(ErrorCode::kDomain, "alpha must be >= 2");
  if (j > gamma.size() || j > beta.size()) throw Error(ErrorCode::kLengthMismatch, "J exceeds the sequence length");
  KakutaniReport r;
  double log_product = 0.0;
  for (std::size_t i = 0; i < j; ++i) {
    if (!(gamma[i] > 0.0) || !(beta[i] > 0.0)) throw Error(ErrorCode::kNonPositiveEntry, "entries must be strictly positive");
    const double q = std::pow(gamma[i] / beta[i], alpha / 2.0);
    log_product += -std::log(0.5 * q + 0.5 / q) / alpha;
    r.divergence_sum += (q - 1.0) * (q - 1.0);
  }
  r.partial_product = std::exp(log_product);
  return r;
}

double subgaussian_constant(const RandomLaw& law, std::span<const double> s_grid, std::size_t samples, std::uint64_t seed) {
  std::vector<double> x(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    Stream rng(seed, i);
    x[i] = law.draw(rng).real();
  }
  double c = 0.0;
  for (double s : s_grid) {
    if (s == 0.0) continue;
    // log-mean-exp with the maximum factored out
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, s * v);
    double acc = 0.0;
    for (double v : x) acc += std::exp(s * v - m);
    c = std::max(c, (m + std::log(acc / samples)) / (s * s));
  }
  return c;
}

}  // namespace hermrand
