#include "hermrand/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hermrand/error.hpp"
#include "hermrand/hermite.hpp"

namespace hermrand {

std::vector<MultiIndex> SpectralWindow::indices() const {
  std::vector<MultiIndex> out;
  out.reserve(n_h);
  for (const auto& level : levels) {
    auto part = level_multi_indices(dim, level.k);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<double> SpectralWindow::eigenvalues() const {
  std::vector<double> out;
  out.reserve(n_h);
  for (const auto& level : levels) out.insert(out.end(), level.multiplicity, level.eigenvalue);
  return out;
}

namespace {
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}
}  // namespace

SpectralWindow enumerate_window(int d, double h, double a, double b, double delta) {
  if (d < 1) throw Error(ErrorCode::kInvalidWindow, "dimension must be >= 1");
  if (!std::isfinite(h) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kNonFiniteInput, "window parameters must be finite");
  }
  if (!(h > 0.0) || h > 1.0) throw Error(ErrorCode::kInvalidWindow, "h must lie in (0, 1]");
  if (!(a > 0.0) || a > b) throw Error(ErrorCode::kInvalidWindow, "need 0 < a <= b");

  SpectralWindow w;
  w.dim = d;
  w.h = h;
  w.a = a;
  w.b = b;
  w.delta = delta;
  const double lo = snap(a / h);
  const double hi = snap(b / h);
  int k = std::max(0, static_cast<int>(std::ceil((lo - d) / 2.0)));
  for (; 2.0 * k + d < hi; ++k) {
    if (2.0 * k + d < lo) continue;
    const auto m = level_multiplicity(d, k);
    w.levels.push_back({k, 2.0 * k + d, m});
    w.n_h += m;
  }
  return w;
}

SpectralWindow single_level_window(int d, int k) {
  if (k < 0) throw Error(ErrorCode::kInvalidWindow, "negative level");
  if (k == 0) return enumerate_window(d, 1.0, d, d + 2.0);
  const double h = 1.0 / k;
  return enumerate_window(d, h, 2.0 + d * h, 2.0 + (2.0 + d) * h);
}

SpectralWindow level_range_window(int d, int k0, int k1) {
  if (k0 < 0 || k1 < k0) throw Error(ErrorCode::kInvalidWindow, "need 0 <= k0 <= k1");
  return enumerate_window(d, 1.0, 2.0 * k0 + d, 2.0 * k1 + d + 1.0);
}

double eigenfunction_eval(const MultiIndex& j, std::span<const double> x) {
  if (static_cast<int>(x.size()) != j.dim()) throw Error(ErrorCode::kLengthMismatch, "point and multi-index differ in dimension");
  double v = 1.0;
  for (int a = 0; a < j.dim(); ++a) v *= hermite_function(j.components[a], x[a]);
  return v;
}

std::vector<double> level_sums(int d, int k_max, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d) throw Error(ErrorCode::kLengthMismatch, "point dimension differs from d");
  if (k_max < 0) return {};
  std::vector<double> acc(k_max + 1, 0.0);
  acc[0] = 1.0;
  std::vector<double> sq(k_max + 1);
  std::vector<double> next(k_max + 1);
  for (int a = 0; a < d; ++a) {
    hermite_functions(x[a], sq);
    for (auto& v : sq) v *= v;
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i <= k_max; ++i) {
      if (acc[i] == 0.0) continue;
      for (int n = 0; i + n <= k_max; ++n) next[i + n] += acc[i] * sq[n];
    }
    acc.swap(next);
  }
  return acc;
}

double spectral_function(const SpectralWindow& w, std::span<const double> x, double s) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "spectral function of an empty window");
  const auto sums = level_sums(w.dim, w.max_level(), x);
  double e = 0.0;
  for (const auto& level : w.levels) {
    e += (s == 0.0 ? 1.0 : std::pow(level.eigenvalue, s)) * sums[level.k];
  }
  return e;
}

std::vector<double> spectral_function_on_grid(const SpectralWindow& w, const QuadratureGrid& grid, double s) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "spectral function of an empty window");
  if (grid.dim() != w.dim) throw Error(ErrorCode::kLengthMismatch, "grid dimension differs from window");
  GridEvaluator eval(grid, w.max_level());
  const auto idx = w.indices();
  if (s == 0.0) return eval.sum_of_squares(idx);
  std::vector<double> weights;
  weights.reserve(idx.size());
  for (const auto& j : idx) weights.push_back(std::pow(j.eigenvalue(), s));
  return eval.sum_of_squares(idx, weights);
}

double heat_kernel_diag_closed(int d, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw Error(ErrorCode::kNonPositiveTime, "t must be positive");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(2.0 * std::numbers::pi * std::sinh(2.0 * t), -0.5 * d) * std::exp(-r2 * std::tanh(t));
}

double heat_kernel_diag_series(int d, double t, std::span<const double> x, double lambda_max) {
  if (!(t > 0.0)) throw Error(ErrorCode::kNonPositiveTime, "t must be positive");
  if (lambda_max < d) return 0.0;
  const int k_max = static_cast<int>(std::floor((lambda_max - d) / 2.0));
  const auto sums = level_sums(d, k_max, x);
  // Smallest terms first.
  double total = 0.0;
  for (int k = k_max; k >= 0; --k) total += std::exp(-t * (2.0 * k + d)) * sums[k];
  return total;
}

std::uint64_t weyl_count(int d, double lambda) {
  if (d < 1) throw Error(ErrorCode::kDomain, "dimension must be >= 1");
  if (lambda < d) return 0;
  // sum_{k<=K} C(k+d-1, d-1) = C(K+d, d)
  const int k_max = static_cast<int>(std::floor((lambda - d) / 2.0));
  return level_multiplicity(d + 1, k_max);
}

double beta_exponent(int d, double r, double theta) {
  if (std::isinf(r)) return (d - theta) / 2.0;
  return (d - theta) / 2.0 * (1.0 - 2.0 / r);
}

namespace {
bool is_integer(double v) { return std::floor(v) == v; }
}  // namespace

QuadratureGrid increment_grid(const SpectralWindow& w, double p, double theta) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "increment grid for an empty window");
  const int k = w.max_level();
  const double power = theta * (p - 1.0);
  if (is_integer(p) && power >= 0.0 && is_integer(power) && static_cast<long>(power) % 2 == 0) {
    const int degree = static_cast<int>(2.0 * p) * k + static_cast<int>(power);
    const int order = degree / 2 + 1;
    if (order <= kMaxQuadratureOrder) return gauss_hermite_grid(w.dim, order, p, k);
  }
  const double lambda = 2.0 * k + w.dim;
  return uniform_grid(w.dim, 1.5 * std::sqrt(lambda) + 2.0, band_limited_spacing(lambda, 2.0 * p));
}

IncrementNorm spectral_increment_norm(const SpectralWindow& w, double p, double theta, const QuadratureGrid& grid) {
  if (w.empty()) throw Error(ErrorCode::kEmptyWindow, "increment norm of an empty window");
  if (!(p >= 1.0)) throw Error(ErrorCode::kDomain, "p must be >= 1");
  if (p > 1.0 && !(theta > -w.dim / (p - 1.0))) throw Error(ErrorCode::kDomain, "theta must exceed -d/(p-1)");
  if (grid.max_level() < w.max_level()) throw Error(ErrorCode::kGridEnvelope, "window exceeds the grid design level");
  const auto e = spectral_function_on_grid(w, grid);
  const auto& wt = grid.weights();
  const auto& r2 = grid.radius_sq();
  const double power = theta * (p - 1.0);
  std::vector<double> integrand(grid.size());
  const bool integer_p = is_integer(p) && p <= 64.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ep = integer_p ? std::pow(e[i], static_cast<int>(p)) : std::pow(e[i], p);
    integrand[i] = (power == 0.0 ? ep : ep * std::pow(1.0 + r2[i], power / 2.0));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sum += wt[i] * integrand[i];
  IncrementNorm out;
  out.value = std::pow(sum, 1.0 / p);
  out.truncation = boundary_mass_fraction(grid, integrand);
  out.grid_too_coarse = out.truncation > 1e-6;
  return out;
}

}  // namespace hermrand
