#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hermrand/grid.hpp"
#include "hermrand/multi_index.hpp"

namespace hermrand {

struct SpectralLevel {
  int k = 0;
  double eigenvalue = 0.0;  ///< 2k + d
  std::uint64_t multiplicity = 0;
};

/// Eigenvalue window I_h = [a/h, b/h) of the d-dimensional harmonic oscillator.
/// Levels are stored compactly; multi-indices are expanded on demand.
struct SpectralWindow {
  int dim = 1;
  double h = 1.0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;
  std::vector<SpectralLevel> levels;
  std::uint64_t n_h = 0;

  bool empty() const { return n_h == 0; }
  int max_level() const { return levels.empty() ? -1 : levels.back().k; }
  /// All multi-indices of the window, level by level.
  std::vector<MultiIndex> indices() const;
  /// Eigenvalue of each entry of indices(), in the same order.
  std::vector<double> eigenvalues() const;
};

/// Levels k with a/h <= 2k+d < b/h. Interval ends within 1e-9 (relative) of an
/// integer are snapped to it, so windows built from h = 1/k behave as written.
SpectralWindow enumerate_window(int d, double h, double a, double b, double delta = 0.0);

/// The window isolating level k: h = 1/k, a = 2 + dh, b = 2 + (2+d)h, giving
/// I_h = [2k+d, 2k+d+2). For k = 0, h = 1 and I_h = [d, d+2).
SpectralWindow single_level_window(int d, int k);

/// Window covering levels k0..k1 inclusive (h = 1).
SpectralWindow level_range_window(int d, int k0, int k1);

/// phi_j(x) = prod_a h_{j_a}(x_a).
double eigenfunction_eval(const MultiIndex& j, std::span<const double> x);

/// Per-level sums S_k(x) = sum_{|j|=k} phi_j(x)^2 for k = 0..k_max.
std::vector<double> level_sums(int d, int k_max, std::span<const double> x);

/// e_x = sum_{j in window} lambda_j^s phi_j(x)^2 (s = 0 gives the spectral function).
double spectral_function(const SpectralWindow& w, std::span<const double> x, double s = 0.0);

/// Spectral function on every point of a grid.
std::vector<double> spectral_function_on_grid(const SpectralWindow& w, const QuadratureGrid& grid, double s = 0.0);

/// Mehler diagonal (2 pi sinh 2t)^{-d/2} exp(-|x|^2 tanh t).
double heat_kernel_diag_closed(int d, double t, std::span<const double> x);

/// sum_{lambda_j <= lambda_max} e^{-t lambda_j} phi_j(x)^2.
double heat_kernel_diag_series(int d, double t, std::span<const double> x, double lambda_max);

/// Number of eigenvalues <= lambda, with multiplicity.
std::uint64_t weyl_count(int d, double lambda);

/// beta_{r,theta} = (d - theta)/2 * (1 - 2/r); r may be infinite.
double beta_exponent(int d, double r, double theta);

struct IncrementNorm {
  double value = 0.0;
  /// Estimated relative mass outside the grid; 0 for exact Gauss-Hermite grids.
  double truncation = 0.0;
  bool grid_too_coarse = false;
};

/// (int <x>^{theta(p-1)} e_x^p dx)^{1/p} by quadrature on `grid`.
IncrementNorm spectral_increment_norm(const SpectralWindow& w, double p, double theta, const QuadratureGrid& grid);

/// Grid suited to spectral_increment_norm: exact Gauss-Hermite when p and
/// theta(p-1)/2 are integers, uniform otherwise.
QuadratureGrid increment_grid(const SpectralWindow& w, double p, double theta);

}  // namespace hermrand
