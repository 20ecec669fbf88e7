#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hermrand/multi_index.hpp"
#include "hermrand/quadrature.hpp"

namespace hermrand {

/// Tensor evaluation and integration grid on R^d. Every axis uses the same
/// one-dimensional rule. Points are ordered with axis 0 varying fastest.
///
/// `max_level` is the largest total Hermite level the grid was designed for:
/// for Gauss-Hermite grids, |u|^{2c} is integrated exactly for every u of
/// level <= max_level (c the Gaussian exponent); for uniform grids it is the
/// largest level whose band limit sqrt(lambda) the spacing samples above the
/// Nyquist rate. Truncation by the box is reported separately.
class QuadratureGrid {
 public:
  QuadratureGrid(int dim, QuadratureRule1D axis_rule, double gaussian_exponent, int max_level);

  int dim() const { return dim_; }
  QuadratureMode mode() const { return axis_.mode; }
  const QuadratureRule1D& axis() const { return axis_; }
  /// Plain weights for integrating f(x) dx along one axis.
  const std::vector<double>& axis_weights() const { return axis_weights_; }
  double gaussian_exponent() const { return gaussian_exponent_; }
  int max_level() const { return max_level_; }
  double r_cut() const { return r_cut_; }
  /// Node spacing for uniform grids, 0 for Gauss-Hermite.
  double spacing() const { return spacing_; }

  std::size_t size() const { return weights_.size(); }
  std::size_t axis_points() const { return axis_.nodes.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& radius_sq() const { return radius_sq_; }
  std::vector<double> point(std::size_t index) const;

 private:
  int dim_;
  QuadratureRule1D axis_;
  std::vector<double> axis_weights_;
  double gaussian_exponent_;
  int max_level_;
  double r_cut_;
  double spacing_;
  std::vector<double> weights_;
  std::vector<double> radius_sq_;
};

/// Gauss-Hermite tensor grid for integrands P(x) e^{-c|x|^2}; exact when the
/// per-axis degree of P is at most 2*order-1. `max_level` defaults to the
/// largest level k with 2ck <= 2*order-1.
QuadratureGrid gauss_hermite_grid(int dim, int order, double gaussian_exponent = 1.0, int max_level = -1);

/// Uniform trapezoid grid on [-radius, radius]^d.
QuadratureGrid uniform_grid(int dim, double radius, double spacing);

/// Trapezoid spacing that integrates (|u|^2)^{power/2} without aliasing for u
/// of eigenvalue up to lambda.
double band_limited_spacing(double lambda, double power);

/// Grid for L^{r,s} norms of functions up to level `level`: exact Gauss-Hermite
/// when r and s are even integers, uniform on the box of half-width
/// 1.5 sqrt(lambda) + 2 otherwise.
QuadratureGrid lp_grid(int dim, int level, double r, double s = 0.0);

/// Uniform grid for sup-norms: radius 1.5 sqrt(lambda), spacing
/// pi / (oversample sqrt(lambda)) with lambda = 2 level + d.
QuadratureGrid sup_grid(int dim, int level, double oversample = 2.0);

/// Share of sum_p w_p f_p carried by the two outermost layers of a uniform
/// grid, used as the truncation estimate; 0 for Gauss-Hermite grids.
double boundary_mass_fraction(const QuadratureGrid& grid, std::span<const double> integrand);

/// max of f over the two outermost layers divided by max of f overall; 0 for
/// Gauss-Hermite grids.
double boundary_max_fraction(const QuadratureGrid& grid, std::span<const double> values);

/// Real and imaginary parts of a field sampled on a grid.
struct Field {
  std::vector<double> re;
  std::vector<double> im;  ///< empty when the field is real
  bool is_real() const { return im.empty(); }
  double abs_sq(std::size_t i) const { return im.empty() ? re[i] * re[i] : re[i] * re[i] + im[i] * im[i]; }
};

/// Evaluates Hermite expansions on every point of a grid by successive
/// per-axis contractions with tabulated h_n(x_i). Tables are built once;
/// evaluate() is const and safe to call concurrently.
class GridEvaluator {
 public:
  GridEvaluator(const QuadratureGrid& grid, int max_component);

  const QuadratureGrid& grid() const { return *grid_; }
  int max_component() const { return max_component_; }

  Field evaluate(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs) const;
  Field evaluate(const Expansion& u) const { return evaluate(u.indices, u.coeffs); }

  /// Spectral function sum_j w_j phi_j(x)^2 at every grid point.
  std::vector<double> sum_of_squares(std::span<const MultiIndex> indices, std::span<const double> weights = {}) const;

 private:
  void contract(std::span<const MultiIndex> indices, std::span<const double> values, std::vector<double>& out) const;

  const QuadratureGrid* grid_;
  int max_component_;
  Eigen::MatrixXd table_;  ///< table_(i, n) = h_n(node_i)
};

/// Evaluates an expansion at arbitrary points.
std::complex<double> evaluate_at(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs,
                                 std::span<const double> x);

}  // namespace hermrand
