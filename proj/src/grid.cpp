#include "hermrand/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hermrand/error.hpp"
#include "hermrand/hermite.hpp"

namespace hermrand {

QuadratureGrid::QuadratureGrid(int dim, QuadratureRule1D axis_rule, double gaussian_exponent, int max_level)
    : dim_(dim),
      axis_(std::move(axis_rule)),
      gaussian_exponent_(gaussian_exponent),
      max_level_(max_level),
      r_cut_(0.0),
      spacing_(0.0) {
  if (dim_ < 1) throw Error(ErrorCode::kDomain, "grid dimension must be >= 1");
  const std::size_t n = axis_.nodes.size();
  if (axis_.mode == QuadratureMode::kGaussHermite) {
    const double scale = 1.0 / std::sqrt(gaussian_exponent_);
    for (auto& x : axis_.nodes) x *= scale;
    axis_weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) axis_weights_[i] = axis_.scaled_weights[i] * scale;
  } else {
    axis_weights_ = axis_.weights;
    spacing_ = n > 1 ? axis_.nodes[1] - axis_.nodes[0] : 0.0;
  }
  for (double x : axis_.nodes) r_cut_ = std::max(r_cut_, std::abs(x));

  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) total *= n;
  weights_.assign(total, 1.0);
  radius_sq_.assign(total, 0.0);
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    for (std::size_t p = 0; p < total; ++p) {
      const std::size_t i = (p / stride) % n;
      weights_[p] *= axis_weights_[i];
      radius_sq_[p] += axis_.nodes[i] * axis_.nodes[i];
    }
    stride *= n;
  }
}

std::vector<double> QuadratureGrid::point(std::size_t index) const {
  const std::size_t n = axis_.nodes.size();
  std::vector<double> x(dim_);
  for (int a = 0; a < dim_; ++a) {
    x[a] = axis_.nodes[index % n];
    index /= n;
  }
  return x;
}

QuadratureGrid gauss_hermite_grid(int dim, int order, double gaussian_exponent, int max_level) {
  if (!(gaussian_exponent > 0.0)) throw Error(ErrorCode::kDomain, "Gaussian exponent must be positive");
  if (max_level < 0) {
    max_level = static_cast<int>(std::floor((2.0 * order - 1.0) / (2.0 * gaussian_exponent)));
  }
  return QuadratureGrid(dim, cached_gauss_hermite_rule(order), gaussian_exponent, max_level);
}

QuadratureGrid uniform_grid(int dim, double radius, double spacing) {
  if (!(spacing > 0.0) || !(radius > 0.0)) throw Error(ErrorCode::kDomain, "uniform grid needs positive radius and spacing");
  const int points = static_cast<int>(std::ceil(2.0 * radius / spacing)) + 1;
  auto rule = uniform_rule(radius, points);
  const double actual = rule.nodes[1] - rule.nodes[0];
  // Nyquist for the band limit sqrt(lambda); the box size only affects truncation.
  const double lambda = std::pow(std::numbers::pi / actual, 2);
  const int level = std::max(0, static_cast<int>(std::floor((lambda - dim) / 2.0)));
  return QuadratureGrid(dim, std::move(rule), 0.0, level);
}

namespace {
bool is_even_integer(double v) { return v >= 0.0 && std::floor(v) == v && static_cast<long>(v) % 2 == 0; }
}  // namespace

double band_limited_spacing(double lambda, double power) {
  // |u|^power for u of level lambda is essentially band-limited to
  // power (sqrt(lambda) + O(lambda^{1/6})); the trapezoid rule is exact up to
  // aliasing beyond 2 pi / spacing.
  const double root = std::sqrt(lambda);
  return std::numbers::pi / (power * (root + 2.0 * std::cbrt(root)) / 2.0 + 4.0);
}

QuadratureGrid lp_grid(int dim, int level, double r, double s) {
  if (level < 0) throw Error(ErrorCode::kDomain, "negative level");
  if (!(r >= 1.0)) throw Error(ErrorCode::kDomain, "r must be >= 1");
  if (std::isinf(r)) return sup_grid(dim, level);
  if (is_even_integer(r) && is_even_integer(s)) {
    const int degree = static_cast<int>(r) * level + static_cast<int>(s);
    const int order = degree / 2 + 1;
    if (order <= kMaxQuadratureOrder) return gauss_hermite_grid(dim, order, r / 2.0, level);
  }
  const double lambda = 2.0 * level + dim;
  return uniform_grid(dim, 1.5 * std::sqrt(lambda) + 2.0, band_limited_spacing(lambda, 2.0 * r));
}

QuadratureGrid sup_grid(int dim, int level, double oversample) {
  const double lambda = 2.0 * level + dim;
  return uniform_grid(dim, 1.5 * std::sqrt(lambda), std::numbers::pi / (oversample * std::sqrt(lambda)));
}

namespace {
std::vector<char> boundary_mask(const QuadratureGrid& grid) {
  const std::size_t n = grid.axis_points();
  std::vector<char> mask(grid.size(), 0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::size_t rem = p;
    for (int a = 0; a < grid.dim(); ++a) {
      const std::size_t i = rem % n;
      rem /= n;
      if (i < 2 || i + 2 >= n) {
        mask[p] = 1;
        break;
      }
    }
  }
  return mask;
}
}  // namespace

double boundary_mass_fraction(const QuadratureGrid& grid, std::span<const double> integrand) {
  if (grid.mode() == QuadratureMode::kGaussHermite) return 0.0;
  const auto mask = boundary_mask(grid);
  const auto& w = grid.weights();
  double total = 0.0, edge = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = w[p] * std::abs(integrand[p]);
    total += v;
    if (mask[p]) edge += v;
  }
  return total > 0.0 ? edge / total : 0.0;
}

double boundary_max_fraction(const QuadratureGrid& grid, std::span<const double> values) {
  if (grid.mode() == QuadratureMode::kGaussHermite) return 0.0;
  const auto mask = boundary_mask(grid);
  double all = 0.0, edge = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = std::abs(values[p]);
    all = std::max(all, v);
    if (mask[p]) edge = std::max(edge, v);
  }
  return all > 0.0 ? edge / all : 0.0;
}

GridEvaluator::GridEvaluator(const QuadratureGrid& grid, int max_component)
    : grid_(&grid), max_component_(max_component) {
  const auto& nodes = grid.axis().nodes;
  const auto n = static_cast<Eigen::Index>(nodes.size());
  table_.resize(n, max_component + 1);
  std::vector<double> h(static_cast<std::size_t>(max_component) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    hermite_functions(nodes[i], h);
    for (int k = 0; k <= max_component; ++k) table_(i, k) = h[k];
  }
}

void GridEvaluator::contract(std::span<const MultiIndex> indices, std::span<const double> values,
                             std::vector<double>& out) const {
  const int d = grid_->dim();
  const Eigen::Index n = table_.rows();
  const Eigen::Index kk = table_.cols();

  // First axis: scatter each coefficient's column of the table into the slab
  // addressed by the remaining components. Layout [n, K, ..., K].
  Eigen::Index rest = 1;
  for (int a = 1; a < d; ++a) rest *= kk;
  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(n, rest);
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const double c = values[t];
    if (c == 0.0) continue;
    const auto& j = indices[t].components;
    Eigen::Index col = 0;
    for (int a = d - 1; a >= 1; --a) col = col * kk + j[a];
    current.col(col).noalias() += c * table_.col(j[0]);
  }

  if (d == 2) {
    Eigen::MatrixXd result = current * table_.transpose();  // [n0, n1]
    out.assign(result.data(), result.data() + result.size());
    return;
  }
  // Generic: rotate the leading axis to the back, contract the new leading axis.
  // Layout after step a: [n_a, K_{a+1}, ..., K_{d-1}, n_0, ..., n_{a-1}].
  for (int a = 1; a < d; ++a) {
    Eigen::MatrixXd rotated = current.transpose();  // [K_a, ..., n_{a-1}]
    const Eigen::Index cols = rotated.size() / kk;
    Eigen::Map<Eigen::MatrixXd> view(rotated.data(), kk, cols);
    current = table_ * view;
  }
  if (d > 1) {
    // [n_{d-1}, n_0, ..., n_{d-2}] -> [n_0, ..., n_{d-1}]
    Eigen::Index front = current.rows();
    Eigen::Map<Eigen::MatrixXd> view(current.data(), front, current.size() / front);
    Eigen::MatrixXd fixed = view.transpose();
    out.assign(fixed.data(), fixed.data() + fixed.size());
  } else {
    out.assign(current.data(), current.data() + current.size());
  }
}

Field GridEvaluator::evaluate(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs) const {
  if (indices.size() != coeffs.size()) throw Error(ErrorCode::kLengthMismatch, "indices and coefficients differ in length");
  for (const auto& j : indices) {
    if (j.dim() != grid_->dim()) throw Error(ErrorCode::kLengthMismatch, "multi-index dimension differs from grid");
    for (int c : j.components) {
      if (c > max_component_) throw Error(ErrorCode::kGridEnvelope, "Hermite degree exceeds the evaluator table");
    }
  }
  std::vector<double> part(coeffs.size());
  bool has_imag = false;
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    part[t] = coeffs[t].real();
    has_imag = has_imag || coeffs[t].imag() != 0.0;
  }
  Field field;
  contract(indices, part, field.re);
  if (has_imag) {
    for (std::size_t t = 0; t < coeffs.size(); ++t) part[t] = coeffs[t].imag();
    contract(indices, part, field.im);
  }
  return field;
}

std::vector<double> GridEvaluator::sum_of_squares(std::span<const MultiIndex> indices, std::span<const double> weights) const {
  // sum_j w_j prod_a h_{j_a}(x_a)^2: the same contraction against squared tables.
  GridEvaluator squared = *this;
  squared.table_ = table_.cwiseProduct(table_);
  std::vector<double> w(indices.size(), 1.0);
  if (!weights.empty()) {
    if (weights.size() != indices.size()) throw Error(ErrorCode::kLengthMismatch, "weights and indices differ in length");
    std::copy(weights.begin(), weights.end(), w.begin());
  }
  std::vector<double> out;
  squared.contract(indices, w, out);
  return out;
}

std::complex<double> evaluate_at(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs,
                                 std::span<const double> x) {
  if (indices.empty()) return {0.0, 0.0};
  const int d = static_cast<int>(x.size());
  int kmax = 0;
  for (const auto& j : indices) {
    for (int c : j.components) kmax = std::max(kmax, c);
  }
  std::vector<std::vector<double>> h(d);
  for (int a = 0; a < d; ++a) h[a] = hermite_functions(kmax, x[a]);
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t t = 0; t < indices.size(); ++t) {
    double prod = 1.0;
    for (int a = 0; a < d; ++a) prod *= h[a][indices[t].components[a]];
    sum += coeffs[t] * prod;
  }
  return sum;
}

}  // namespace hermrand
