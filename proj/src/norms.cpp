#include "hermrand/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hermrand/error.hpp"
#include "hermrand/hermite.hpp"

namespace hermrand {

namespace {

double weight(double r2, double s) { return s == 0.0 ? 1.0 : std::pow(1.0 + r2, s / 2.0); }

bool is_even_integer(double v) { return v >= 0.0 && std::floor(v) == v && static_cast<long>(v) % 2 == 0; }

/// (|u|^2)^{r/2}, with integer powers when r is even.
double abs_pow(double abs_sq, double r) {
  if (r == 2.0) return abs_sq;
  if (is_even_integer(r) && r <= 64.0) {
    double out = 1.0, base = abs_sq;
    for (int e = static_cast<int>(r) / 2; e > 0; e >>= 1, base *= base) {
      if (e & 1) out *= base;
    }
    return out;
  }
  return std::pow(abs_sq, r / 2.0);
}

/// <x>^s |u(x)| at an arbitrary point, reusing per-axis buffers.
class PointObjective {
 public:
  PointObjective(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs, int dim, double s)
      : indices_(indices), coeffs_(coeffs), dim_(dim), s_(s) {
    for (const auto& j : indices) {
      for (int c : j.components) k_max_ = std::max(k_max_, c);
    }
    tables_.assign(dim, std::vector<double>(k_max_ + 1));
  }

  double operator()(std::span<const double> x) {
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      hermite_functions(x[a], tables_[a]);
      r2 += x[a] * x[a];
    }
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t t = 0; t < indices_.size(); ++t) {
      double prod = 1.0;
      for (int a = 0; a < dim_; ++a) prod *= tables_[a][indices_[t].components[a]];
      sum += coeffs_[t] * prod;
    }
    return weight(r2, s_) * std::abs(sum);
  }

 private:
  std::span<const MultiIndex> indices_;
  std::span<const std::complex<double>> coeffs_;
  int dim_;
  double s_;
  int k_max_ = 0;
  std::vector<std::vector<double>> tables_;
};

/// Compass search from x with initial step `step`.
double pattern_search(PointObjective& f, std::vector<double>& x, double value, double step, double min_step) {
  std::vector<double> trial(x.size());
  for (int iter = 0; iter < 400 && step >= min_step; ++iter) {
    bool moved = false;
    for (std::size_t a = 0; a < x.size() && !moved; ++a) {
      for (double dir : {1.0, -1.0}) {
        trial = x;
        trial[a] += dir * step;
        const double v = f(trial);
        if (v > value) {
          value = v;
          x = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step /= 2.0;
  }
  return value;
}

}  // namespace

NormEvaluator::NormEvaluator(const QuadratureGrid& grid, int max_component) : evaluator_(grid, max_component) {}

NormResult NormEvaluator::from_field(const Field& f, std::span<const MultiIndex> indices,
                                     std::span<const std::complex<double>> coeffs, const NormSpec& spec,
                                     const SupOptions& sup) const {
  if (!(spec.r >= 1.0)) throw Error(ErrorCode::kDomain, "r must be >= 1");
  const auto& grid = evaluator_.grid();
  const auto& r2 = grid.radius_sq();
  const std::size_t n = grid.size();
  NormResult out;

  if (std::isinf(spec.r)) {
    std::vector<double> vals(n);
    for (std::size_t p = 0; p < n; ++p) vals[p] = weight(r2[p], spec.s) * std::sqrt(f.abs_sq(p));
    std::size_t best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    out.value = vals[best];
    out.argmax = grid.point(best);
    out.truncation = boundary_max_fraction(grid, vals);
    out.truncation_warning = out.truncation > 1e-6;
    if (!sup.refine || indices.empty() || out.value == 0.0) return out;

    // Distinct candidate peaks: best grid values, skipping grid neighbours of
    // already chosen points.
    const std::size_t pool = std::min<std::size_t>(n, static_cast<std::size_t>(sup.candidates) * 64);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + pool, order.end(),
                      [&](std::size_t a, std::size_t b) { return vals[a] > vals[b] || (vals[a] == vals[b] && a < b); });
    const std::size_t axis_n = grid.axis_points();
    auto coords = [&](std::size_t p) {
      std::vector<long> c(grid.dim());
      for (int a = 0; a < grid.dim(); ++a) {
        c[a] = static_cast<long>(p % axis_n);
        p /= axis_n;
      }
      return c;
    };
    std::vector<std::vector<long>> chosen;
    std::vector<std::size_t> picks;
    for (std::size_t t = 0; t < pool && static_cast<int>(picks.size()) < sup.candidates; ++t) {
      const auto c = coords(order[t]);
      bool near = false;
      for (const auto& o : chosen) {
        long dist = 0;
        for (int a = 0; a < grid.dim(); ++a) dist = std::max(dist, std::abs(c[a] - o[a]));
        if (dist <= 2) {
          near = true;
          break;
        }
      }
      if (near) continue;
      chosen.push_back(c);
      picks.push_back(order[t]);
    }
    const double step0 = grid.spacing() > 0.0 ? grid.spacing() / 2.0 : 0.25 / std::sqrt(1.0 + grid.max_level());
    PointObjective objective(indices, coeffs, grid.dim(), spec.s);
    for (std::size_t p : picks) {
      auto x = grid.point(p);
      const double v = pattern_search(objective, x, vals[p], step0, step0 * sup.tolerance);
      if (v > out.value) {
        out.value = v;
        out.argmax = x;
      }
    }
    return out;
  }

  const auto& w = grid.weights();
  std::vector<double> integrand(n);
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    integrand[p] = weight(r2[p], spec.s) * abs_pow(f.abs_sq(p), spec.r);
    sum += w[p] * integrand[p];
  }
  out.value = std::pow(sum, 1.0 / spec.r);
  out.truncation = boundary_mass_fraction(grid, integrand);
  out.truncation_warning = out.truncation > 1e-6;
  return out;
}

NormResult NormEvaluator::weighted(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs,
                                   const NormSpec& spec, const SupOptions& sup) const {
  const Field f = evaluator_.evaluate(indices, coeffs);
  return from_field(f, indices, coeffs, spec, sup);
}

std::vector<NormResult> NormEvaluator::weighted_many(std::span<const MultiIndex> indices,
                                                     std::span<const std::complex<double>> coeffs,
                                                     std::span<const NormSpec> specs, const SupOptions& sup) const {
  const Field f = evaluator_.evaluate(indices, coeffs);
  std::vector<NormResult> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) out.push_back(from_field(f, indices, coeffs, spec, sup));
  return out;
}

namespace {
void check_envelope(const Expansion& u, const QuadratureGrid& grid) {
  if (u.dim != grid.dim()) throw Error(ErrorCode::kLengthMismatch, "expansion dimension differs from grid");
  if (u.max_level() > grid.max_level()) throw Error(ErrorCode::kGridEnvelope, "expansion level exceeds the grid design level");
}
}  // namespace

NormResult weighted_norm(const Expansion& u, const NormSpec& spec, const QuadratureGrid& grid, const SupOptions& sup) {
  check_envelope(u, grid);
  NormEvaluator eval(grid, std::max(0, u.max_component()));
  return eval.weighted(u.indices, u.coeffs, spec, sup);
}

NormResult weighted_norm(const Expansion& u, const NormSpec& spec) {
  return weighted_norm(u, spec, lp_grid(u.dim, std::max(0, u.max_level()), spec.r, spec.s));
}

Expansion apply_multiplier(const Expansion& u, double s) {
  Expansion v = u;
  if (s == 0.0) return v;
  for (std::size_t t = 0; t < v.coeffs.size(); ++t) v.coeffs[t] *= std::pow(v.indices[t].eigenvalue(), s / 2.0);
  return v;
}

NormResult sobolev_norm(const Expansion& u, const NormSpec& spec, const QuadratureGrid& grid, const SupOptions& sup) {
  if (spec.s < 0.0) throw Error(ErrorCode::kDomain, "Sobolev order must be >= 0");
  return weighted_norm(apply_multiplier(u, spec.s), NormSpec{spec.r, 0.0}, grid, sup);
}

NormResult sobolev_norm(const Expansion& u, const NormSpec& spec) {
  return sobolev_norm(u, spec, lp_grid(u.dim, std::max(0, u.max_level()), spec.r, 0.0));
}

std::vector<DyadicBlock> dyadic_blocks(const Expansion& u) {
  std::vector<DyadicBlock> blocks;
  for (std::size_t t = 0; t < u.indices.size(); ++t) {
    const int n = std::ilogb(u.indices[t].eigenvalue());
    auto it = std::find_if(blocks.begin(), blocks.end(), [n](const DyadicBlock& b) { return b.n == n; });
    if (it == blocks.end()) {
      blocks.push_back(DyadicBlock{n, Expansion{u.dim, {}, {}}});
      it = blocks.end() - 1;
    }
    it->part.indices.push_back(u.indices[t]);
    it->part.coeffs.push_back(u.coeffs[t]);
  }
  std::sort(blocks.begin(), blocks.end(), [](const DyadicBlock& a, const DyadicBlock& b) { return a.n < b.n; });
  return blocks;
}

double besov_norm(std::span<const DyadicBlock> blocks, double s, double p, double q, const QuadratureGrid& grid) {
  if (!(q >= 1.0)) throw Error(ErrorCode::kDomain, "q must be >= 1");
  if (blocks.empty()) return 0.0;
  int k_max = 0;
  for (const auto& b : blocks) {
    check_envelope(b.part, grid);
    k_max = std::max(k_max, b.part.max_component());
  }
  NormEvaluator eval(grid, k_max);
  double acc = 0.0;
  for (const auto& b : blocks) {
    const double term = std::pow(2.0, b.n * s / 2.0) * eval.weighted(b.part.indices, b.part.coeffs, NormSpec{p, 0.0}).value;
    if (std::isinf(q)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, q);
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double besov_norm(std::span<const DyadicBlock> blocks, double s, double p, double q) {
  if (blocks.empty()) return 0.0;
  int level = 0;
  for (const auto& b : blocks) level = std::max(level, b.part.max_level());
  return besov_norm(blocks, s, p, q, lp_grid(blocks.front().part.dim, level, p, 0.0));
}

InterpolationReport interpolation_check(const Expansion& u, double p0, double p1, double p, double s0, double s1,
                                        const QuadratureGrid& grid) {
  if (!(1.0 <= p1 && p1 <= p && p <= p0)) throw Error(ErrorCode::kIncompatibleExponents, "need 1 <= p1 <= p <= p0 <= inf");
  check_envelope(u, grid);
  InterpolationReport r;
  NormEvaluator eval(grid, std::max(0, u.max_component()));
  const double n1 = eval.weighted(u.indices, u.coeffs, NormSpec{p1, s1}).value;
  if (p == p1) {
    r.kappa = 1.0;
    r.s = s1;
    r.rhs = n1;
  } else if (std::isinf(p0)) {
    r.kappa = p1 / p;
    r.s = (p - p1) * s0 + s1;
    const double n0 = eval.weighted(u.indices, u.coeffs, NormSpec{kInfinity, s0}).value;
    r.rhs = std::pow(n0, 1.0 - p1 / p) * std::pow(n1, p1 / p);
  } else {
    r.kappa = (1.0 / p - 1.0 / p0) / (1.0 / p1 - 1.0 / p0);
    r.s = (p1 - p) / (p1 - p0) * s0 + (p0 - p) / (p0 - p1) * s1;
    const double n0 = eval.weighted(u.indices, u.coeffs, NormSpec{p0, s0}).value;
    r.rhs = std::pow(n0, 1.0 - r.kappa) * std::pow(n1, r.kappa);
  }
  r.lhs = eval.weighted(u.indices, u.coeffs, NormSpec{p, r.s}).value;
  r.satisfied = r.lhs <= r.rhs * (1.0 + 1e-8);
  return r;
}

}  // namespace hermrand
