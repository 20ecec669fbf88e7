#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "hermrand/grid.hpp"
#include "hermrand/multi_index.hpp"

namespace hermrand {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// r in [1, inf]; s is the weight exponent of L^{r,s} = L^r(<x>^s dx), or the
/// Sobolev order for sobolev_norm.
struct NormSpec {
  double r = 2.0;
  double s = 0.0;
};

struct NormResult {
  double value = 0.0;
  /// Share of the integral (or of the sup) carried by the outer grid layers.
  double truncation = 0.0;
  bool truncation_warning = false;
  /// Location of the maximum for r = inf.
  std::vector<double> argmax;
};

struct SupOptions {
  bool refine = true;
  int candidates = 12;
  /// Stop when the pattern-search step falls below this fraction of the grid spacing.
  double tolerance = 1e-4;
};

/// Norms of many expansions on one grid. Owns the evaluator tables; const
/// methods are safe to call concurrently.
class NormEvaluator {
 public:
  NormEvaluator(const QuadratureGrid& grid, int max_component);

  const QuadratureGrid& grid() const { return evaluator_.grid(); }
  const GridEvaluator& evaluator() const { return evaluator_; }

  NormResult weighted(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs, const NormSpec& spec,
                      const SupOptions& sup = {}) const;

  /// Several r values (same weight exponent rule s(r)) from one field evaluation.
  std::vector<NormResult> weighted_many(std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs,
                                        std::span<const NormSpec> specs, const SupOptions& sup = {}) const;

 private:
  NormResult from_field(const Field& f, std::span<const MultiIndex> indices, std::span<const std::complex<double>> coeffs,
                        const NormSpec& spec, const SupOptions& sup) const;

  GridEvaluator evaluator_;
};

/// ||u||_{L^{r,s}} with u on `grid`. Throws kGridEnvelope if a component of u
/// exceeds the grid's design level.
NormResult weighted_norm(const Expansion& u, const NormSpec& spec, const QuadratureGrid& grid, const SupOptions& sup = {});

/// Same with a grid chosen by lp_grid for u's top level.
NormResult weighted_norm(const Expansion& u, const NormSpec& spec);

/// ||H^{s/2} u||_{L^r}: coefficients multiplied by lambda_j^{s/2}, then an
/// unweighted L^r norm.
NormResult sobolev_norm(const Expansion& u, const NormSpec& spec, const QuadratureGrid& grid, const SupOptions& sup = {});
NormResult sobolev_norm(const Expansion& u, const NormSpec& spec);

/// Expansion with coefficients multiplied by lambda_j^{s/2}.
Expansion apply_multiplier(const Expansion& u, double s);

struct DyadicBlock {
  int n = 0;  ///< eigenvalues in [2^n, 2^{n+1})
  Expansion part;
};

/// Partition of u by eigenvalue into [2^n, 2^{n+1}), ascending in n.
std::vector<DyadicBlock> dyadic_blocks(const Expansion& u);

/// l^q norm of 2^{ns/2} ||u_n||_{L^p}; q = inf gives the sup.
double besov_norm(std::span<const DyadicBlock> blocks, double s, double p, double q, const QuadratureGrid& grid);
double besov_norm(std::span<const DyadicBlock> blocks, double s, double p, double q);

struct InterpolationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double kappa = 0.0;
  double s = 0.0;  ///< weight exponent of the interpolated space
  bool satisfied = false;
};

/// Checks ||u||_{p,s} <= ||u||_{p0,s0}^{1-kappa} ||u||_{p1,s1}^kappa with
/// 1/p = kappa/p1 + (1-kappa)/p0, s = (p1-p)/(p1-p0) s0 + (p0-p)/(p0-p1) s1;
/// for p0 = inf, ||u||_{p,s} <= (sup <x>^{s0}|u|)^{1-p1/p} ||u||_{p1,s1}^{p1/p}
/// with s = (p-p1) s0 + s1. All three norms use the same grid.
InterpolationReport interpolation_check(const Expansion& u, double p0, double p1, double p, double s0, double s1,
                                        const QuadratureGrid& grid);

}  // namespace hermrand
