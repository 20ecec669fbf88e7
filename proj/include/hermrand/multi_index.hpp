#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

namespace hermrand {

/// Multi-index j in N^d labelling the tensor Hermite function
/// phi_j(x) = h_{j_1}(x_1) ... h_{j_d}(x_d), with H phi_j = (2|j| + d) phi_j.
struct MultiIndex {
  std::vector<int> components;

  int dim() const { return static_cast<int>(components.size()); }
  int level() const { return std::accumulate(components.begin(), components.end(), 0); }
  double eigenvalue() const { return 2.0 * level() + dim(); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// C(k+d-1, d-1): number of multi-indices of level k in dimension d.
std::uint64_t level_multiplicity(int d, int k);

/// All multi-indices with |j| = k, in lexicographic order of components.
std::vector<MultiIndex> level_multi_indices(int d, int k);

/// A finite Hermite expansion u = sum_j c_j phi_j. Indices may span several
/// levels; they need not be sorted.
struct Expansion {
  int dim = 0;
  std::vector<MultiIndex> indices;
  std::vector<std::complex<double>> coeffs;

  int max_level() const;
  int max_component() const;
  double l2_norm() const;
};

}  // namespace hermrand
