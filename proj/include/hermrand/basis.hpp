#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "hermrand/multi_index.hpp"

namespace hermrand {

inline constexpr int kMaxUnitarySize = 2048;

/// Haar-distributed N x N unitary: QR of a complex Gaussian matrix with the
/// diagonal of R rotated onto the positive reals (plain QR is not Haar).
Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed);

/// Orthonormal basis of the level-k eigenspace in dimension d. Column l holds
/// the coefficients of psi_l over `indices`.
struct EigenBasis {
  int dim = 0;
  int level = 0;
  double eigenvalue = 0.0;
  std::vector<MultiIndex> indices;
  Eigen::MatrixXcd coeffs;
};

/// Haar-random basis: haar_unitary(m_k) applied to the multi-index eigenfunctions.
EigenBasis random_eigenbasis(int d, int k, std::uint64_t seed);

/// The multi-index basis itself (identity coefficients).
EigenBasis tensor_eigenbasis(int d, int k);

/// {"dim", "level", "eigenvalue", "indices", "re", "im"}; re[l] and im[l]
/// hold the coefficients of basis function l over `indices`.
nlohmann::json basis_to_json(const EigenBasis& b);

enum class BasisMode { kHaar, kTensor };

struct BasisLevelStat {
  int k = 0;
  double eigenvalue = 0.0;
  double max_sup = 0.0;     ///< max over basis functions (and seeds) of sup|psi|
  double ratio = 0.0;       ///< max_sup * lambda^{d/4} / (1 + log lambda)^{1/2}
  std::vector<double> per_seed;
};

/// Sup-norm decay across levels. Haar mode evaluates every basis function on
/// the sup grid of its level with local refinement; tensor mode uses
/// sup|phi_j| = prod_a sup|h_{j_a}|, exact for separable functions.
std::vector<BasisLevelStat> supnorm_profile(int d, const std::vector<int>& k_range, const std::vector<std::uint64_t>& seeds,
                                            BasisMode mode, int jobs = 1);

}  // namespace hermrand
