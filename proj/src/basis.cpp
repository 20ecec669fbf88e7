#include "hermrand/basis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <boost/random/normal_distribution.hpp>

#include "hermrand/error.hpp"
#include "hermrand/grid.hpp"
#include "hermrand/hermite.hpp"
#include "hermrand/norms.hpp"
#include "hermrand/parallel.hpp"
#include "hermrand/rng.hpp"

namespace hermrand {

Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kDomain, "unitary size must be >= 1");
  if (n > kMaxUnitarySize) throw Error(ErrorCode::kSizeOverflow, "unitary size exceeds 2048");
  Eigen::MatrixXcd z(n, n);
  boost::random::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (int c = 0; c < n; ++c) {
    Stream rng(seed, static_cast<std::uint64_t>(c), 0x4a17);
    for (int r = 0; r < n; ++r) {
      const double re = g(rng);
      z(r, c) = {re, g(rng)};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int c = 0; c < n; ++c) {
    const std::complex<double> d = r(c, c);
    const double a = std::abs(d);
    q.col(c) *= a > 0.0 ? d / a : std::complex<double>(1.0, 0.0);
  }
  return q;
}

EigenBasis random_eigenbasis(int d, int k, std::uint64_t seed) {
  const auto m = level_multiplicity(d, k);
  if (m > static_cast<std::uint64_t>(kMaxUnitarySize)) throw Error(ErrorCode::kSizeOverflow, "level multiplicity exceeds 2048");
  EigenBasis b;
  b.dim = d;
  b.level = k;
  b.eigenvalue = 2.0 * k + d;
  b.indices = level_multi_indices(d, k);
  b.coeffs = haar_unitary(static_cast<int>(m), seed);
  return b;
}

EigenBasis tensor_eigenbasis(int d, int k) {
  const auto m = level_multiplicity(d, k);
  if (m > static_cast<std::uint64_t>(kMaxUnitarySize)) throw Error(ErrorCode::kSizeOverflow, "level multiplicity exceeds 2048");
  EigenBasis b;
  b.dim = d;
  b.level = k;
  b.eigenvalue = 2.0 * k + d;
  b.indices = level_multi_indices(d, k);
  b.coeffs = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  return b;
}

nlohmann::json basis_to_json(const EigenBasis& b) {
  nlohmann::json j;
  j["dim"] = b.dim;
  j["level"] = b.level;
  j["eigenvalue"] = b.eigenvalue;
  auto& idx = j["indices"] = nlohmann::json::array();
  for (const auto& m : b.indices) idx.push_back(m.components);
  auto& re = j["re"] = nlohmann::json::array();
  auto& im = j["im"] = nlohmann::json::array();
  for (Eigen::Index c = 0; c < b.coeffs.cols(); ++c) {
    std::vector<double> r(b.coeffs.rows()), i(b.coeffs.rows());
    for (Eigen::Index k = 0; k < b.coeffs.rows(); ++k) {
      r[k] = b.coeffs(k, c).real();
      i[k] = b.coeffs(k, c).imag();
    }
    re.push_back(r);
    im.push_back(i);
  }
  return j;
}

std::vector<BasisLevelStat> supnorm_profile(int d, const std::vector<int>& k_range, const std::vector<std::uint64_t>& seeds,
                                            BasisMode mode, int jobs) {
  std::vector<BasisLevelStat> out;
  for (int k : k_range) {
    BasisLevelStat st;
    st.k = k;
    st.eigenvalue = 2.0 * k + d;
    if (mode == BasisMode::kTensor) {
      std::vector<double> sup1(k + 1);
      for (int n = 0; n <= k; ++n) sup1[n] = hermite_sup_norm(n);
      double best = 0.0;
      for (const auto& j : level_multi_indices(d, k)) {
        double v = 1.0;
        for (int c : j.components) v *= sup1[c];
        best = std::max(best, v);
      }
      st.max_sup = best;
      st.per_seed.assign(1, best);
    } else {
      const auto grid = sup_grid(d, k);
      NormEvaluator eval(grid, k);
      st.per_seed.assign(seeds.size(), 0.0);
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto basis = random_eigenbasis(d, k, seeds[s]);
        const auto m = basis.coeffs.cols();
        std::vector<double> sups(static_cast<std::size_t>(m));
        parallel_for(static_cast<std::size_t>(m), jobs, [&](std::size_t l) {
          std::vector<std::complex<double>> c(basis.coeffs.rows());
          for (Eigen::Index r = 0; r < basis.coeffs.rows(); ++r) c[r] = basis.coeffs(r, static_cast<Eigen::Index>(l));
          sups[l] = eval.weighted(basis.indices, c, NormSpec{kInfinity, 0.0}).value;
        });
        st.per_seed[s] = *std::max_element(sups.begin(), sups.end());
      }
      st.max_sup = *std::max_element(st.per_seed.begin(), st.per_seed.end());
    }
    st.ratio = st.max_sup * std::pow(st.eigenvalue, d / 4.0) / std::sqrt(1.0 + std::log(st.eigenvalue));
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace hermrand
