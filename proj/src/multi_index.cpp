#include "hermrand/multi_index.hpp"

#include <algorithm>
#include <cmath>

#include "hermrand/error.hpp"

namespace hermrand {

std::uint64_t level_multiplicity(int d, int k) {
  if (d < 1 || k < 0) return 0;
  // C(k+d-1, d-1) by the multiplicative formula; every partial product is an
  // exact binomial so the division never truncates.
  std::uint64_t c = 1;
  for (int i = 1; i < d; ++i) {
    c = c * static_cast<std::uint64_t>(k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

namespace {
void fill_level(int d, int remaining, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const int axis = static_cast<int>(prefix.size());
  if (axis == d - 1) {
    prefix.push_back(remaining);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int j = 0; j <= remaining; ++j) {
    prefix.push_back(j);
    fill_level(d, remaining - j, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace

std::vector<MultiIndex> level_multi_indices(int d, int k) {
  if (d < 1 || k < 0) throw Error(ErrorCode::kDomain, "level_multi_indices needs d >= 1, k >= 0");
  std::vector<MultiIndex> out;
  out.reserve(level_multiplicity(d, k));
  std::vector<int> prefix;
  fill_level(d, k, prefix, out);
  return out;
}

int Expansion::max_level() const {
  int m = 0;
  for (const auto& j : indices) m = std::max(m, j.level());
  return m;
}

int Expansion::max_component() const {
  int m = 0;
  for (const auto& j : indices) {
    for (int c : j.components) m = std::max(m, c);
  }
  return m;
}

double Expansion::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace hermrand
