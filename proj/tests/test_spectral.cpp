#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hermrand/error.hpp"
#include "hermrand/grid.hpp"
#include "hermrand/hermite.hpp"
#include "hermrand/spectral.hpp"

using namespace hermrand;

namespace {
// Brute-force count of multi-indices with 2|j| + d <= lambda.
std::uint64_t brute_weyl(int d, double lambda) {
  std::uint64_t count = 0;
  std::vector<int> j(d, 0);
  const int k_max = static_cast<int>(std::floor((lambda - d) / 2.0));
  if (k_max < 0) return 0;
  while (true) {
    int sum = 0;
    for (int v : j) sum += v;
    if (sum <= k_max) ++count;
    int a = 0;
    while (a < d && ++j[a] > k_max) j[a++] = 0;
    if (a == d) break;
  }
  return count;
}
}  // namespace

TEST_CASE("window enumeration") {
  const double h = 1.0 / 3.0;
  auto w = enumerate_window(2, h, 2 + 2 * h, 2 + 4 * h);
  REQUIRE(w.levels.size() == 1);
  CHECK(w.levels[0].k == 3);
  CHECK(w.levels[0].eigenvalue == 8.0);
  CHECK(w.levels[0].multiplicity == 4);
  CHECK(w.n_h == 4);

  auto gap = enumerate_window(2, 1.0, 8.5, 9.5);
  CHECK(gap.empty());
  CHECK(gap.levels.empty());

  // [3, 6) holds the ground level 3 and the first excited level 5.
  auto ground = enumerate_window(3, 1.0, 3.0, 6.0);
  REQUIRE(ground.levels.size() == 2);
  CHECK(ground.levels[0].k == 0);
  CHECK(ground.levels[0].multiplicity == 1);
  CHECK(ground.levels[1].eigenvalue == 5.0);
  CHECK(ground.levels[1].multiplicity == 3);
  auto only_ground = enumerate_window(3, 1.0, 3.0, 5.0);
  REQUIRE(only_ground.levels.size() == 1);
  CHECK(only_ground.n_h == 1);

  // Right end excluded.
  auto half_open = enumerate_window(1, 1.0, 1.0, 5.0);
  CHECK(half_open.levels.size() == 2);

  for (int k : {1, 7, 64, 256}) {
    auto s = single_level_window(2, k);
    REQUIRE(s.levels.size() == 1);
    CHECK(s.levels[0].k == k);
    CHECK(s.n_h == static_cast<std::uint64_t>(k + 1));
  }
  CHECK(single_level_window(2, 0).n_h == 1);

  CHECK_THROWS_AS(enumerate_window(2, 0.5, 3.0, 2.0), Error);
  CHECK_THROWS_AS(enumerate_window(2, 0.0, 1.0, 2.0), Error);
}

TEST_CASE("multiplicities and index expansion") {
  for (int d = 1; d <= 4; ++d) {
    for (int k = 0; k <= 12; ++k) {
      auto idx = level_multi_indices(d, k);
      CHECK(idx.size() == level_multiplicity(d, k));
      for (const auto& j : idx) CHECK(j.level() == k);
    }
  }
  auto w = level_range_window(3, 2, 5);
  CHECK(w.indices().size() == w.n_h);
  CHECK(w.eigenvalues().size() == w.n_h);
}

TEST_CASE("tensor eigenfunctions") {
  const std::vector<double> o{0.0, 0.0};
  CHECK(eigenfunction_eval(MultiIndex{{0, 0}}, o) == doctest::Approx(0.5641895835).epsilon(1e-10));
  CHECK(eigenfunction_eval(MultiIndex{{1, 0}}, o) == 0.0);
  const std::vector<double> x{0.7, -1.1};
  CHECK(eigenfunction_eval(MultiIndex{{2, 3}}, x) == hermite_function(2, 0.7) * hermite_function(3, -1.1));
}

TEST_CASE("spectral function values and rotation invariance") {
  const std::vector<double> o{0.0, 0.0};
  CHECK(spectral_function(single_level_window(2, 1), o) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(spectral_function(single_level_window(2, 0), o) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));

  for (int k : {5, 20, 64}) {
    auto w = single_level_window(2, k);
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 8; ++t) {
      const double ang = 2.0 * std::numbers::pi * t / 8.0 + 0.1;
      const std::vector<double> x{std::cos(ang), std::sin(ang)};
      const double e = spectral_function(w, x);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    CHECK((hi - lo) / hi < 1e-10);
  }

  // Brute force over multi-indices.
  auto w = level_range_window(3, 1, 4);
  const std::vector<double> x{0.3, -0.8, 1.2};
  double brute = 0.0;
  for (const auto& j : w.indices()) brute += std::pow(eigenfunction_eval(j, x), 2);
  CHECK(spectral_function(w, x) == doctest::Approx(brute).epsilon(1e-13));
  CHECK_THROWS_AS(spectral_function(enumerate_window(2, 1.0, 8.5, 9.5), o), Error);
}

TEST_CASE("Mehler identity") {
  const std::vector<double> z{0.0};
  CHECK(heat_kernel_diag_closed(1, 0.5, z) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * std::sinh(1.0))).epsilon(1e-15));
  CHECK(heat_kernel_diag_closed(1, 0.5, z) == doctest::Approx(0.3680052).epsilon(1e-6));
  const std::vector<double> z2{0.0, 0.0};
  CHECK(heat_kernel_diag_closed(2, 0.7, z2) == doctest::Approx(std::pow(heat_kernel_diag_closed(1, 0.7, z), 2)).epsilon(1e-14));
  CHECK(heat_kernel_diag_closed(1, 2.0, z) == doctest::Approx(std::exp(-2.0) / std::sqrt(std::numbers::pi)).epsilon(0.02));
  CHECK(heat_kernel_diag_series(1, 1.0, z, 1.0) == doctest::Approx(std::exp(-1.0) / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(heat_kernel_diag_series(1, 0.5, z, 81.0) == doctest::Approx(heat_kernel_diag_closed(1, 0.5, z)).epsilon(1e-10));
  CHECK(heat_kernel_diag_series(3, 0.5, std::vector<double>{0, 0, 0}, 2.0) == 0.0);
  CHECK_THROWS_AS(heat_kernel_diag_closed(1, 0.0, z), Error);

  for (int d : {1, 2}) {
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      const double lambda_max = 14.0 * std::log(10.0) / t + 10.0;
      for (double r : {0.0, 1.0, 2.0, 3.0, 4.0}) {
        std::vector<double> x(d, 0.0);
        x[0] = r * std::cos(0.4);
        if (d == 2) x[1] = r * std::sin(0.4);
        const double c = heat_kernel_diag_closed(d, t, x);
        const double s = heat_kernel_diag_series(d, t, x, lambda_max);
        CHECK(std::abs(s - c) / c < 1e-8);
      }
    }
  }
}

TEST_CASE("series is monotone in the cutoff") {
  const std::vector<double> x{0.5, -0.2};
  double prev = 0.0;
  for (double lm = 2.0; lm < 60.0; lm += 1.0) {
    const double v = heat_kernel_diag_series(2, 0.3, x, lm);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("Weyl count") {
  CHECK(weyl_count(2, 10.0) == 15);
  CHECK(weyl_count(1, 0.5) == 0);
  const double ratio = static_cast<double>(weyl_count(2, 200.0)) / (200.0 * 200.0 / 8.0);
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  for (int d = 1; d <= 4; ++d) {
    for (double lambda : {0.0, 3.0, 7.5, 20.0}) CHECK(weyl_count(d, lambda) == brute_weyl(d, lambda));
  }
}

TEST_CASE("beta exponent") {
  CHECK(beta_exponent(2, 2.0, 0.0) == 0.0);
  CHECK(beta_exponent(2, 4.0, 0.0) == doctest::Approx(0.5));
  CHECK(beta_exponent(2, std::numeric_limits<double>::infinity(), 1.0) == doctest::Approx(0.5));
}

TEST_CASE("trace identity and increment norms") {
  for (int k : {0, 5, 20, 64}) {
    auto w = single_level_window(2, k);
    auto g = increment_grid(w, 1.0, 0.0);
    auto r = spectral_increment_norm(w, 1.0, 0.0, g);
    CHECK(std::abs(r.value - static_cast<double>(w.n_h)) / w.n_h < 1e-8);
  }
  auto w3 = level_range_window(3, 2, 4);
  auto r3 = spectral_increment_norm(w3, 1.0, 0.0, increment_grid(w3, 1.0, 0.0));
  CHECK(r3.value == doctest::Approx(static_cast<double>(w3.n_h)).epsilon(1e-9));

  // The weight <x>^{theta(p-1)} is trivial at p = 1.
  auto w0 = single_level_window(2, 0);
  CHECK(spectral_increment_norm(w0, 1.0, 2.0, increment_grid(w0, 1.0, 2.0)).value == doctest::Approx(1.0).epsilon(1e-12));
  // p = 2, theta = 2: int (1+|x|^2) pi^{-2} e^{-2|x|^2} dx = 3/(4 pi).
  CHECK(spectral_increment_norm(w0, 2.0, 2.0, increment_grid(w0, 2.0, 2.0)).value ==
        doctest::Approx(std::sqrt(3.0 / (4.0 * std::numbers::pi))).epsilon(1e-12));
  // Uniform grid on a non-integer p agrees with a fine trapezoid of the radial integral.
  auto g15 = increment_grid(w0, 1.5, 0.0);
  CHECK(g15.mode() == QuadratureMode::kUniformTruncated);
  // int (pi^{-1} e^{-r^2})^{3/2} dx = pi^{-3/2} * pi / 1.5
  CHECK(spectral_increment_norm(w0, 1.5, 0.0, g15).value ==
        doctest::Approx(std::pow(std::pow(std::numbers::pi, -1.5) * std::numbers::pi / 1.5, 1.0 / 1.5)).epsilon(1e-9));

  // Uniform grid gives the same value as the exact rule.
  auto w5 = single_level_window(2, 5);
  auto exact = spectral_increment_norm(w5, 2.0, 0.0, increment_grid(w5, 2.0, 0.0));
  auto uni = spectral_increment_norm(w5, 2.0, 0.0, uniform_grid(2, 1.5 * std::sqrt(12.0) + 2.0, 0.15));
  CHECK(uni.value == doctest::Approx(exact.value).epsilon(1e-9));
  CHECK_FALSE(uni.grid_too_coarse);
  auto tight = spectral_increment_norm(w5, 2.0, 0.0, uniform_grid(2, 2.0, 0.15));
  CHECK(tight.grid_too_coarse);
}

TEST_CASE("increment norm band across levels") {
  // value / (N_h h^{beta_{4,0}}) with h = 1/(2k+2).
  double lo = 1e300, hi = 0.0;
  for (int k : {8, 16, 32, 64}) {
    auto w = single_level_window(2, k);
    const double v = spectral_increment_norm(w, 2.0, 0.0, increment_grid(w, 2.0, 0.0)).value;
    const double h = 1.0 / (2.0 * k + 2.0);
    const double ratio = v / (w.n_h * std::pow(h, beta_exponent(2, 4.0, 0.0)));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("decay beyond the turning point and weighted bound") {
  // Envelope e_x <= C lambda^{d/2} exp(-c|x|^2/lambda) with C fixed at twice the
  // peak: the largest admissible c per level must stay positive.
  double c_min = 1e300;
  for (int k : {9, 24, 49, 74, 99}) {
    auto w = single_level_window(2, k);
    const double lambda = 2.0 * k + 2.0;
    std::vector<double> rs, es;
    for (double r = 0.05; r < 2.0 * std::sqrt(lambda); r += 0.05) {
      rs.push_back(r);
      es.push_back(spectral_function(w, std::vector<double>{r, 0.0}));
    }
    const double peak = *std::max_element(es.begin(), es.end());
    double c = 1e300;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (es[i] > 0.0) c = std::min(c, lambda / (rs[i] * rs[i]) * std::log(2.0 * peak / es[i]));
    }
    c_min = std::min(c_min, c);
    if (lambda >= 200.0) {
      const double r_out = std::sqrt(1.2 * lambda);
      CHECK(spectral_function(w, std::vector<double>{r_out, 0.0}) < 1e-6 * peak);
    }
  }
  CHECK(c_min > 0.0);
  for (double theta : {0.0, 1.0, 2.0}) {
    double lo = 1e300, hi = 0.0;
    for (int k : {8, 16, 32, 64, 128}) {
      auto w = single_level_window(2, k);
      const double h = 1.0 / k;
      double peak = 0.0;
      for (double r = 0.0; r < 1.3 * std::sqrt(2.0 * k + 2.0); r += 0.02) {
        peak = std::max(peak, std::pow(1 + r * r, theta / 2) * spectral_function(w, std::vector<double>{r, 0.0}));
      }
      const double ratio = peak / (w.n_h * std::pow(h, (2.0 - theta) / 2.0));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo < 4.0);
  }
}

TEST_CASE("grid evaluator reproduces pointwise evaluation") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int d : {1, 2, 3}) {
    auto w = level_range_window(d, 0, 6);
    auto idx = w.indices();
    std::vector<std::complex<double>> c(idx.size());
    for (auto& v : c) v = {n01(rng), n01(rng)};
    auto grid = uniform_grid(d, 3.0, 0.7);
    GridEvaluator ev(grid, w.max_level());
    auto f = ev.evaluate(idx, c);
    for (std::size_t p = 0; p < grid.size(); p += 7) {
      const auto x = grid.point(p);
      const auto ref = evaluate_at(idx, c, x);
      CHECK(f.re[p] == doctest::Approx(ref.real()).epsilon(1e-12).scale(1.0));
      CHECK(f.im[p] == doctest::Approx(ref.imag()).epsilon(1e-12).scale(1.0));
    }
    auto e = ev.sum_of_squares(idx);
    for (std::size_t p = 0; p < grid.size(); p += 5) {
      CHECK(e[p] == doctest::Approx(spectral_function(w, grid.point(p))).epsilon(1e-12).scale(1.0));
    }
  }
}
