#include <doctest.h>

#include <cmath>
#include <vector>

#include "hermrand/error.hpp"
#include "hermrand/rng.hpp"
#include "hermrand/stats.hpp"

using namespace hermrand;

namespace {
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kDomain;
}

std::vector<ScalingPoint> make_points(const std::vector<double>& x, auto&& f, double jitter, std::uint64_t seed) {
  std::vector<ScalingPoint> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Stream rng(seed, i);
    const double y = f(x[i]) * (1.0 + jitter * (2.0 * rng.uniform() - 1.0));
    pts.push_back({x[i], y, y, y});
  }
  return pts;
}
}  // namespace

TEST_CASE("quantiles and summaries") {
  std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(median(v) == 3.0);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 5.0);
  CHECK(quantile(v, 0.1) == doctest::Approx(1.4));
  CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.5);
  CHECK(mean(v) == 3.0);
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("bootstrap intervals bracket the estimate") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(Stream(4, i).uniform());
  auto m = bootstrap_median(v, 200, 11);
  CHECK(m.ci_lo <= m.value);
  CHECK(m.value <= m.ci_hi);
  CHECK(m.ci_hi - m.ci_lo < 0.1);
  CHECK(m.value == doctest::Approx(0.5).epsilon(0.1));
  auto again = bootstrap_median(v, 200, 11);
  CHECK(again.ci_lo == m.ci_lo);
  CHECK(again.ci_hi == m.ci_hi);
  auto mu = bootstrap_mean(v, 200, 11);
  CHECK(mu.ci_lo < 0.5);
  CHECK(mu.ci_hi > 0.5);
}

TEST_CASE("KS distance") {
  std::vector<double> v;
  for (int i = 0; i < 20000; ++i) v.push_back(Stream(8, i).uniform());
  const double d = ks_distance(v, [](double t) { return std::clamp(t, 0.0, 1.0); });
  CHECK(d < 1.36 / std::sqrt(20000.0));
  const double bad = ks_distance(v, [](double t) { return std::clamp(t * t, 0.0, 1.0); });
  CHECK(bad > 0.2);
}

TEST_CASE("weighted least squares") {
  std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9}, w{1, 1, 1, 1};
  auto f = weighted_least_squares(x, y, w, true);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  auto g = weighted_least_squares(x, std::vector<double>{2, 4, 6, 8}, w, false);
  CHECK(g.slope == doctest::Approx(2.0));
  CHECK(g.intercept == 0.0);
  std::vector<double> flat{2, 2, 2, 2};
  CHECK(code_of([&] { weighted_least_squares(flat, y, w, true); }) == ErrorCode::kDegenerateAbscissa);
  CHECK(code_of([&] { weighted_least_squares(x, std::vector<double>{1, 2}, w, true); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("sqrt-log fit recovers its constant") {
  std::vector<double> k{16, 32, 64, 128, 256};
  auto exact = make_points(k, [](double x) { return 1.7 * std::sqrt(std::log(x)); }, 0.0, 0);
  auto f = scaling_fit(exact, ScalingModel::kSqrtLog);
  CHECK(f.constant == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  auto noisy = make_points(k, [](double x) { return 1.7 * std::sqrt(std::log(x)); }, 0.05, 3);
  auto g = scaling_fit(noisy, ScalingModel::kSqrtLog);
  CHECK(std::abs(g.constant / 1.7 - 1.0) < 0.1);
  CHECK(g.r2 > 0.95);
}

TEST_CASE("power-law fit recovers its exponent") {
  std::vector<double> r{4, 8, 16, 32, 64};
  auto exact = make_points(r, [](double x) { return 0.3 * std::pow(x, -0.75); }, 0.0, 0);
  auto f = scaling_fit(exact, ScalingModel::kPowerLaw);
  CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(0.3).epsilon(1e-12));
  auto sq = make_points(r, [](double x) { return 2.0 * std::sqrt(x); }, 0.05, 9);
  auto g = scaling_fit(sq, ScalingModel::kSqrtR);
  CHECK(std::abs(g.slope - 0.5) < 0.05);
  CHECK(g.r2 > 0.95);
}

TEST_CASE("scaling fit input checks") {
  auto three = make_points({2, 4, 8}, [](double x) { return x; }, 0.0, 0);
  CHECK(code_of([&] { scaling_fit(three, ScalingModel::kPowerLaw); }) == ErrorCode::kInsufficientSamples);
  auto same = make_points({4, 4, 4, 4}, [](double x) { return x; }, 0.0, 0);
  CHECK(code_of([&] { scaling_fit(same, ScalingModel::kPowerLaw); }) == ErrorCode::kDegenerateAbscissa);
  CHECK(scaling_model_from_string("sqrt-log") == ScalingModel::kSqrtLog);
  CHECK(to_string(ScalingModel::kPowerLaw) == "power-law");
  CHECK(code_of([] { scaling_model_from_string("cubic"); }) == ErrorCode::kConfig);
}

TEST_CASE("exponential tail fit") {
  // Exact exponential tail with c = 0.8.
  std::vector<double> x, p;
  for (int i = 1; i <= 8; ++i) {
    x.push_back(i);
    p.push_back(std::exp(-0.8 * i));
  }
  auto f = exponential_tail_fit(x, p, 100000);
  CHECK(f.slope == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.used.size() == 8);
  // With M = 1000 only bins with M P >= 20 survive: exp(-0.8 i) >= 0.02 means i <= 4.
  auto g = exponential_tail_fit(x, p, 1000);
  CHECK(g.used.size() == 4);
  CHECK(code_of([&] { exponential_tail_fit(x, p, 30); }) == ErrorCode::kInsufficientSamples);
}
