#include "hermrand/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hermrand/error.hpp"

namespace hermrand {
namespace {

constexpr int kRescaleExponent = 512;
const double kRescaleUp = std::ldexp(1.0, kRescaleExponent);
const double kRescaleDown = std::ldexp(1.0, -kRescaleExponent);

void check_inputs(int n, double x, int n_max) {
  if (n < 0 || n > n_max) {
    throw Error(ErrorCode::kDegreeOverflow,
                "degree " + std::to_string(n) + " outside [0, " + std::to_string(n_max) + "]");
  }
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::kNonFiniteInput, "Hermite evaluation point is not finite");
  }
}

// exp(binary_exponent * ln 2 - x^2 / 2) times pi^{-1/4}.
double envelope(double x, long binary_exponent) {
  static const double kPiQuarter = std::pow(std::numbers::pi, -0.25);
  return kPiQuarter * std::exp(static_cast<double>(binary_exponent) * std::numbers::ln2 - 0.5 * x * x);
}

// Runs the scaled recurrence g_k = h_k e^{x^2/2} pi^{1/4} 2^{-E_k} and hands
// each (k, h_k) to sink. Both the single-value and the table entry points go
// through here so their results agree bit for bit.
template <class Sink>
void run_recurrence(int n_last, double x, Sink&& sink) {
  long exponent = 0;
  double scale = envelope(x, exponent);
  double g_prev = 0.0;
  double g = 1.0;
  sink(0, g * scale);
  for (int k = 0; k < n_last; ++k) {
    const double kd = static_cast<double>(k);
    const double g_next = std::sqrt(2.0 / (kd + 1.0)) * x * g - std::sqrt(kd / (kd + 1.0)) * g_prev;
    g_prev = g;
    g = g_next;
    if (std::abs(g) > kRescaleUp) {
      g *= kRescaleDown;
      g_prev *= kRescaleDown;
      exponent += kRescaleExponent;
      scale = envelope(x, exponent);
    }
    sink(k + 1, g * scale);
  }
}

}  // namespace

double hermite_function(int n, double x, int n_max) {
  check_inputs(n, x, n_max);
  double value = 0.0;
  run_recurrence(n, x, [&](int k, double v) {
    if (k == n) value = v;
  });
  return value;
}

void hermite_functions(double x, std::span<double> out, int degree_limit) {
  if (out.empty()) return;
  check_inputs(static_cast<int>(out.size()) - 1, x, degree_limit);
  run_recurrence(static_cast<int>(out.size()) - 1, x, [&](int k, double v) { out[k] = v; });
}

std::vector<double> hermite_functions(int n_max, double x, int degree_limit) {
  check_inputs(n_max, x, degree_limit);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  hermite_functions(x, out, degree_limit);
  return out;
}

double hermite_function_derivative(int n, double x, int n_max) {
  check_inputs(n, x, n_max);
  const auto h = hermite_functions(n + 1, x, n_max + 1);
  const double nd = static_cast<double>(n);
  const double lower = n > 0 ? std::sqrt(nd / 2.0) * h[n - 1] : 0.0;
  return lower - std::sqrt((nd + 1.0) / 2.0) * h[n + 1];
}

double hermite_sup_norm(int n) {
  check_inputs(n, 0.0, kDefaultMaxDegree);
  if (n == 0) return std::pow(std::numbers::pi, -0.25);
  // |h_n| peaks on its last lobe just inside the turning point sqrt(2n+1); an
  // interior lobe is never larger, but scan the full half-line to be safe.
  const double turning = std::sqrt(2.0 * n + 1.0);
  const double upper = turning + 4.0;
  const double step = 0.25 * std::numbers::pi / turning;
  double best_x = 0.0;
  double best = 0.0;
  for (double x = 0.0; x <= upper; x += step) {
    const double v = std::abs(hermite_function(n, x));
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(0.0, best_x - step);
  double hi = best_x + step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = std::abs(hermite_function(n, a));
  double fb = std::abs(hermite_function(n, b));
  for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = std::abs(hermite_function(n, a));
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = std::abs(hermite_function(n, b));
    }
  }
  return std::max({best, fa, fb});
}

}  // namespace hermrand
