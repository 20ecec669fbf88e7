#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hermrand {

inline constexpr int kMaxQuadratureOrder = 2048;

enum class QuadratureMode {
  kGaussHermite,    ///< weight e^{-x^2} on the real line
  kUniformTruncated ///< unit weight, trapezoid on [-R, R]
};

/// One-dimensional quadrature rule.
///
/// In Gauss-Hermite mode `weights` integrate against e^{-x^2}, and
/// `scaled_weights[i] = weights[i] * exp(nodes[i]^2)` integrate plain functions
/// that already carry the Gaussian decay (products of Hermite functions). The
/// scaled weights are computed directly, so they stay positive and accurate at
/// orders where the raw weights underflow. In uniform mode both arrays hold the
/// trapezoid weights.
struct QuadratureRule1D {
  int order = 0;
  QuadratureMode mode = QuadratureMode::kGaussHermite;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> scaled_weights;
};

/// Golub-Welsch nodes polished by Newton on h_order, weights from
/// w_i = exp(-x_i^2) / (order * h_{order-1}(x_i)^2).
QuadratureRule1D gauss_hermite_rule(int order);

/// Same rule, memoized in-process and, when the HERMRAND_CACHE environment
/// variable names a directory, persisted there as JSON. A cached file is
/// trusted as-is; that is how the self-test's fault injection works.
const QuadratureRule1D& cached_gauss_hermite_rule(int order);

/// Drops the in-process memo (tests use this after swapping cache files).
void clear_quadrature_memo();

/// Trapezoid rule on `points` equispaced nodes spanning [-radius, radius].
QuadratureRule1D uniform_rule(double radius, int points);

std::string quadrature_cache_path(const std::filesystem::path& dir, int order);
void write_quadrature_rule(const std::filesystem::path& file, const QuadratureRule1D& rule);
std::optional<QuadratureRule1D> read_quadrature_rule(const std::filesystem::path& file);

}  // namespace hermrand
