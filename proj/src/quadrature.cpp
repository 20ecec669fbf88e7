#include "hermrand/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hermrand/error.hpp"
#include "hermrand/hermite.hpp"
#include "json.hpp"

namespace hermrand {

QuadratureRule1D gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw Error(ErrorCode::kOrderOverflow,
                "Gauss-Hermite order " + std::to_string(order) + " outside [1, " +
                    std::to_string(kMaxQuadratureOrder) + "]");
  }
  QuadratureRule1D rule;
  rule.order = order;
  rule.mode = QuadratureMode::kGaussHermite;
  rule.nodes.assign(order, 0.0);

  if (order > 1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 0; k + 1 < order; ++k) sub[k] = std::sqrt(0.5 * (k + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int i = 0; i < order; ++i) rule.nodes[i] = solver.eigenvalues()[i];
  }

  // Newton on h_order, using h_n' = sqrt(2n) h_{n-1} - x h_n.
  const double n = static_cast<double>(order);
  std::vector<double> h(static_cast<std::size_t>(order) + 1);
  for (double& x : rule.nodes) {
    for (int it = 0; it < 4; ++it) {
      hermite_functions(x, h);
      const double deriv = std::sqrt(2.0 * n) * h[order - 1] - x * h[order];
      if (deriv == 0.0) break;
      const double step = h[order] / deriv;
      x -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
    }
  }
  for (int i = 0; i < order / 2; ++i) {
    const double m = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -m;
    rule.nodes[order - 1 - i] = m;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  rule.weights.resize(order);
  rule.scaled_weights.resize(order);
  for (int i = 0; i < order; ++i) {
    const double x = rule.nodes[i];
    hermite_functions(x, std::span<double>(h.data(), static_cast<std::size_t>(order)));
    const double prev = h[order - 1];
    rule.scaled_weights[i] = 1.0 / (n * prev * prev);
    rule.weights[i] = rule.scaled_weights[i] * std::exp(-x * x);
  }
  return rule;
}

QuadratureRule1D uniform_rule(double radius, int points) {
  if (points < 2 || !(radius > 0.0)) {
    throw Error(ErrorCode::kDomain, "uniform rule needs radius > 0 and at least 2 points");
  }
  QuadratureRule1D rule;
  rule.order = points;
  rule.mode = QuadratureMode::kUniformTruncated;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const double step = 2.0 * radius / (points - 1);
  for (int i = 0; i < points; ++i) {
    rule.nodes[i] = -radius + step * i;
    rule.weights[i] = (i == 0 || i == points - 1) ? 0.5 * step : step;
  }
  rule.scaled_weights = rule.weights;
  return rule;
}

std::string quadrature_cache_path(const std::filesystem::path& dir, int order) {
  return (dir / ("gauss_hermite_" + std::to_string(order) + ".json")).string();
}

void write_quadrature_rule(const std::filesystem::path& file, const QuadratureRule1D& rule) {
  nlohmann::json j;
  j["order"] = rule.order;
  j["nodes"] = rule.nodes;
  j["weights"] = rule.weights;
  j["scaled_weights"] = rule.scaled_weights;
  std::ofstream out(file);
  out << j.dump() << '\n';
}

std::optional<QuadratureRule1D> read_quadrature_rule(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    QuadratureRule1D rule;
    rule.order = j.at("order").get<int>();
    rule.mode = QuadratureMode::kGaussHermite;
    rule.nodes = j.at("nodes").get<std::vector<double>>();
    rule.weights = j.at("weights").get<std::vector<double>>();
    rule.scaled_weights = j.at("scaled_weights").get<std::vector<double>>();
    const auto n = static_cast<std::size_t>(rule.order);
    if (rule.nodes.size() != n || rule.weights.size() != n || rule.scaled_weights.size() != n) {
      return std::nullopt;
    }
    return rule;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

namespace {
std::mutex g_memo_mutex;
std::map<int, std::unique_ptr<QuadratureRule1D>> g_memo;
}  // namespace

void clear_quadrature_memo() {
  std::lock_guard lock(g_memo_mutex);
  g_memo.clear();
}

const QuadratureRule1D& cached_gauss_hermite_rule(int order) {
  std::lock_guard lock(g_memo_mutex);
  if (auto it = g_memo.find(order); it != g_memo.end()) return *it->second;

  std::optional<QuadratureRule1D> rule;
  const char* cache_dir = std::getenv("HERMRAND_CACHE");
  std::filesystem::path file;
  if (cache_dir != nullptr && *cache_dir != '\0') {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    file = quadrature_cache_path(cache_dir, order);
    rule = read_quadrature_rule(file);
    if (rule && rule->order != order) rule.reset();
  }
  if (!rule) {
    rule = gauss_hermite_rule(order);
    if (!file.empty()) write_quadrature_rule(file, *rule);
  }
  auto [it, inserted] = g_memo.emplace(order, std::make_unique<QuadratureRule1D>(std::move(*rule)));
  return *it->second;
}

}  // namespace hermrand
