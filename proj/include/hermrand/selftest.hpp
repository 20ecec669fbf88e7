#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hermrand {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite: Gram matrix of cached Gauss-Hermite tables, Mehler
/// identity, trace identity, sphere marginal law, unitarity, Weyl count and
/// thread-count independence of experiment reports.
std::vector<CheckResult> run_selftest(int jobs, std::uint64_t seed = 1);

/// Runs a small instance of every experiment with one worker and with
/// `jobs` workers; returns the names whose reports differ.
std::vector<std::string> determinism_mismatches(int jobs, std::uint64_t seed);

}  // namespace hermrand
