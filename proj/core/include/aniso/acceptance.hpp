#pragma once

// End-to-end acceptance checks. Each criterion builds its own surfaces, compares
// against closed forms or independent oracles and reports a single verdict.

#include <cstdint>
#include <string>
#include <vector>

namespace aniso {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240917;
};

inline constexpr int kAcceptanceCount = 11;

std::string acceptance_title(int id);

/// Runs one criterion (1-based). Exceptions are caught and reported as failures.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// Runs the given criteria, or all of them when ids is empty.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::vector<int>& ids = {});

/// "PASS  [id] title: detail (seconds)".
std::string format_result(const CriterionResult& result);

}  // namespace aniso
