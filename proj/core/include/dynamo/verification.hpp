#pragma once

#include <string>
#include <vector>

namespace dynamo {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<CheckResult> checks;
  /// Report-only material (tables, sign verdicts) printed after the checks.
  std::string report;
  double seconds = 0.0;

  bool passed() const;
};

/// Runs acceptance criteria 1-8 (all when `ids` is empty).
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// "PASS criterion 3: <title>" followed by indented per-check lines.
std::string format_criterion(const CriterionResult& result);

}  // namespace dynamo
