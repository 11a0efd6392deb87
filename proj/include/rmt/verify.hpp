#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rmt {

// One bound-compliance check inside a criterion. The label states the
// comparison direction; pass records whether measured satisfies bound.
struct CheckLine {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string suite;
  bool passed = false;
  double seconds = 0.0;
  std::vector<CheckLine> checks;

  // The check with the smallest margin (failed ones first), for one-line
  // summaries.
  const CheckLine* binding() const;
};

struct CriterionInfo {
  int id;
  const char* name;
  const char* suite;
};

// Stable id -> (name, suite) table for the whole verification battery.
const std::vector<CriterionInfo>& criterion_catalog();

// Expand selection tokens (criterion ids, criterion names, suite names, or
// "all") into sorted unique criterion ids. Unknown token ->
// std::invalid_argument.
std::vector<int> select_criteria(const std::vector<std::string>& tokens);

// Run one criterion at the given seed. threads parallelizes independent
// draw loops; Markov chains always advance sequentially.
CriterionResult run_criterion(int id, std::uint64_t seed, int threads);

}  // namespace rmt
