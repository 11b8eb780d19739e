#pragma once

#include <string>
#include <vector>

namespace semibloch {

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", ">=", "in", "==", "decreasing"
  double lo = 0.0, hi = 0.0;
  bool pass = false;
  std::string describe() const;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  double budget = 0.0;   // seconds
  double seconds = 0.0;
  std::vector<Check> checks;
  std::vector<std::string> info;  // context, not verdicts
  bool pass() const;
  std::string line() const;  // "PASS  c3 ..." one line
};

const std::vector<int>& criterion_ids();
std::string criterion_title(int id);
double criterion_budget(int id);
// the wall-clock check is appended by this function
CriterionResult run_criterion(int id, int threads = 1);

}  // namespace semibloch
