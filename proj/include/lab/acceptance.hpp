#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lab::acceptance {

// One gate of the release checklist. detail carries the measured numbers on
// a pass and the first failing comparison (or the exception) on a fail.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs the full 12-criterion gate in order. Criteria never throw out of this
// call: an escaped exception marks its criterion failed with the message.
std::vector<CriterionResult> run_all();

// One PASS/FAIL line per criterion plus a summary; true iff all passed.
bool print_report(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace lab::acceptance
