#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace udn {

/// Outcome of one release-gate check. measured is normalized so that
/// measured <= tolerance means pass (see each check's detail string for the
/// quantity and units).
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

/// Run the full release gate: analytic cross-checks, simulator agreement,
/// bound sandwiches, asymptotics, figure-shape checks, special-function
/// oracles, and bytewise reproducibility. Every tolerance is fixed here.
/// When progress is non-null, one line per finished criterion is streamed
/// to it. A non-empty `only` restricts the run to those criterion ids.
/// Checks that throw are reported as failures, not propagated.
std::vector<CriterionResult> run_acceptance_suite(
    std::ostream* progress = nullptr, const std::vector<int>& only = {});

/// One line per criterion: "id,status,measured,tolerance,name".
std::string acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace udn
