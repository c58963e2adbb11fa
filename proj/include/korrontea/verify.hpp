#pragma once

#include <string>
#include <vector>

#include "korrontea/scenario.hpp"
#include "korrontea/trace.hpp"

namespace korrontea::sim {

struct VerifyReport {
  std::size_t records = 0;
  std::size_t expected_records = 0;
  // Output slices (keyed by time stamp) that differ from the offline oracle,
  // counting records missing on either side.
  std::size_t mismatches = 0;
  // Source slices reported late or unplaced.
  std::size_t late_incidents = 0;
  // Source slices missing from the trace or reported more than once.
  std::size_t conservation_failures = 0;
  // Broken trace invariants.
  std::size_t violations = 0;
  std::vector<std::string> findings;

  bool ok() const { return mismatches == 0 && conservation_failures == 0 && violations == 0; }
};

// Checks a trace against the scenario it claims to come from: invariants of
// every record, conservation of source slices and equality with the oracle.
VerifyReport verify(const Trace& trace, const Scenario& scenario);
VerifyReport verify(const Trace& trace, const ScenarioConfig& config);

std::string format_report(const VerifyReport& report, std::size_t max_findings = 20);

}  // namespace korrontea::sim
