#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "korrontea/fusion.hpp"

namespace korrontea::sim {

// How one flow contributed to an output slice.
struct FlowUsage {
  std::string flow;
  std::size_t count = 0;
  std::vector<Tick> stamps;
  // Output sequence numbers, only when they are not 1..n.
  std::optional<std::vector<SequenceNumber>> sequence_numbers;

  friend bool operator==(const FlowUsage&, const FlowUsage&) = default;
};

struct TraceRecord {
  std::size_t index = 0;
  Tick ts = 0;
  // Absent exactly for slices built with soft windows.
  std::optional<Tick> t_max;
  std::vector<FlowUsage> flows;
  std::vector<FlowStamps> too_early;
  std::vector<FlowStamps> late;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<FlowStamps> unplaced;

  friend bool operator==(const Trace&, const Trace&) = default;
};

TraceRecord record_from(const Emission& emission, std::size_t index);

// One line per record:
//   SLICE <n> ts=<t> [TMAX=<t>] <flow>:<count>{<stamps>}[<seqs>] ... [early:<flow>{..}] [late:<flow>{..}]
// followed by "UNPLACED <flow>{<stamps>}" lines. '#' starts a comment line.
std::string emit_trace(const Trace& trace);

// Throws kTraceSyntaxError naming the offending line.
Trace parse_trace(std::string_view text);

}  // namespace korrontea::sim
