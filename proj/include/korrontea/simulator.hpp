#pragma once

#include <string>
#include <vector>

#include "korrontea/scenario.hpp"
#include "korrontea/trace.hpp"

namespace korrontea::sim {

struct SimulationResult {
  Trace trace;
  SynchronousFlowHistory composed;
  // Virtual tick at which each record's slice was constituted.
  std::vector<Tick> emit_ticks;
  std::size_t late_incidents = 0;
};

// Runs the scenario in virtual time: every slice is sent on its flow's
// simulated channel at its own stamp, arrivals feed the fusion engine, and
// engine timers run on a VirtualTimeline. At one tick, arrivals are handled
// before timers.
SimulationResult run_scenario(const Scenario& scenario);
SimulationResult run_simulation(const ScenarioConfig& config);

struct SweepRow {
  Tick alpha = 0;
  std::size_t slices = 0;
  std::size_t mismatches = 0;
  std::size_t late = 0;
  double mean_latency = 0;
  Tick max_latency = 0;
};

// One simulation per alpha in [from, to]; latency is emit tick minus the
// output time stamp.
std::vector<SweepRow> sweep_alpha(const ScenarioConfig& config, Tick from, Tick to);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace korrontea::sim
