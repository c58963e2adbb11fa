#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "korrontea/channel.hpp"
#include "korrontea/fusion.hpp"
#include "korrontea/oracle.hpp"

namespace korrontea::sim {

struct FlowSpec {
  int number = 0;
  // Hard flows: exact period. Soft flows: largest gap between two slices.
  Tick period = 1;
  // Transport delay of each slice is drawn in [0, max_delay].
  Tick max_delay = 0;

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct ScenarioConfig {
  Tick theta = 10;
  Tick alpha = 0;
  std::vector<FlowSpec> hard_flows;
  std::vector<FlowSpec> soft_flows;
  std::int64_t rounds = 1;
  std::uint64_t seed = 0;
  std::string site = "site0";

  // Throws kInvalidConfig.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string to_json(const ScenarioConfig& config);

// Hard flows are named with a capital letter (F0, F1, ...), soft ones with a
// small letter (f0, f1, ...).
std::string flow_name(TemporalConstraint constraint, int number);

struct ScheduledSlice {
  SynchronousSlice slice;
  Tick send_tick = 0;
  Tick arrival_tick = 0;
};

struct GeneratedFlow {
  FlowDescriptor descriptor;
  FlowSpec spec;
  transport::ChannelConfig channel;
  std::vector<ScheduledSlice> slices;
};

struct Scenario {
  SiteId site;
  PolicyParams params;
  // Hard flows first, then soft flows, each in configuration order.
  std::vector<GeneratedFlow> flows;

  std::vector<FlowDescriptor> descriptors() const;
  std::vector<CompleteFlow> complete() const;
  Policy policy() const { return select_policy(descriptors()); }
};

// Deterministic for a given configuration (seed included).
Scenario generate_scenario(const ScenarioConfig& config);

}  // namespace korrontea::sim
