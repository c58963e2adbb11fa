#pragma once

#include <optional>
#include <string>
#include <vector>

#include "korrontea/fusion.hpp"
#include "korrontea/random.hpp"

namespace korrontea::testing {

inline const SiteId kSite{"L1"};

FlowDescriptor hard_flow(const std::string& id);
FlowDescriptor soft_flow(const std::string& id);

// Slice of `flow` with `units` units whose payloads read "<flow>@<stamp>#<n>".
SynchronousSlice make_slice(const std::string& flow, Tick stamp, int units = 1, const SiteId& site = kSite);

// Slices of one flow at the given stamps.
std::vector<SynchronousSlice> make_flow(const std::string& flow, const std::vector<Tick>& stamps);

struct Arrival {
  std::string flow;
  Tick stamp = 0;
  Tick at = 0;
};

// Feeds arrivals (sorted by `at`) to a fresh engine, running its timers on
// a VirtualTimeline; every flow ends right after its last arrival. Returns
// all emissions in order, unplaced slices in `unplaced` if given.
std::vector<Emission> run_engine(const std::vector<FlowDescriptor>& group, const PolicyParams& params,
                                 std::vector<Arrival> arrivals, std::vector<FlowStamps>* unplaced = nullptr);

// Strictly increasing random stamps starting in [0, max_gap).
std::vector<Tick> random_stamps(Rng& rng, std::size_t n, Tick max_gap);

// Valid slice with 1-3 flows, 1-4 units each and random payloads.
SynchronousSlice random_slice(Rng& rng);

// Straight linear scans over plain stamp lists, written independently of
// the occurrence module. nullopt where the operator is undefined.
std::optional<Tick> brute_first_slice(const std::vector<Tick>& flow, Tick t);
std::optional<Tick> brute_first_occurrence(const std::vector<std::vector<Tick>>& group, Tick t);
std::optional<Tick> brute_last_occurrence(const std::vector<std::vector<Tick>>& group, Tick t);

}  // namespace korrontea::testing
