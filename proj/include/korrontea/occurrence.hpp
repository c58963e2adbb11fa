#pragma once

#include <span>
#include <string>
#include <vector>

#include "korrontea/flow_model.hpp"

namespace korrontea {

// A synchronous flow seen as its slices in time-stamp order.
struct FlowView {
  std::string flow_id;
  std::span<const SynchronousSlice> slices;
};

// Set of synchronous flows located on one site.
class FlowGroup {
 public:
  // Throws kMixedSites if any slice is not located on `site`.
  FlowGroup(SiteId site, std::vector<FlowView> flows);

  static FlowGroup of(std::span<const SynchronousFlowHistory> histories);

  const SiteId& site() const noexcept { return site_; }
  const std::vector<FlowView>& flows() const noexcept { return flows_; }

 private:
  SiteId site_;
  std::vector<FlowView> flows_;
};

Tick minimal_time_stamp(std::span<const SynchronousSlice* const> set);
Tick maximal_time_stamp(std::span<const SynchronousSlice* const> set);
Tick minimal_time_stamp(std::span<const SynchronousSlice> set);
Tick maximal_time_stamp(std::span<const SynchronousSlice> set);

// Earliest slice of `flow` stamped at or after t whose predecessor (if any)
// is stamped before t. nullptr when no slice reaches t.
const SynchronousSlice* first_slice(std::span<const SynchronousSlice> flow, Tick t);
const SynchronousSlice* first_slice(const SynchronousFlowHistory& flow, Tick t);

// Smallest stamp >= t over all slices of the group.
Tick first_occurrence(const FlowGroup& group, Tick t);

// Largest stamp among the first slices at or after t of every flow.
Tick last_occurrence(const FlowGroup& group, Tick t);

}  // namespace korrontea
