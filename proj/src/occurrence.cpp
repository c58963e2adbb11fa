#include "korrontea/occurrence.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace korrontea {

FlowGroup::FlowGroup(SiteId site, std::vector<FlowView> flows)
    : site_(std::move(site)), flows_(std::move(flows)) {
  for (const auto& f : flows_) {
    for (const auto& s : f.slices) {
      if (s.site != site_) {
        throw Error(ErrorCode::kMixedSites,
                    fmt::format("flow {} has a slice on {} in a group of {}", f.flow_id,
                                s.site.str(), site_.str()));
      }
    }
  }
}

FlowGroup FlowGroup::of(std::span<const SynchronousFlowHistory> histories) {
  if (histories.empty()) throw Error(ErrorCode::kEmptyGroup, "a flow group needs a flow");
  std::vector<FlowView> views;
  for (const auto& h : histories) {
    if (h.site() != histories.front().site()) {
      throw Error(ErrorCode::kMixedSites, "flows of a group must share one site");
    }
    std::string label;
    for (const auto& d : h.flow_set()) {
      if (!label.empty()) label += '+';
      label += d.flow_id;
    }
    views.push_back({std::move(label), h.slices()});
  }
  return FlowGroup(histories.front().site(), std::move(views));
}

namespace {

template <typename Range, typename Proj, typename Better>
Tick extreme_stamp(const Range& set, Proj proj, Better better) {
  if (set.empty()) throw Error(ErrorCode::kEmptySet, "no slice to inspect");
  const SiteId& site = proj(set.front()).site;
  Tick best = proj(set.front()).time_stamp;
  for (const auto& e : set) {
    const SynchronousSlice& s = proj(e);
    if (s.site != site) throw Error(ErrorCode::kMixedSites, "slices of the set are on different sites");
    if (better(s.time_stamp, best)) best = s.time_stamp;
  }
  return best;
}

const SynchronousSlice& deref(const SynchronousSlice* p) { return *p; }
const SynchronousSlice& self(const SynchronousSlice& s) { return s; }

}  // namespace

Tick minimal_time_stamp(std::span<const SynchronousSlice* const> set) {
  return extreme_stamp(set, deref, std::less<>{});
}

Tick maximal_time_stamp(std::span<const SynchronousSlice* const> set) {
  return extreme_stamp(set, deref, std::greater<>{});
}

Tick minimal_time_stamp(std::span<const SynchronousSlice> set) {
  return extreme_stamp(set, self, std::less<>{});
}

Tick maximal_time_stamp(std::span<const SynchronousSlice> set) {
  return extreme_stamp(set, self, std::greater<>{});
}

const SynchronousSlice* first_slice(std::span<const SynchronousSlice> flow, Tick t) {
  // Stamps strictly increase, so the first stamp >= t is the only slice whose
  // predecessor lies before t. The head of a flow has no predecessor and
  // qualifies on its own.
  auto it = std::lower_bound(flow.begin(), flow.end(), t,
                             [](const SynchronousSlice& s, Tick v) { return s.time_stamp < v; });
  return it == flow.end() ? nullptr : &*it;
}

const SynchronousSlice* first_slice(const SynchronousFlowHistory& flow, Tick t) {
  return first_slice(std::span<const SynchronousSlice>(flow.slices()), t);
}

Tick first_occurrence(const FlowGroup& group, Tick t) {
  std::vector<const SynchronousSlice*> candidates;
  for (const auto& f : group.flows()) {
    if (const auto* s = first_slice(f.slices, t)) candidates.push_back(s);
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kNoQualifyingSlice, fmt::format("no slice stamped at or after {}", t));
  }
  return minimal_time_stamp(candidates);
}

Tick last_occurrence(const FlowGroup& group, Tick t) {
  if (group.flows().empty()) throw Error(ErrorCode::kEmptyGroup, "empty flow group");
  std::vector<const SynchronousSlice*> firsts;
  for (const auto& f : group.flows()) {
    const auto* s = first_slice(f.slices, t);
    if (s == nullptr) {
      throw Error(ErrorCode::kFlowWithoutQualifyingSlice,
                  fmt::format("flow {} has no slice stamped at or after {}", f.flow_id, t));
    }
    firsts.push_back(s);
  }
  return maximal_time_stamp(firsts);
}

}  // namespace korrontea
