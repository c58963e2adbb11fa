#include "korrontea/fusion.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "korrontea/occurrence.hpp"

namespace korrontea {

namespace {

constexpr Tick kMinTick = std::numeric_limits<Tick>::min();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void PolicyParams::validate() const {
  if (theta <= 0) throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  if (alpha < 0) throw Error(ErrorCode::kInvalidArgument, "alpha must be non-negative");
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kHard: return "hard";
    case Policy::kMixed: return "mixed";
    case Policy::kSoft: return "soft";
  }
  return "?";
}

Policy select_policy(std::span<const FlowDescriptor> group) {
  if (group.empty()) throw Error(ErrorCode::kEmptyGroup, "no flow to synchronize");
  bool any_hard = false;
  bool any_soft = false;
  for (const auto& d : group) {
    if (d.site != group.front().site) {
      throw Error(ErrorCode::kMixedSites,
                  fmt::format("flow {} is on {}, flow {} on {}", d.flow_id, d.site.str(),
                              group.front().flow_id, group.front().site.str()));
    }
    (d.constraint == TemporalConstraint::kHard ? any_hard : any_soft) = true;
  }
  if (any_hard && any_soft) return Policy::kMixed;
  return any_hard ? Policy::kHard : Policy::kSoft;
}

SynchronousSlice compose_result_slice(std::span<const ConsumedFlow> consumed, Tick output_ts) {
  struct Item {
    UnitPosition pos;
    const InformationUnit* unit;
  };
  const SiteId* site = nullptr;
  std::map<std::string, std::vector<Item>> per_flow;
  for (const auto& flow : consumed) {
    for (const auto& s : flow.slices) {
      if (site == nullptr) {
        site = &s.site;
      } else if (s.site != *site) {
        throw Error(ErrorCode::kMixedSites, "consumed slices come from different sites");
      }
      for (const auto& [key, units] : s.units) {
        auto& items = per_flow[key];
        for (const auto& u : units) items.push_back({{s.time_stamp, u.sequence_number}, &u});
      }
    }
  }
  std::erase_if(per_flow, [](const auto& kv) { return kv.second.empty(); });
  if (site == nullptr || per_flow.empty()) {
    throw Error(ErrorCode::kEmptyConsumption, "nothing to compose");
  }

  SynchronousSlice out{.time_stamp = output_ts, .site = *site, .units = {}};
  for (auto& [key, items] : per_flow) {
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return compare_units(a.pos, b.pos) < 0;
    });
    auto& dest = out.units[key];
    dest.reserve(items.size());
    SequenceNumber n = 0;
    for (const auto& item : items) {
      InformationUnit u = *item.unit;
      u.sequence_number = ++n;
      dest.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<SynchronousFlowHistory> separate(const SynchronousFlowHistory& composed) {
  if (!composed.is_composed()) {
    throw Error(ErrorCode::kAlreadyPrimitive, "separation needs a composed flow");
  }
  std::vector<SynchronousFlowHistory> out;
  for (const auto& d : composed.flow_set()) {
    SynchronousFlowHistory primitive(composed.site(), {d});
    for (const auto& s : composed.slices()) {
      auto it = s.units.find(d.flow_id);
      if (it == s.units.end() || it->second.empty()) continue;
      primitive.append({.time_stamp = s.time_stamp, .site = s.site, .units = {{d.flow_id, it->second}}});
    }
    out.push_back(std::move(primitive));
  }
  return out;
}

std::size_t FusionEngine::FlowState::first_on_time() const {
  std::size_t i = 0;
  while (i < meta.size() && meta[i].late) ++i;
  return i;
}

FusionEngine::FusionEngine(SiteId site, std::vector<FlowDescriptor> group, PolicyParams params)
    : site_(std::move(site)),
      params_(params),
      policy_(select_policy(group)),
      history_(site_, group) {
  params_.validate();
  for (auto& d : group) {
    if (d.site != site_) {
      throw Error(ErrorCode::kMixedSites, fmt::format("flow {} is not on {}", d.flow_id, site_.str()));
    }
    if (!index_.emplace(d.flow_id, flows_.size()).second) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("flow {} listed twice", d.flow_id));
    }
    flows_.push_back({.descriptor = std::move(d), .slices = {}, .meta = {}, .ended = false, .last_stamp = {}, .last_arrival = {}});
  }
}

bool FusionEngine::all_ended() const {
  return std::all_of(flows_.begin(), flows_.end(), [](const auto& f) { return f.ended; });
}

std::size_t FusionEngine::buffered() const {
  std::size_t n = 0;
  for (const auto& f : flows_) n += f.slices.size();
  return n;
}

bool FusionEngine::timed(const FlowState& f) const {
  switch (policy_) {
    case Policy::kHard: return false;
    case Policy::kMixed: return f.hard();
    case Policy::kSoft: return true;
  }
  return false;
}

StepOutput FusionEngine::step(const EngineEvent& event) {
  StepOutput out;
  std::visit(overloaded{
                 [&](const SliceArrived& ev) { on_slice(ev, out); },
                 [&](const TimerFired& ev) { on_timer(ev); },
                 [&](const FlowEnded& ev) { on_end(ev); },
             },
             event);
  while (auto e = try_emit()) {
    history_.append(e->slice);
    out.emissions.push_back(std::move(*e));
  }
  if (all_ended() && !drained_) drain(out);
  return out;
}

void FusionEngine::on_slice(const SliceArrived& ev, StepOutput& out) {
  auto it = index_.find(ev.flow_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownFlow, fmt::format("flow {} is not in the group", ev.flow_id));
  }
  FlowState& f = flows_[it->second];
  if (f.ended) throw Error(ErrorCode::kEventAfterEnd, fmt::format("flow {} has ended", ev.flow_id));
  const SynchronousSlice& s = ev.slice;
  if (s.site != site_) {
    throw Error(ErrorCode::kMixedSites, fmt::format("slice from {} reached {}", s.site.str(), site_.str()));
  }
  for (const auto& [key, _] : s.units) {
    if (key != ev.flow_id) {
      throw Error(ErrorCode::kUnknownFlow,
                  fmt::format("slice of flow {} carries units of {}", ev.flow_id, key));
    }
  }
  if (auto v = validate_slice(s, std::span(&f.descriptor, 1)); !v.empty()) {
    throw Error(ErrorCode::kInvalidArgument, v.front().message);
  }
  if (f.last_stamp && s.time_stamp <= *f.last_stamp) {
    throw Error(ErrorCode::kNonMonotonicStamps,
                fmt::format("flow {}: stamp {} after {}", ev.flow_id, s.time_stamp, *f.last_stamp));
  }
  if (f.last_arrival && ev.arrival_tick < *f.last_arrival) {
    throw Error(ErrorCode::kNonMonotonicStamps,
                fmt::format("flow {}: arrival {} after {}", ev.flow_id, ev.arrival_tick, *f.last_arrival));
  }
  f.last_stamp = s.time_stamp;
  f.last_arrival = ev.arrival_tick;

  SliceMeta meta;
  meta.late = last_bound_ && s.time_stamp <= *last_bound_;
  if (timed(f)) {
    std::uint64_t id = next_timer_++;
    timers_.emplace(id, std::make_pair(it->second, s.time_stamp));
    meta.timer = id;
    Tick delay = policy_ == Policy::kSoft ? params_.alpha + params_.theta : params_.alpha;
    out.timers.push_back({id, delay});
  }
  f.slices.push_back(s);
  f.meta.push_back(meta);
}

void FusionEngine::on_timer(const TimerFired& ev) {
  // Timers of slices consumed before their delay elapsed were cancelled.
  auto it = timers_.find(ev.timer_id);
  if (it == timers_.end()) return;
  auto [flow, stamp] = it->second;
  timers_.erase(it);
  FlowState& f = flows_[flow];
  auto pos = std::lower_bound(f.slices.begin(), f.slices.end(), stamp,
                              [](const SynchronousSlice& s, Tick t) { return s.time_stamp < t; });
  f.meta[static_cast<std::size_t>(pos - f.slices.begin())].fired = true;
  ++autorisation_;
}

void FusionEngine::on_end(const FlowEnded& ev) {
  auto it = index_.find(ev.flow_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownFlow, fmt::format("flow {} is not in the group", ev.flow_id));
  }
  FlowState& f = flows_[it->second];
  if (f.ended) throw Error(ErrorCode::kEventAfterEnd, fmt::format("flow {} already ended", ev.flow_id));
  f.ended = true;
}

std::optional<Emission> FusionEngine::try_emit() {
  std::vector<std::size_t> hard_live;
  std::vector<std::size_t> all;
  std::vector<std::size_t> soft;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    all.push_back(i);
    if (!flows_[i].hard()) soft.push_back(i);
    if (flows_[i].hard() && !flows_[i].exhausted()) hard_live.push_back(i);
  }
  switch (policy_) {
    case Policy::kHard:
      return hard_live.empty() ? std::nullopt : hard_window(hard_live);
    case Policy::kMixed:
      if (!hard_live.empty()) return hard_window(hard_live);
      // Hard flows are exhausted: remaining soft slices go out at the drain.
      return all_ended() ? soft_window(soft) : std::nullopt;
    case Policy::kSoft:
      return soft_window(all);
  }
  return std::nullopt;
}

// Hard and mixed: anchor on the first pending slice of every anchoring flow,
// close the window at T_MAX once each of them shows a later slice.
std::optional<Emission> FusionEngine::hard_window(const std::vector<std::size_t>& anchors) {
  std::vector<FlowView> views;
  for (std::size_t i : anchors) {
    const FlowState& f = flows_[i];
    std::size_t from = f.first_on_time();
    if (from == f.slices.size()) return std::nullopt;
    views.push_back({f.descriptor.flow_id, std::span(f.slices).subspan(from)});
  }
  FlowGroup group(site_, std::move(views));
  Tick t0 = first_occurrence(group, kMinTick);
  Tick t_max = last_occurrence(group, t0);
  for (std::size_t i : anchors) {
    const FlowState& f = flows_[i];
    if (!f.ended && f.slices.back().time_stamp <= t_max) return std::nullopt;
  }
  if (policy_ == Policy::kMixed && !all_ended() && !authorized(anchors, t_max)) return std::nullopt;
  return consume(t_max, anchors, t_max);
}

// Soft: everything within theta of the first pending slice.
std::optional<Emission> FusionEngine::soft_window(const std::vector<std::size_t>& anchors) {
  std::vector<FlowView> views;
  std::vector<std::size_t> with_slices;
  for (std::size_t i : anchors) {
    const FlowState& f = flows_[i];
    std::size_t from = f.first_on_time();
    if (from == f.slices.size()) continue;
    views.push_back({f.descriptor.flow_id, std::span(f.slices).subspan(from)});
    with_slices.push_back(i);
  }
  if (views.empty()) return std::nullopt;
  Tick first = first_occurrence(FlowGroup(site_, std::move(views)), kMinTick);
  if (!all_ended() && !authorized(anchors, first)) return std::nullopt;
  return consume(first + params_.theta, with_slices, std::nullopt);
}

// A timer started by slice x fires no earlier than stamp(x) + delay, so once
// a buffered slice stamped at or after `anchor` has fired, every slice of the
// window delayed by at most alpha has arrived.
bool FusionEngine::authorized(const std::vector<std::size_t>& flows, Tick anchor) const {
  if (autorisation_ <= 0) return false;
  for (std::size_t i : flows) {
    const FlowState& f = flows_[i];
    for (std::size_t k = 0; k < f.slices.size(); ++k) {
      if (f.meta[k].fired && f.slices[k].time_stamp >= anchor) return true;
    }
  }
  return false;
}

Emission FusionEngine::consume(Tick bound, const std::vector<std::size_t>& anchors,
                               std::optional<Tick> t_max) {
  Emission e{.slice = {.time_stamp = 0, .site = site_, .units = {}}, .t_max = t_max,
             .used = {}, .too_early = {}, .late = {}};
  std::vector<ConsumedFlow> consumed;
  std::vector<Tick> anchor_stamps;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    FlowState& f = flows_[i];
    bool anchoring = std::find(anchors.begin(), anchors.end(), i) != anchors.end();
    std::size_t n = 0;
    while (n < f.slices.size() && f.slices[n].time_stamp <= bound) ++n;

    FlowStamps used{f.descriptor.flow_id, {}};
    FlowStamps late{f.descriptor.flow_id, {}};
    ConsumedFlow taken{f.descriptor.flow_id, {}};
    for (std::size_t k = 0; k < n; ++k) {
      const SliceMeta& m = f.meta[k];
      Tick stamp = f.slices[k].time_stamp;
      used.stamps.push_back(stamp);
      if (m.late) {
        late.stamps.push_back(stamp);
      } else if (anchoring) {
        anchor_stamps.push_back(stamp);
      }
      if (m.timer) {
        if (m.fired) {
          --autorisation_;
        } else {
          timers_.erase(*m.timer);
        }
      }
      taken.slices.push_back(std::move(f.slices[k]));
    }
    f.slices.erase(f.slices.begin(), f.slices.begin() + static_cast<std::ptrdiff_t>(n));
    f.meta.erase(f.meta.begin(), f.meta.begin() + static_cast<std::ptrdiff_t>(n));

    if (!taken.slices.empty()) consumed.push_back(std::move(taken));
    if (!late.stamps.empty()) e.late.push_back(std::move(late));
    e.used.push_back(std::move(used));
    if (!f.hard() && !f.slices.empty()) {
      FlowStamps early{f.descriptor.flow_id, {}};
      for (const auto& s : f.slices) early.stamps.push_back(s.time_stamp);
      e.too_early.push_back(std::move(early));
    }
  }
  // Output stamp: firstOccurrence over the anchoring slices used.
  Tick ts = *std::min_element(anchor_stamps.begin(), anchor_stamps.end());
  e.slice = compose_result_slice(consumed, ts);
  last_bound_ = last_bound_ ? std::max(*last_bound_, bound) : bound;
  return e;
}

void FusionEngine::drain(StepOutput& out) {
  for (auto& f : flows_) {
    if (f.slices.empty()) continue;
    FlowStamps left{f.descriptor.flow_id, {}};
    for (const auto& s : f.slices) left.stamps.push_back(s.time_stamp);
    out.unplaced.push_back(std::move(left));
    f.slices.clear();
    f.meta.clear();
  }
  autorisation_ = 0;
  timers_.clear();
  drained_ = true;
}

}  // namespace korrontea
