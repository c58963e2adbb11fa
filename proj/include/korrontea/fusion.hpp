#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "korrontea/flow_model.hpp"

namespace korrontea {

struct PolicyParams {
  // Boundary between hard and soft temporal constraints.
  Tick theta = 1;
  // Assumed maximum delay of slices on each flow.
  Tick alpha = 0;

  void validate() const;
};

enum class Policy { kHard, kMixed, kSoft };

std::string_view to_string(Policy p);

// Hard if every flow is hard, soft if every flow is soft, mixed otherwise.
Policy select_policy(std::span<const FlowDescriptor> group);

struct SliceArrived {
  std::string flow_id;
  SynchronousSlice slice;
  Tick arrival_tick = 0;
};

struct TimerFired {
  std::uint64_t timer_id = 0;
};

struct FlowEnded {
  std::string flow_id;
};

using EngineEvent = std::variant<SliceArrived, TimerFired, FlowEnded>;

// The engine asks its driver to deliver TimerFired{timer_id} after `delay`.
struct TimerRequest {
  std::uint64_t timer_id = 0;
  Tick delay = 0;
};

struct FlowStamps {
  std::string flow_id;
  std::vector<Tick> stamps;

  friend bool operator==(const FlowStamps&, const FlowStamps&) = default;
};

struct Emission {
  SynchronousSlice slice;
  std::optional<Tick> t_max;
  // Source slices used, one entry per group flow in group order.
  std::vector<FlowStamps> used;
  // Soft flows holding buffered slices that did not fit this window.
  std::vector<FlowStamps> too_early;
  // Source slices that arrived after their own window had been emitted.
  std::vector<FlowStamps> late;
};

struct StepOutput {
  std::vector<Emission> emissions;
  std::vector<TimerRequest> timers;
  // Late slices left over once every flow has ended.
  std::vector<FlowStamps> unplaced;
};

struct ConsumedFlow {
  std::string flow_id;
  std::vector<SynchronousSlice> slices;
};

// Builds one composed slice: every unit of every consumed slice, ordered per
// flow by (source stamp, source sequence number) and renumbered from 1.
SynchronousSlice compose_result_slice(std::span<const ConsumedFlow> consumed, Tick output_ts);

// Splits a composed flow into one primitive flow per member flow.
std::vector<SynchronousFlowHistory> separate(const SynchronousFlowHistory& composed);

// Event-driven fusion component. Feed it a totally ordered event stream; it
// answers with the composed slices it could constitute and the timers it
// needs. Not thread-safe: exactly one step() at a time.
class FusionEngine {
 public:
  FusionEngine(SiteId site, std::vector<FlowDescriptor> group, PolicyParams params);

  StepOutput step(const EngineEvent& event);

  Policy policy() const noexcept { return policy_; }
  const PolicyParams& params() const noexcept { return params_; }
  const SynchronousFlowHistory& history() const noexcept { return history_; }
  std::int64_t autorisation() const noexcept { return autorisation_; }
  bool all_ended() const;
  std::size_t buffered() const;

 private:
  struct SliceMeta {
    bool late = false;
    std::optional<std::uint64_t> timer;
    bool fired = false;
  };

  struct FlowState {
    FlowDescriptor descriptor;
    std::vector<SynchronousSlice> slices;  // buffered, in stamp order
    std::vector<SliceMeta> meta;
    bool ended = false;
    std::optional<Tick> last_stamp;
    std::optional<Tick> last_arrival;

    bool hard() const { return descriptor.constraint == TemporalConstraint::kHard; }
    bool exhausted() const { return ended && slices.empty(); }
    // Late slices form a prefix of the buffer.
    std::size_t first_on_time() const;
  };

  void on_slice(const SliceArrived& ev, StepOutput& out);
  void on_timer(const TimerFired& ev);
  void on_end(const FlowEnded& ev);

  bool timed(const FlowState& f) const;
  std::optional<Emission> try_emit();
  std::optional<Emission> hard_window(const std::vector<std::size_t>& anchors);
  std::optional<Emission> soft_window(const std::vector<std::size_t>& anchors);
  bool authorized(const std::vector<std::size_t>& flows, Tick anchor) const;
  Emission consume(Tick bound, const std::vector<std::size_t>& anchors, std::optional<Tick> t_max);
  void drain(StepOutput& out);

  SiteId site_;
  PolicyParams params_;
  Policy policy_;
  std::vector<FlowState> flows_;
  std::unordered_map<std::string, std::size_t> index_;
  // Running timers: id -> (flow index, slice stamp).
  std::unordered_map<std::uint64_t, std::pair<std::size_t, Tick>> timers_;
  std::uint64_t next_timer_ = 1;
  std::int64_t autorisation_ = 0;
  // Upper bound of the last emitted window.
  std::optional<Tick> last_bound_;
  bool drained_ = false;
  SynchronousFlowHistory history_;
};

}  // namespace korrontea
