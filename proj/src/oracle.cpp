#include "korrontea/oracle.hpp"

#include <limits>

#include <fmt/format.h>

#include "korrontea/occurrence.hpp"

namespace korrontea {

namespace {

constexpr Tick kMinTick = std::numeric_limits<Tick>::min();

void check_inputs(const SiteId& site, std::span<const CompleteFlow> flows, Policy policy) {
  std::vector<FlowDescriptor> descriptors;
  for (const auto& f : flows) {
    const auto& id = f.descriptor.flow_id;
    if (f.descriptor.site != site) {
      throw Error(ErrorCode::kMixedSites, fmt::format("flow {} is not on {}", id, site.str()));
    }
    for (std::size_t i = 0; i < f.slices.size(); ++i) {
      const auto& s = f.slices[i];
      if (s.site != site) {
        throw Error(ErrorCode::kMixedSites, fmt::format("flow {} has a slice on {}", id, s.site.str()));
      }
      for (const auto& [key, _] : s.units) {
        if (key != id) {
          throw Error(ErrorCode::kUnknownFlow, fmt::format("slice of {} carries units of {}", id, key));
        }
      }
      if (auto v = validate_slice(s); !v.empty()) throw Error(ErrorCode::kInvalidArgument, v.front().message);
      if (i > 0 && s.time_stamp <= f.slices[i - 1].time_stamp) {
        throw Error(ErrorCode::kNonMonotonicStamps, fmt::format("flow {} stamps do not increase", id));
      }
    }
    descriptors.push_back(f.descriptor);
  }
  if (!descriptors.empty() && select_policy(descriptors) != policy) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("policy {} does not match the flow constraints", to_string(policy)));
  }
}

class WindowBuilder {
 public:
  WindowBuilder(const SiteId& site, std::span<const CompleteFlow> flows) : site_(site), flows_(flows) {}

  // Flows (by index) that still have a slice stamped at or after t.
  std::vector<std::size_t> reaching(Tick t, bool hard_only, bool soft_only) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      bool hard = flows_[i].descriptor.constraint == TemporalConstraint::kHard;
      if ((hard_only && !hard) || (soft_only && hard)) continue;
      if (first_slice(std::span(flows_[i].slices), t) != nullptr) out.push_back(i);
    }
    return out;
  }

  FlowGroup group(const std::vector<std::size_t>& members) const {
    std::vector<FlowView> views;
    for (std::size_t i : members) views.push_back({flows_[i].descriptor.flow_id, flows_[i].slices});
    return FlowGroup(site_, std::move(views));
  }

  // Every slice of every flow stamped in [from, to].
  OracleWindow gather(Tick from, Tick to, Tick output_ts, std::optional<Tick> t_max) const {
    OracleWindow w{output_ts, t_max, {}};
    for (const auto& f : flows_) {
      FlowStamps used{f.descriptor.flow_id, {}};
      for (const auto& s : f.slices) {
        if (s.time_stamp >= from && s.time_stamp <= to) used.stamps.push_back(s.time_stamp);
      }
      w.used.push_back(std::move(used));
    }
    return w;
  }

 private:
  const SiteId& site_;
  std::span<const CompleteFlow> flows_;
};

}  // namespace

std::vector<OracleWindow> oracle_windows(const SiteId& site, std::span<const CompleteFlow> flows,
                                         const PolicyParams& params, Policy policy) {
  params.validate();
  check_inputs(site, flows, policy);
  WindowBuilder b(site, flows);
  std::vector<OracleWindow> out;
  Tick t = kMinTick;

  if (policy == Policy::kHard || policy == Policy::kMixed) {
    bool hard_only = policy == Policy::kMixed;
    for (;;) {
      auto live = b.reaching(t, hard_only, false);
      if (live.empty()) break;
      FlowGroup g = b.group(live);
      Tick t_max = last_occurrence(g, t);
      Tick ts = first_occurrence(g, t);
      out.push_back(b.gather(t, t_max, ts, t_max));
      t = t_max + 1;
    }
  }
  if (policy == Policy::kSoft || policy == Policy::kMixed) {
    bool soft_only = policy == Policy::kMixed;
    for (;;) {
      auto live = b.reaching(t, false, soft_only);
      if (live.empty()) break;
      Tick first = first_occurrence(b.group(live), t);
      Tick upper = first + params.theta;
      out.push_back(b.gather(first, upper, first, std::nullopt));
      t = upper + 1;
    }
  }
  return out;
}

SynchronousFlowHistory oracle_compose(const SiteId& site, std::span<const CompleteFlow> flows,
                                      const PolicyParams& params, Policy policy) {
  std::vector<FlowDescriptor> descriptors;
  for (const auto& f : flows) descriptors.push_back(f.descriptor);
  SynchronousFlowHistory out(site, descriptors);
  for (const auto& w : oracle_windows(site, flows, params, policy)) {
    std::vector<ConsumedFlow> consumed;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      ConsumedFlow c{flows[i].descriptor.flow_id, {}};
      for (const auto& s : flows[i].slices) {
        const auto& stamps = w.used[i].stamps;
        if (std::find(stamps.begin(), stamps.end(), s.time_stamp) != stamps.end()) c.slices.push_back(s);
      }
      if (!c.slices.empty()) consumed.push_back(std::move(c));
    }
    out.append(compose_result_slice(consumed, w.output_ts));
  }
  return out;
}

}  // namespace korrontea
