#pragma once

#include <optional>
#include <span>
#include <vector>

#include "korrontea/fusion.hpp"

namespace korrontea {

struct CompleteFlow {
  FlowDescriptor descriptor;
  std::vector<SynchronousSlice> slices;
};

// One composed slice as derived offline: which source slices it gathers.
struct OracleWindow {
  Tick output_ts = 0;
  std::optional<Tick> t_max;
  // One entry per input flow, in input order.
  std::vector<FlowStamps> used;
};

// Windows of the composed flow, evaluated directly on complete histories:
// hard rounds cover (previous T_MAX, lastOccurrence], soft windows cover
// [firstOccurrence, firstOccurrence + theta], mixed rounds are anchored on
// the hard flows.
std::vector<OracleWindow> oracle_windows(const SiteId& site, std::span<const CompleteFlow> flows,
                                         const PolicyParams& params, Policy policy);

SynchronousFlowHistory oracle_compose(const SiteId& site, std::span<const CompleteFlow> flows,
                                      const PolicyParams& params, Policy policy);

}  // namespace korrontea
