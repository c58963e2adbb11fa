#include "helpers.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "korrontea/clocks.hpp"

namespace korrontea::testing {

FlowDescriptor hard_flow(const std::string& id) {
  return {id, "src-" + id, kSite, TemporalConstraint::kHard, "raw", std::nullopt};
}

FlowDescriptor soft_flow(const std::string& id) {
  return {id, "src-" + id, kSite, TemporalConstraint::kSoft, "raw", std::nullopt};
}

SynchronousSlice make_slice(const std::string& flow, Tick stamp, int units, const SiteId& site) {
  SynchronousSlice s{stamp, site, {}};
  auto& list = s.units[flow];
  for (int n = 1; n <= units; ++n) {
    std::string text = fmt::format("{}@{}#{}", flow, stamp, n);
    list.push_back({flow, static_cast<SequenceNumber>(n), {{{text.begin(), text.end()}}}});
  }
  return s;
}

std::vector<SynchronousSlice> make_flow(const std::string& flow, const std::vector<Tick>& stamps) {
  std::vector<SynchronousSlice> out;
  for (Tick t : stamps) out.push_back(make_slice(flow, t));
  return out;
}

std::vector<Emission> run_engine(const std::vector<FlowDescriptor>& group, const PolicyParams& params,
                                 std::vector<Arrival> arrivals, std::vector<FlowStamps>* unplaced) {
  std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) { return a.at < b.at; });
  std::map<std::string, std::size_t> remaining;
  for (const auto& a : arrivals) ++remaining[a.flow];

  FusionEngine engine(kSite, group, params);
  VirtualTimeline timeline(arrivals.empty() ? 0 : arrivals.front().at);
  std::unordered_map<TimerId, std::uint64_t> ids;
  std::vector<Emission> out;

  auto apply = [&](const EngineEvent& ev) {
    auto step = engine.step(ev);
    for (const auto& r : step.timers) ids[timeline.schedule_timer(r.delay)] = r.timer_id;
    for (auto& e : step.emissions) out.push_back(std::move(e));
    if (unplaced != nullptr) {
      for (auto& u : step.unplaced) unplaced->push_back(std::move(u));
    }
  };
  auto fire = [&](const std::vector<TimerId>& due) {
    for (TimerId id : due) apply(TimerFired{ids.at(id)});
  };

  for (const auto& d : group) {
    if (!remaining.contains(d.flow_id)) apply(FlowEnded{d.flow_id});
  }
  std::size_t i = 0;
  while (i < arrivals.size() || timeline.next_deadline()) {
    auto deadline = timeline.next_deadline();
    if (i == arrivals.size() || (deadline && *deadline < arrivals[i].at)) {
      fire(timeline.advance(*deadline));
      continue;
    }
    Tick now = arrivals[i].at;
    auto due = timeline.advance(now);
    for (; i < arrivals.size() && arrivals[i].at == now; ++i) {
      const auto& a = arrivals[i];
      apply(SliceArrived{a.flow, make_slice(a.flow, a.stamp), a.at});
      if (--remaining[a.flow] == 0) apply(FlowEnded{a.flow});
    }
    while (!due.empty()) {
      fire(due);
      due = timeline.advance(now);
    }
  }
  return out;
}

std::vector<Tick> random_stamps(Rng& rng, std::size_t n, Tick max_gap) {
  std::vector<Tick> out;
  Tick t = rng.uniform(0, max_gap - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(t);
    t += rng.uniform(1, max_gap);
  }
  return out;
}

SynchronousSlice random_slice(Rng& rng) {
  SynchronousSlice s{rng.uniform(-1'000'000, 1'000'000), SiteId("site-" + std::to_string(rng.uniform(0, 9))), {}};
  auto flows = rng.uniform(1, 3);
  for (std::int64_t f = 0; f < flows; ++f) {
    std::string id = "flow" + std::to_string(rng.uniform(0, 99));
    auto& units = s.units[id];
    if (!units.empty()) continue;
    auto n = rng.uniform(1, 4);
    for (std::int64_t u = 1; u <= n; ++u) {
      InformationUnit unit{id, static_cast<SequenceNumber>(u), {}};
      auto samples = rng.uniform(1, 3);
      for (std::int64_t k = 0; k < samples; ++k) {
        std::vector<std::uint8_t> payload(static_cast<std::size_t>(rng.uniform(0, 40)));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.bits());
        unit.samples.push_back({std::move(payload)});
      }
      units.push_back(std::move(unit));
    }
  }
  return s;
}

std::optional<Tick> brute_first_slice(const std::vector<Tick>& flow, Tick t) {
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (flow[i] >= t && (i == 0 || flow[i - 1] < t)) return flow[i];
  }
  return std::nullopt;
}

std::optional<Tick> brute_first_occurrence(const std::vector<std::vector<Tick>>& group, Tick t) {
  std::optional<Tick> best;
  for (const auto& f : group) {
    for (Tick s : f) {
      if (s >= t && (!best || s < *best)) best = s;
    }
  }
  return best;
}

std::optional<Tick> brute_last_occurrence(const std::vector<std::vector<Tick>>& group, Tick t) {
  if (group.empty()) return std::nullopt;
  std::optional<Tick> best;
  for (const auto& f : group) {
    auto s = brute_first_slice(f, t);
    if (!s) return std::nullopt;
    if (!best || *s > *best) best = s;
  }
  return best;
}

}  // namespace korrontea::testing
