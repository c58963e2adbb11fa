#include "korrontea/simulator.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "korrontea/clocks.hpp"
#include "korrontea/verify.hpp"

namespace korrontea::sim {

namespace {

class Driver {
 public:
  explicit Driver(const Scenario& scenario)
      : scenario_(scenario),
        engine_(scenario.site, scenario.descriptors(), scenario.params),
        result_{.trace = {}, .composed = SynchronousFlowHistory(scenario.site, scenario.descriptors()),
                .emit_ticks = {}, .late_incidents = 0},
        next_send_(scenario.flows.size(), 0),
        delivered_(scenario.flows.size(), 0) {
    for (const auto& f : scenario.flows) channels_.emplace_back(f.channel);
  }

  SimulationResult run() {
    Tick start = 0;
    bool any = false;
    for (const auto& f : scenario_.flows) {
      if (!f.slices.empty()) {
        start = any ? std::min(start, f.slices.front().send_tick) : f.slices.front().send_tick;
        any = true;
      }
    }
    timeline_ = VirtualTimeline(start);
    for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
      if (scenario_.flows[i].slices.empty()) apply(FlowEnded{scenario_.flows[i].descriptor.flow_id});
    }
    while (auto t = next_event()) tick(*t);
    if (engine_.buffered() != 0 || !engine_.all_ended()) {
      throw Error(ErrorCode::kInvalidArgument, "simulation stopped with pending slices");
    }
    result_.composed = engine_.history();
    return std::move(result_);
  }

 private:
  std::optional<Tick> next_event() const {
    std::optional<Tick> t;
    auto consider = [&t](std::optional<Tick> v) {
      if (v && (!t || *v < *t)) t = v;
    };
    for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
      const auto& slices = scenario_.flows[i].slices;
      if (next_send_[i] < slices.size()) consider(slices[next_send_[i]].send_tick);
      consider(channels_[i].next_arrival());
    }
    consider(timeline_.next_deadline());
    return t;
  }

  void tick(Tick now) {
    std::vector<TimerId> due = timeline_.advance(now);

    for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
      const auto& flow = scenario_.flows[i];
      while (next_send_[i] < flow.slices.size() && flow.slices[next_send_[i]].send_tick == now) {
        const auto& s = flow.slices[next_send_[i]];
        Tick arrival = channels_[i].send(s.slice, now);
        if (arrival != s.arrival_tick) {
          throw Error(ErrorCode::kInvalidArgument,
                      fmt::format("flow {}: channel arrival {} differs from schedule {}",
                                  flow.descriptor.flow_id, arrival, s.arrival_tick));
        }
        if (++next_send_[i] == flow.slices.size()) channels_[i].close();
      }
    }

    for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
      const auto& id = scenario_.flows[i].descriptor.flow_id;
      for (auto& d : channels_[i].deliver(now)) {
        apply(SliceArrived{id, std::move(d.slice), d.arrival_tick});
        if (++delivered_[i] == scenario_.flows[i].slices.size()) apply(FlowEnded{id});
      }
    }

    // Timers due now, including zero-delay ones requested by the arrivals.
    while (!due.empty()) {
      for (TimerId id : due) {
        auto it = timer_map_.find(id);
        std::uint64_t engine_id = it->second;
        timer_map_.erase(it);
        apply(TimerFired{engine_id});
      }
      due = timeline_.advance(now);
    }
  }

  void apply(const EngineEvent& ev) {
    StepOutput out = engine_.step(ev);
    for (const auto& r : out.timers) timer_map_.emplace(timeline_.schedule_timer(r.delay), r.timer_id);
    for (const auto& e : out.emissions) {
      TraceRecord rec = record_from(e, result_.trace.records.size() + 1);
      for (const auto& l : rec.late) result_.late_incidents += l.stamps.size();
      result_.trace.records.push_back(std::move(rec));
      result_.emit_ticks.push_back(timeline_.now());
    }
    for (auto& u : out.unplaced) {
      result_.late_incidents += u.stamps.size();
      result_.trace.unplaced.push_back(std::move(u));
    }
  }

  const Scenario& scenario_;
  FusionEngine engine_;
  SimulationResult result_;
  VirtualTimeline timeline_;
  std::vector<transport::SimulatedChannel> channels_;
  std::vector<std::size_t> next_send_;
  std::vector<std::size_t> delivered_;
  std::unordered_map<TimerId, std::uint64_t> timer_map_;
};

}  // namespace

SimulationResult run_scenario(const Scenario& scenario) { return Driver(scenario).run(); }

SimulationResult run_simulation(const ScenarioConfig& config) {
  return run_scenario(generate_scenario(config));
}

std::vector<SweepRow> sweep_alpha(const ScenarioConfig& config, Tick from, Tick to) {
  if (from < 0 || to < from) throw Error(ErrorCode::kInvalidConfig, "alpha range must satisfy 0 <= from <= to");
  std::vector<SweepRow> rows;
  for (Tick alpha = from; alpha <= to; ++alpha) {
    ScenarioConfig c = config;
    c.alpha = alpha;
    Scenario scenario = generate_scenario(c);
    SimulationResult run = run_scenario(scenario);
    VerifyReport report = verify(run.trace, scenario);
    SweepRow row{.alpha = alpha, .slices = run.trace.records.size(), .mismatches = report.mismatches,
                 .late = report.late_incidents, .mean_latency = 0, .max_latency = 0};
    Tick total = 0;
    for (std::size_t i = 0; i < run.trace.records.size(); ++i) {
      Tick latency = run.emit_ticks[i] - run.trace.records[i].ts;
      total += latency;
      row.max_latency = std::max(row.max_latency, latency);
    }
    if (row.slices > 0) row.mean_latency = static_cast<double>(total) / static_cast<double>(row.slices);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,slices,mismatches,late,mean_latency,max_latency\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{:.3f},{}\n", r.alpha, r.slices, r.mismatches, r.late, r.mean_latency,
                       r.max_latency);
  }
  return out;
}

}  // namespace korrontea::sim
