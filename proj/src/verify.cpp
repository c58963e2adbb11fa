#include "korrontea/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

namespace korrontea::sim {

namespace {

struct SourceFlow {
  const GeneratedFlow* flow = nullptr;
  std::map<Tick, const SynchronousSlice*> by_stamp;
  std::size_t seen = 0;
  std::size_t unplaced = 0;

  bool hard() const { return flow->descriptor.constraint == TemporalConstraint::kHard; }
  std::size_t remaining() const { return by_stamp.size() - std::min(by_stamp.size(), seen + unplaced); }
};

using StampsByFlow = std::map<std::string, std::vector<Tick>>;

StampsByFlow non_empty(const std::vector<FlowStamps>& v) {
  StampsByFlow out;
  for (const auto& f : v) {
    if (!f.stamps.empty()) out[f.flow_id] = f.stamps;
  }
  return out;
}

StampsByFlow non_empty(const std::vector<FlowUsage>& v) {
  StampsByFlow out;
  for (const auto& f : v) {
    if (!f.stamps.empty()) out[f.flow] = f.stamps;
  }
  return out;
}

class Checker {
 public:
  Checker(const Trace& trace, const Scenario& scenario) : trace_(trace), scenario_(scenario) {
    policy_ = scenario.policy();
    for (const auto& f : scenario.flows) {
      SourceFlow s{&f, {}, 0, 0};
      for (const auto& sl : f.slices) s.by_stamp.emplace(sl.slice.time_stamp, &sl.slice);
      flows_.emplace(f.descriptor.flow_id, std::move(s));
    }
  }

  VerifyReport run() {
    report_.records = trace_.records.size();
    for (const auto& u : trace_.unplaced) {
      report_.late_incidents += u.stamps.size();
      if (auto it = flows_.find(u.flow_id); it != flows_.end()) it->second.unplaced += u.stamps.size();
      for (Tick t : u.stamps) count_occurrence(u.flow_id, t, "UNPLACED");
    }
    std::optional<Tick> previous_ts;
    for (std::size_t i = 0; i < trace_.records.size(); ++i) {
      const auto& r = trace_.records[i];
      if (r.index != i + 1) violation(r, fmt::format("index {} where {} was expected", r.index, i + 1));
      if (previous_ts && r.ts <= *previous_ts) violation(r, fmt::format("ts does not follow {}", *previous_ts));
      previous_ts = r.ts;
      check_record(r);
      for (const auto& l : r.late) report_.late_incidents += l.stamps.size();
    }
    check_conservation();
    compare_with_oracle();
    return std::move(report_);
  }

 private:
  void violation(const TraceRecord& r, const std::string& what) {
    ++report_.violations;
    report_.findings.push_back(fmt::format("SLICE {}: {}", r.index, what));
  }

  void count_occurrence(const std::string& flow, Tick t, std::string_view where) {
    auto it = flows_.find(flow);
    if (it == flows_.end() || !it->second.by_stamp.contains(t)) {
      ++report_.conservation_failures;
      report_.findings.push_back(fmt::format("{}: {}{{{}}} is not a source slice", where, flow, t));
      return;
    }
    ++occurrences_[{flow, t}];
  }

  void check_record(const TraceRecord& r) {
    std::set<std::pair<std::string, Tick>> late;
    for (const auto& l : r.late) {
      for (Tick t : l.stamps) late.emplace(l.flow_id, t);
    }

    bool with_t_max = r.t_max.has_value();
    bool any_hard_used = false;
    std::optional<Tick> anchor_min;
    std::vector<ConsumedFlow> consumed;
    std::set<std::pair<std::string, Tick>> used;

    for (const auto& u : r.flows) {
      if (u.count != u.stamps.size()) {
        violation(r, fmt::format("{} lists {} stamps but count {}", u.flow, u.stamps.size(), u.count));
      }
      auto it = flows_.find(u.flow);
      if (it == flows_.end()) {
        violation(r, fmt::format("unknown flow {}", u.flow));
        continue;
      }
      SourceFlow& src = it->second;
      bool anchoring = policy_ != Policy::kMixed || (with_t_max ? src.hard() : !src.hard());
      ConsumedFlow c{u.flow, {}};
      for (Tick t : u.stamps) {
        count_occurrence(u.flow, t, fmt::format("SLICE {}", r.index));
        used.emplace(u.flow, t);
        auto s = src.by_stamp.find(t);
        if (s == src.by_stamp.end()) continue;
        c.slices.push_back(*s->second);
        if (src.hard()) any_hard_used = true;
        if (anchoring && !late.contains({u.flow, t})) anchor_min = std::min(anchor_min.value_or(t), t);
        Tick bound = with_t_max ? *r.t_max : r.ts + scenario_.params.theta;
        if (t > bound) violation(r, fmt::format("{}{{{}}} lies beyond the window bound {}", u.flow, t, bound));
      }
      if (!c.slices.empty()) consumed.push_back(std::move(c));
    }
    for (const auto& [flow, t] : late) {
      if (!used.contains({flow, t})) violation(r, fmt::format("late {}{{{}}} is not among the used slices", flow, t));
    }

    // Window kind.
    bool hard_remaining = false;
    for (const auto& [name, src] : flows_) hard_remaining = hard_remaining || (src.hard() && src.remaining() > 0);
    switch (policy_) {
      case Policy::kHard:
        if (!with_t_max) violation(r, "hard record without TMAX");
        break;
      case Policy::kSoft:
        if (with_t_max) violation(r, "soft record with TMAX");
        break;
      case Policy::kMixed:
        if (with_t_max && !any_hard_used) violation(r, "TMAX without any hard slice");
        if (!with_t_max && hard_remaining) violation(r, "soft window while hard slices remain");
        break;
    }

    // Output stamp: first occurrence over the anchoring slices.
    if (!anchor_min) {
      violation(r, "no anchoring slice");
    } else if (*anchor_min != r.ts) {
      violation(r, fmt::format("ts should be {}", *anchor_min));
    }

    // Hard windows take at least one unit of every flow that still has slices.
    if (with_t_max) {
      for (const auto& [name, src] : flows_) {
        bool anchoring = policy_ == Policy::kHard || src.hard();
        if (!anchoring || src.remaining() == 0) continue;
        auto u = std::find_if(r.flows.begin(), r.flows.end(), [&](const FlowUsage& f) { return f.flow == name; });
        if (u == r.flows.end() || u->stamps.empty()) violation(r, fmt::format("no unit of {}", name));
      }
    }

    for (const auto& e : r.too_early) {
      Tick bound = with_t_max ? *r.t_max : r.ts + scenario_.params.theta;
      for (Tick t : e.stamps) {
        if (t <= bound) violation(r, fmt::format("early {}{{{}}} fits the window", e.flow_id, t));
      }
    }

    if (!consumed.empty()) {
      SynchronousSlice slice = compose_result_slice(consumed, r.ts);
      for (const auto& u : r.flows) {
        if (!u.sequence_numbers) continue;
        auto it = slice.units.find(u.flow);
        if (it == slice.units.end() || it->second.size() != u.sequence_numbers->size()) {
          violation(r, fmt::format("{} lists {} sequence numbers for a different unit count", u.flow,
                                   u.sequence_numbers->size()));
          continue;
        }
        for (std::size_t k = 0; k < it->second.size(); ++k) it->second[k].sequence_number = (*u.sequence_numbers)[k];
      }
      for (const auto& v : validate_slice(slice)) violation(r, v.message);
    }

    for (const auto& u : r.flows) {
      if (auto it = flows_.find(u.flow); it != flows_.end()) it->second.seen += u.stamps.size();
    }
  }

  void check_conservation() {
    for (const auto& [name, src] : flows_) {
      for (const auto& [t, _] : src.by_stamp) {
        auto it = occurrences_.find({name, t});
        std::size_t n = it == occurrences_.end() ? 0 : it->second;
        if (n == 1) continue;
        ++report_.conservation_failures;
        report_.findings.push_back(fmt::format("{}{{{}}} appears {} times", name, t, n));
      }
    }
  }

  void compare_with_oracle() {
    auto complete = scenario_.complete();
    auto windows = oracle_windows(scenario_.site, complete, scenario_.params, policy_);
    report_.expected_records = windows.size();
    std::map<Tick, const OracleWindow*> expected;
    for (const auto& w : windows) expected.emplace(w.output_ts, &w);
    std::set<Tick> matched;
    for (const auto& r : trace_.records) {
      auto it = expected.find(r.ts);
      bool same = it != expected.end() && !matched.contains(r.ts) && it->second->t_max == r.t_max &&
                  non_empty(it->second->used) == non_empty(r.flows);
      if (it != expected.end()) matched.insert(r.ts);
      if (!same) {
        ++report_.mismatches;
        report_.findings.push_back(fmt::format("SLICE {} ts={} differs from the oracle", r.index, r.ts));
      }
    }
    for (const auto& [ts, w] : expected) {
      if (matched.contains(ts)) continue;
      ++report_.mismatches;
      report_.findings.push_back(fmt::format("oracle slice ts={} is missing", ts));
    }
  }

  const Trace& trace_;
  const Scenario& scenario_;
  Policy policy_;
  std::map<std::string, SourceFlow> flows_;
  std::map<std::pair<std::string, Tick>, std::size_t> occurrences_;
  VerifyReport report_;
};

}  // namespace

VerifyReport verify(const Trace& trace, const Scenario& scenario) { return Checker(trace, scenario).run(); }

VerifyReport verify(const Trace& trace, const ScenarioConfig& config) {
  return verify(trace, generate_scenario(config));
}

std::string format_report(const VerifyReport& report, std::size_t max_findings) {
  std::string out = fmt::format(
      "records={} expected={} mismatches={} late={} conservation_failures={} violations={}\n", report.records,
      report.expected_records, report.mismatches, report.late_incidents, report.conservation_failures,
      report.violations);
  for (std::size_t i = 0; i < report.findings.size() && i < max_findings; ++i) out += report.findings[i] + '\n';
  if (report.findings.size() > max_findings) {
    out += fmt::format("... {} more\n", report.findings.size() - max_findings);
  }
  out += report.ok() ? "OK\n" : "FAILED\n";
  return out;
}

}  // namespace korrontea::sim
