#include <gtest/gtest.h>

#include "korrontea/simulator.hpp"
#include "korrontea/verify.hpp"

namespace korrontea::sim {
namespace {

ScenarioConfig hard_config() {
  ScenarioConfig c;
  c.theta = 15;
  c.alpha = 15;
  c.rounds = 60;
  c.seed = 21;
  c.hard_flows = {{0, 10, 15}, {1, 7, 15}, {2, 13, 15}};
  return c;
}

bool mentions(const VerifyReport& r, const std::string& text) {
  return std::any_of(r.findings.begin(), r.findings.end(),
                     [&](const auto& f) { return f.find(text) != std::string::npos; });
}

TEST(Verify, CleanHardRun) {
  auto c = hard_config();
  auto r = verify(run_simulation(c).trace, c);
  EXPECT_TRUE(r.ok()) << format_report(r);
  EXPECT_EQ(r.mismatches, 0u);
  EXPECT_EQ(r.records, r.expected_records);
}

TEST(Verify, ReportsSequenceGap) {
  auto c = hard_config();
  auto trace = run_simulation(c).trace;
  auto& f = trace.records[3].flows[0];
  std::vector<SequenceNumber> seqs;
  auto scenario = generate_scenario(c);
  // Number the units 1,3,4,... instead of 1,2,3,...
  std::size_t units = 0;
  for (Tick t : f.stamps) {
    for (const auto& g : scenario.flows) {
      if (g.descriptor.flow_id != f.flow) continue;
      for (const auto& s : g.slices) {
        if (s.slice.time_stamp == t) units += s.slice.unit_count();
      }
    }
  }
  for (std::size_t i = 0; i < units; ++i) seqs.push_back(static_cast<SequenceNumber>(i == 0 ? 1 : i + 2));
  f.sequence_numbers = seqs;
  auto r = verify(parse_trace(emit_trace(trace)), c);
  EXPECT_FALSE(r.ok());
  EXPECT_GE(r.violations, 1u);
  EXPECT_TRUE(mentions(r, "gap in sequence numbers of " + f.flow)) << format_report(r);
}

TEST(Verify, LateIncidentsWhenAlphaIsTooSmall) {
  ScenarioConfig c;
  c.theta = 10;
  c.alpha = 0;
  c.rounds = 200;
  c.seed = 8;
  c.hard_flows = {{0, 4, 10}};
  c.soft_flows = {{0, 4, 10}, {1, 3, 10}};
  auto r = verify(run_simulation(c).trace, c);
  EXPECT_GT(r.late_incidents, 0u);
  EXPECT_GT(r.mismatches, 0u);
  EXPECT_EQ(r.conservation_failures, 0u);
  EXPECT_EQ(r.violations, 0u) << format_report(r);
}

TEST(Verify, DetectsTamperedTraces) {
  auto c = hard_config();
  auto clean = run_simulation(c).trace;

  auto dropped = clean;
  dropped.records.erase(dropped.records.begin() + 5);
  auto r = verify(dropped, c);
  EXPECT_GT(r.conservation_failures, 0u);
  EXPECT_GT(r.mismatches, 0u);
  EXPECT_TRUE(mentions(r, "index"));

  auto moved = clean;
  moved.records[2].ts += 1;
  r = verify(moved, c);
  EXPECT_TRUE(mentions(r, "ts should be"));

  auto counted = clean;
  counted.records[1].flows[0].count += 1;
  r = verify(counted, c);
  EXPECT_TRUE(mentions(r, "count"));

  auto foreign = clean;
  foreign.records[1].flows[0].stamps.push_back(99999);
  r = verify(foreign, c);
  EXPECT_GT(r.conservation_failures, 0u);

  auto soft = clean;
  soft.records[0].t_max.reset();
  r = verify(soft, c);
  EXPECT_TRUE(mentions(r, "without TMAX"));

  auto missing = clean;
  missing.records[4].flows[1].stamps.clear();
  missing.records[4].flows[1].count = 0;
  r = verify(missing, c);
  EXPECT_TRUE(mentions(r, "no unit of"));

  auto early = clean;
  early.records[0].too_early.push_back({"F0", {0}});
  r = verify(early, c);
  EXPECT_TRUE(mentions(r, "fits the window"));
}

TEST(Verify, SoftWindowBound) {
  ScenarioConfig c;
  c.theta = 10;
  c.alpha = 10;
  c.rounds = 50;
  c.soft_flows = {{0, 6, 10}, {1, 9, 10}};
  auto trace = run_simulation(c).trace;
  EXPECT_TRUE(verify(trace, c).ok());
  // Move a stamp from the second record into the first, beyond ts + theta.
  auto& from = trace.records[1].flows[0];
  ASSERT_FALSE(from.stamps.empty());
  Tick t = from.stamps.back();
  from.stamps.pop_back();
  from.count -= 1;
  auto& to = trace.records[0].flows[0];
  to.stamps.push_back(t);
  to.count += 1;
  auto r = verify(trace, c);
  EXPECT_TRUE(mentions(r, "beyond the window bound")) << format_report(r);
}

}  // namespace
}  // namespace korrontea::sim
