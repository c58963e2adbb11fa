#include <gtest/gtest.h>

#include "korrontea/simulator.hpp"

namespace korrontea::sim {
namespace {

TEST(Trace, EmitsHardRecord) {
  Trace t;
  t.records.push_back({.index = 1, .ts = 0, .t_max = 1,
                       .flows = {{"F0", 1, {0}, std::nullopt}, {"F1", 1, {1}, std::nullopt}},
                       .too_early = {}, .late = {}});
  EXPECT_EQ(emit_trace(t), "SLICE 1 ts=0 TMAX=1 F0:1{0} F1:1{1}\n");
}

TEST(Trace, SoftRecordHasNoTmax) {
  Trace t;
  t.records.push_back({.index = 1, .ts = 3, .t_max = std::nullopt,
                       .flows = {{"f0", 2, {3, 9}, std::nullopt}, {"f1", 0, {}, std::nullopt}},
                       .too_early = {{"f1", {20}}}, .late = {}});
  t.unplaced.push_back({"f0", {1}});
  auto text = emit_trace(t);
  EXPECT_EQ(text, "SLICE 1 ts=3 f0:2{3,9} f1:0{} early:f1{20}\nUNPLACED f0{1}\n");
  EXPECT_EQ(text.find("TMAX"), std::string::npos);
  EXPECT_EQ(parse_trace(text), t);
}

TEST(Trace, RoundTripsSimulatedRuns) {
  ScenarioConfig c;
  c.theta = 10;
  c.alpha = 2;
  c.rounds = 80;
  c.seed = 5;
  c.hard_flows = {{0, 4, 8}};
  c.soft_flows = {{0, 4, 8}, {1, 3, 8}};
  auto r = run_simulation(c);
  EXPECT_GT(r.late_incidents, 0u);  // exercises late and unplaced tokens
  EXPECT_EQ(parse_trace(emit_trace(r.trace)), r.trace);
}

TEST(Trace, SequenceOverrideRoundTrips) {
  Trace t;
  t.records.push_back({.index = 1, .ts = 0, .t_max = 0,
                       .flows = {{"F0", 1, {0}, std::vector<SequenceNumber>{1, 3}}},
                       .too_early = {}, .late = {{"F0", {0}}}});
  auto text = emit_trace(t);
  EXPECT_EQ(text, "SLICE 1 ts=0 TMAX=0 F0:1{0}[1,3] late:F0{0}\n");
  EXPECT_EQ(parse_trace(text), t);
}

TEST(Trace, CommentsAndBlankLinesAreSkipped) {
  auto t = parse_trace("# header\n\nSLICE 1 ts=0 TMAX=0 F0:1{0}\r\n");
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].flows[0].flow, "F0");
}

TEST(Trace, SyntaxErrorsNameTheLine) {
  for (const char* bad : {"SLICE 1 ts=0 TMAX=0 F0:1{0}\nSLICE x ts=1\n", "SLICE 1 ts=0 TMAX=0 F0:1{0}\nFOO\n",
                          "SLICE 1 ts=0 TMAX=0 F0:1{0}\nSLICE 2 ts=5 F0:1{5,}\n",
                          "SLICE 1 ts=0 TMAX=0 F0:1{0}\nSLICE 2\n",
                          "SLICE 1 ts=0 TMAX=0 F0:1{0}\nUNPLACED f0\n",
                          "SLICE 1 ts=0 TMAX=0 F0:1{0}\nSLICE 2 ts=1 early:f0{1} F0:1{1}\n"}) {
    try {
      parse_trace(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTraceSyntaxError);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

}  // namespace
}  // namespace korrontea::sim
