#include <gtest/gtest.h>

#include "helpers.hpp"
#include "korrontea/oracle.hpp"

namespace korrontea {
namespace {

using testing::hard_flow;
using testing::kSite;
using testing::make_flow;
using testing::soft_flow;

TEST(Oracle, EmptyInputGivesEmptyFlow) {
  std::vector<CompleteFlow> flows{{hard_flow("A"), {}}, {hard_flow("B"), {}}};
  EXPECT_TRUE(oracle_windows(kSite, flows, {10, 0}, Policy::kHard).empty());
  EXPECT_TRUE(oracle_compose(kSite, flows, {10, 0}, Policy::kHard).empty());
}

TEST(Oracle, SoftGapsAboveThetaGiveOneSlicePerInput) {
  std::vector<CompleteFlow> flows{{soft_flow("s"), make_flow("s", {0, 11, 30, 100, 111})}};
  auto w = oracle_windows(kSite, flows, {10, 0}, Policy::kSoft);
  ASSERT_EQ(w.size(), 5u);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].used[0].stamps, std::vector<Tick>{flows[0].slices[i].time_stamp});
    EXPECT_FALSE(w[i].t_max);
  }
}

TEST(Oracle, HardRounds) {
  std::vector<CompleteFlow> flows{{hard_flow("A"), make_flow("A", {0, 10, 20})},
                                  {hard_flow("B"), make_flow("B", {0, 5, 10, 15})}};
  auto w = oracle_windows(kSite, flows, {10, 0}, Policy::kHard);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].t_max, 0);
  EXPECT_EQ(w[1].t_max, 10);
  EXPECT_EQ(w[1].output_ts, 5);
  EXPECT_EQ(w[1].used[1].stamps, (std::vector<Tick>{5, 10}));
  EXPECT_EQ(w[2].t_max, 20);
  EXPECT_EQ(w[2].output_ts, 15);
}

TEST(Oracle, MixedAnchorsOnHardFlows) {
  std::vector<CompleteFlow> flows{{hard_flow("H"), make_flow("H", {0, 10})}, {soft_flow("s"), make_flow("s", {2, 25})}};
  auto w = oracle_windows(kSite, flows, {10, 0}, Policy::kMixed);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].used[1].stamps, std::vector<Tick>{});
  EXPECT_EQ(w[1].used[1].stamps, std::vector<Tick>{2});
  EXPECT_EQ(w[1].output_ts, 10);
  // Soft remainder after the last hard slice.
  EXPECT_FALSE(w[2].t_max);
  EXPECT_EQ(w[2].output_ts, 25);
}

TEST(Oracle, RejectsWrongPolicyAndBadInput) {
  std::vector<CompleteFlow> flows{{hard_flow("A"), make_flow("A", {0, 10})}};
  EXPECT_THROW(oracle_windows(kSite, flows, {10, 0}, Policy::kSoft), Error);
  std::vector<CompleteFlow> unordered{{hard_flow("A"), make_flow("A", {10, 0})}};
  EXPECT_THROW(oracle_windows(kSite, unordered, {10, 0}, Policy::kHard), Error);
}

TEST(Oracle, SeparationRestoresPayloadOrder) {
  Rng rng(9);
  for (int round = 0; round < 50; ++round) {
    std::vector<CompleteFlow> flows;
    for (int f = 0; f < 3; ++f) {
      std::string name = "F" + std::to_string(f);
      CompleteFlow c{hard_flow(name), {}};
      for (Tick t : testing::random_stamps(rng, 20, 10)) {
        c.slices.push_back(testing::make_slice(name, t, static_cast<int>(rng.uniform(1, 3))));
      }
      flows.push_back(std::move(c));
    }
    auto composed = oracle_compose(kSite, flows, {10, 0}, Policy::kHard);
    auto parts = separate(composed);
    ASSERT_EQ(parts.size(), flows.size());
    for (std::size_t f = 0; f < flows.size(); ++f) {
      std::vector<Sample> original;
      std::vector<Sample> restored;
      for (const auto& s : flows[f].slices) {
        for (const auto& u : s.units.begin()->second) original.insert(original.end(), u.samples.begin(), u.samples.end());
      }
      for (const auto& s : parts[f].slices()) {
        for (const auto& u : s.units.begin()->second) restored.insert(restored.end(), u.samples.begin(), u.samples.end());
      }
      EXPECT_EQ(original, restored);
    }
  }
}

}  // namespace
}  // namespace korrontea
