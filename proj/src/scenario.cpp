#include "korrontea/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "korrontea/clocks.hpp"
#include "korrontea/random.hpp"

namespace korrontea::sim {

using nlohmann::json;

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (hard_flows.empty() && soft_flows.empty()) fail("scenario has no flow");
  if (theta <= 0) fail("theta must be positive");
  if (alpha < 0) fail("alpha must be non-negative");
  if (rounds < 1) fail("rounds must be at least 1");
  if (site.empty()) fail("site must not be empty");
  for (const auto* list : {&hard_flows, &soft_flows}) {
    std::set<int> numbers;
    for (const auto& f : *list) {
      if (f.period < 1) fail(fmt::format("flow {}: period must be at least 1", f.number));
      if (f.max_delay < 0) fail(fmt::format("flow {}: max_delay must be non-negative", f.number));
      if (f.number < 0) fail(fmt::format("flow number {} is negative", f.number));
      if (!numbers.insert(f.number).second) fail(fmt::format("flow number {} used twice", f.number));
    }
  }
  for (const auto& f : hard_flows) {
    if (f.period > theta) {
      fail(fmt::format("hard flow F{} has period {} > theta {}", f.number, f.period, theta));
    }
  }
}

namespace {

FlowSpec flow_from_json(const json& j) {
  return FlowSpec{j.at("number").get<int>(), j.at("period").get<Tick>(), j.value("max_delay", Tick{0})};
}

json flow_to_json(const FlowSpec& f) {
  return json{{"number", f.number}, {"period", f.period}, {"max_delay", f.max_delay}};
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  ScenarioConfig c;
  try {
    json j = json::parse(json_text);
    c.theta = j.at("theta").get<Tick>();
    c.alpha = j.at("alpha").get<Tick>();
    c.rounds = j.at("rounds").get<std::int64_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.site = j.value("site", std::string("site0"));
    for (const auto& f : j.value("hard_flows", json::array())) c.hard_flows.push_back(flow_from_json(f));
    for (const auto& f : j.value("soft_flows", json::array())) c.soft_flows.push_back(flow_from_json(f));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ScenarioConfig& c) {
  json hard = json::array();
  json soft = json::array();
  for (const auto& f : c.hard_flows) hard.push_back(flow_to_json(f));
  for (const auto& f : c.soft_flows) soft.push_back(flow_to_json(f));
  json j{{"theta", c.theta}, {"alpha", c.alpha},     {"rounds", c.rounds},   {"seed", c.seed},
         {"site", c.site},   {"hard_flows", hard}, {"soft_flows", soft}};
  return j.dump(2) + "\n";
}

std::string flow_name(TemporalConstraint constraint, int number) {
  return fmt::format("{}{}", constraint == TemporalConstraint::kHard ? 'F' : 'f', number);
}

std::vector<FlowDescriptor> Scenario::descriptors() const {
  std::vector<FlowDescriptor> out;
  for (const auto& f : flows) out.push_back(f.descriptor);
  return out;
}

std::vector<CompleteFlow> Scenario::complete() const {
  std::vector<CompleteFlow> out;
  for (const auto& f : flows) {
    CompleteFlow c{f.descriptor, {}};
    for (const auto& s : f.slices) c.slices.push_back(s.slice);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

GeneratedFlow generate_flow(const ScenarioConfig& c, TemporalConstraint constraint, const FlowSpec& spec) {
  bool hard = constraint == TemporalConstraint::kHard;
  std::uint64_t key = (hard ? 0ULL : 1ULL << 32) | static_cast<std::uint32_t>(spec.number);
  std::uint64_t flow_seed = mix64(c.seed ^ mix64(key));
  Rng rng(flow_seed);

  std::string name = flow_name(constraint, spec.number);
  SiteId site(c.site);
  GeneratedFlow g{
      .descriptor = {.flow_id = name,
                     .source_id = fmt::format("source-{}", name),
                     .site = site,
                     .constraint = constraint,
                     .coding_format = "synthetic",
                     .nominal_period = hard ? std::optional<Tick>(spec.period) : std::nullopt},
      .spec = spec,
      .channel = {.base_delay = 0, .jitter_bound = spec.max_delay, .seed = mix64(flow_seed), .mode = {}},
      .slices = {}};

  Tick stamp = 0;
  std::optional<Tick> last_arrival;
  for (std::int64_t k = 0; k < c.rounds; ++k) {
    if (k > 0) stamp += hard ? spec.period : rng.uniform(1, spec.period);
    LogicalClock numbering;
    std::vector<InformationUnit> units;
    auto count = rng.uniform(1, 3);
    for (std::int64_t u = 0; u < count; ++u) {
      SequenceNumber n = numbering.next_sequence_number();
      std::string text = fmt::format("{}@{}#{}:", name, stamp, n);
      std::vector<std::uint8_t> payload(text.begin(), text.end());
      auto extra = rng.uniform(0, 8);
      for (std::int64_t b = 0; b < extra; ++b) payload.push_back(static_cast<std::uint8_t>(rng.bits()));
      units.push_back({name, n, {{std::move(payload)}}});
    }
    // Same delay model and FIFO clamp as transport::SimulatedChannel.
    Tick arrival = stamp + g.channel.raw_delay(static_cast<std::uint64_t>(k));
    if (last_arrival && arrival < *last_arrival) arrival = *last_arrival;
    last_arrival = arrival;
    g.slices.push_back({.slice = {.time_stamp = stamp, .site = site, .units = {{name, std::move(units)}}},
                        .send_tick = stamp,
                        .arrival_tick = arrival});
  }
  return g;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& c) {
  c.validate();
  Scenario s{.site = SiteId(c.site), .params = {.theta = c.theta, .alpha = c.alpha}, .flows = {}};
  for (const auto& f : c.hard_flows) s.flows.push_back(generate_flow(c, TemporalConstraint::kHard, f));
  for (const auto& f : c.soft_flows) s.flows.push_back(generate_flow(c, TemporalConstraint::kSoft, f));
  return s;
}

}  // namespace korrontea::sim
