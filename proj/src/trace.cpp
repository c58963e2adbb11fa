#include "korrontea/trace.hpp"

#include <charconv>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace korrontea::sim {

TraceRecord record_from(const Emission& emission, std::size_t index) {
  TraceRecord r{.index = index, .ts = emission.slice.time_stamp, .t_max = emission.t_max,
                .flows = {}, .too_early = emission.too_early, .late = emission.late};
  for (const auto& used : emission.used) {
    FlowUsage u{used.flow_id, used.stamps.size(), used.stamps, std::nullopt};
    if (auto it = emission.slice.units.find(used.flow_id); it != emission.slice.units.end()) {
      std::vector<SequenceNumber> seqs;
      bool canonical = true;
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        seqs.push_back(it->second[i].sequence_number);
        canonical = canonical && seqs.back() == i + 1;
      }
      if (!canonical) u.sequence_numbers = std::move(seqs);
    }
    r.flows.push_back(std::move(u));
  }
  return r;
}

namespace {

std::string join(const std::vector<Tick>& v) { return fmt::format("{}", fmt::join(v, ",")); }

std::string stamps_token(const FlowStamps& f) { return fmt::format("{}{{{}}}", f.flow_id, join(f.stamps)); }

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number) : line_(line), number_(number) {}

  [[noreturn]] void fail(std::string_view what) const {
    throw Error(ErrorCode::kTraceSyntaxError, fmt::format("line {}: {}", number_, what));
  }

  std::vector<std::string_view> tokens() const {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      while (i < line_.size() && line_[i] == ' ') ++i;
      std::size_t j = i;
      while (j < line_.size() && line_[j] != ' ') ++j;
      if (j > i) out.push_back(line_.substr(i, j - i));
      i = j;
    }
    return out;
  }

  template <typename T>
  T integer(std::string_view s) const {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
      fail(fmt::format("'{}' is not an integer", s));
    }
    return v;
  }

  template <typename T>
  std::vector<T> list(std::string_view s, char open, char close) const {
    if (s.size() < 2 || s.front() != open || s.back() != close) fail(fmt::format("bad list '{}'", s));
    s = s.substr(1, s.size() - 2);
    std::vector<T> out;
    while (!s.empty()) {
      auto comma = s.find(',');
      out.push_back(integer<T>(s.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
      if (s.empty()) fail("trailing comma");
    }
    return out;
  }

  // name{a,b,c}
  FlowStamps named_stamps(std::string_view s) const {
    auto brace = s.find('{');
    if (brace == 0 || brace == std::string_view::npos) fail(fmt::format("bad flow stamps '{}'", s));
    return {std::string(s.substr(0, brace)), list<Tick>(s.substr(brace), '{', '}')};
  }

  // name:count{stamps}[seqs]
  FlowUsage usage(std::string_view s) const {
    auto colon = s.find(':');
    auto brace = s.find('{');
    auto close = s.find('}');
    if (colon == 0 || colon == std::string_view::npos || brace == std::string_view::npos ||
        close == std::string_view::npos || brace < colon) {
      fail(fmt::format("bad flow usage '{}'", s));
    }
    FlowUsage u;
    u.flow = std::string(s.substr(0, colon));
    u.count = integer<std::size_t>(s.substr(colon + 1, brace - colon - 1));
    u.stamps = list<Tick>(s.substr(brace, close - brace + 1), '{', '}');
    if (close + 1 < s.size()) u.sequence_numbers = list<SequenceNumber>(s.substr(close + 1), '[', ']');
    return u;
  }

 private:
  std::string_view line_;
  std::size_t number_;
};

}  // namespace

std::string emit_trace(const Trace& trace) {
  std::string out;
  for (const auto& r : trace.records) {
    out += fmt::format("SLICE {} ts={}", r.index, r.ts);
    if (r.t_max) out += fmt::format(" TMAX={}", *r.t_max);
    for (const auto& f : r.flows) {
      out += fmt::format(" {}:{}{{{}}}", f.flow, f.count, join(f.stamps));
      if (f.sequence_numbers) out += fmt::format("[{}]", fmt::join(*f.sequence_numbers, ","));
    }
    for (const auto& e : r.too_early) out += " early:" + stamps_token(e);
    for (const auto& l : r.late) out += " late:" + stamps_token(l);
    out += '\n';
  }
  for (const auto& u : trace.unplaced) out += "UNPLACED " + stamps_token(u) + '\n';
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t number = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineParser p(line, number);
    auto tok = p.tokens();
    if (tok.empty() || tok[0].front() == '#') continue;

    if (tok[0] == "UNPLACED") {
      if (tok.size() != 2) p.fail("UNPLACED takes one flow");
      trace.unplaced.push_back(p.named_stamps(tok[1]));
      continue;
    }
    if (tok[0] != "SLICE") p.fail(fmt::format("unknown record '{}'", tok[0]));
    if (tok.size() < 3 || !tok[2].starts_with("ts=")) p.fail("expected SLICE <n> ts=<t>");
    TraceRecord r;
    r.index = p.integer<std::size_t>(tok[1]);
    r.ts = p.integer<Tick>(tok[2].substr(3));
    std::size_t i = 3;
    if (i < tok.size() && tok[i].starts_with("TMAX=")) r.t_max = p.integer<Tick>(tok[i++].substr(5));
    for (; i < tok.size(); ++i) {
      if (tok[i].starts_with("early:")) {
        r.too_early.push_back(p.named_stamps(tok[i].substr(6)));
      } else if (tok[i].starts_with("late:")) {
        r.late.push_back(p.named_stamps(tok[i].substr(5)));
      } else {
        if (!r.too_early.empty() || !r.late.empty()) p.fail("flow usage after early/late entries");
        r.flows.push_back(p.usage(tok[i]));
      }
    }
    trace.records.push_back(std::move(r));
  }
  return trace;
}

}  // namespace korrontea::sim
