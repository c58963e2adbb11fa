#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "korrontea/flow_model.hpp"

namespace korrontea {

// Per-flow counter producing sequence numbers 1, 2, 3, ...
class LogicalClock {
 public:
  SequenceNumber next_sequence_number() { return ++counter_; }
  SequenceNumber counter() const noexcept { return counter_; }

 private:
  SequenceNumber counter_ = 0;
};

// Ticks per second of real time, as a rational num/den.
struct ClockRate {
  std::int64_t num = 1000;
  std::int64_t den = 1;
};

// Local physical clock of one site. Reads are strictly increasing: a read
// that would not move past the previous one returns previous + 1.
class LocalPhysicalClock {
 public:
  // Manually advanced clock (k = 1, one tick per abstract time unit).
  static LocalPhysicalClock simulated(SiteId site, Tick start = 0);
  // Ticks derived from std::chrono::steady_clock scaled by `rate`.
  static LocalPhysicalClock live(SiteId site, ClockRate rate);

  Tick now();
  // Simulated clocks only.
  void advance(Tick delta);

  const SiteId& site() const noexcept { return site_; }
  bool is_live() const noexcept { return live_; }
  ClockRate rate() const noexcept { return rate_; }

 private:
  LocalPhysicalClock(SiteId site, bool live, ClockRate rate, Tick start);

  Tick raw() const;

  SiteId site_;
  bool live_;
  ClockRate rate_;
  Tick current_;
  std::chrono::steady_clock::time_point origin_;
  std::optional<Tick> last_read_;
};

using TimerId = std::uint64_t;

// Deterministic timer service over virtual time. Timers due at the same
// tick fire in creation order.
class VirtualTimeline {
 public:
  explicit VirtualTimeline(Tick start = 0) : now_(start) {}

  Tick now() const noexcept { return now_; }

  TimerId schedule_timer(Tick delay);
  // Moves time to `to` and returns every timer due at or before it.
  std::vector<TimerId> advance(Tick to);

  std::optional<Tick> next_deadline() const;
  std::size_t pending() const noexcept { return queue_.size(); }

 private:
  struct Entry {
    Tick fire_at;
    TimerId id;
    bool operator>(const Entry& o) const {
      return fire_at != o.fire_at ? fire_at > o.fire_at : id > o.id;
    }
  };

  Tick now_;
  TimerId next_id_ = 1;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
};

}  // namespace korrontea
