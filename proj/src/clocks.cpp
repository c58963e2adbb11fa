#include "korrontea/clocks.hpp"

#include <fmt/format.h>

namespace korrontea {

LocalPhysicalClock::LocalPhysicalClock(SiteId site, bool live, ClockRate rate, Tick start)
    : site_(std::move(site)),
      live_(live),
      rate_(rate),
      current_(start),
      origin_(std::chrono::steady_clock::now()) {
  if (rate_.num <= 0 || rate_.den <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "clock rate must be positive");
  }
}

LocalPhysicalClock LocalPhysicalClock::simulated(SiteId site, Tick start) {
  return LocalPhysicalClock(std::move(site), false, ClockRate{1, 1}, start);
}

LocalPhysicalClock LocalPhysicalClock::live(SiteId site, ClockRate rate) {
  return LocalPhysicalClock(std::move(site), true, rate, 0);
}

Tick LocalPhysicalClock::raw() const {
  if (!live_) return current_;
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::steady_clock::now() - origin_)
                .count();
  __int128 ticks = static_cast<__int128>(ns) * rate_.num / (static_cast<__int128>(rate_.den) * 1'000'000'000);
  return static_cast<Tick>(ticks);
}

Tick LocalPhysicalClock::now() {
  Tick value = raw();
  if (last_read_ && value <= *last_read_) value = *last_read_ + 1;
  last_read_ = value;
  return value;
}

void LocalPhysicalClock::advance(Tick delta) {
  if (live_) throw Error(ErrorCode::kInvalidArgument, "a live clock cannot be advanced");
  if (delta < 0) throw Error(ErrorCode::kTimeReversal, "clock cannot move backwards");
  current_ += delta;
}

TimerId VirtualTimeline::schedule_timer(Tick delay) {
  if (delay < 0) throw Error(ErrorCode::kInvalidArgument, "timer delay must be non-negative");
  TimerId id = next_id_++;
  queue_.push({now_ + delay, id});
  return id;
}

std::vector<TimerId> VirtualTimeline::advance(Tick to) {
  if (to < now_) {
    throw Error(ErrorCode::kTimeReversal, fmt::format("cannot advance from {} to {}", now_, to));
  }
  now_ = to;
  std::vector<TimerId> fired;
  while (!queue_.empty() && queue_.top().fire_at <= to) {
    fired.push_back(queue_.top().id);
    queue_.pop();
  }
  return fired;
}

std::optional<Tick> VirtualTimeline::next_deadline() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().fire_at;
}

}  // namespace korrontea
