#include "korrontea/channel.hpp"

#include <fmt/format.h>

#include "korrontea/random.hpp"
#include "korrontea/wire.hpp"

namespace korrontea::transport {

void ChannelConfig::validate() const {
  if (base_delay < 0 || jitter_bound < 0) {
    throw Error(ErrorCode::kInvalidArgument, "channel delays must be non-negative");
  }
}

Tick ChannelConfig::raw_delay(std::uint64_t msg_index) const {
  if (jitter_bound == 0) return base_delay;
  Rng rng(mix64(seed ^ mix64(msg_index)));
  return base_delay + rng.uniform(0, jitter_bound);
}

SimulatedChannel::SimulatedChannel(ChannelConfig config) : config_(config) { config_.validate(); }

Tick SimulatedChannel::send(const SynchronousSlice& slice, Tick send_tick) {
  if (closed_) throw Error(ErrorCode::kChannelClosed, "send on a closed channel");
  if (last_send_ && send_tick < *last_send_) {
    throw Error(ErrorCode::kTimeReversal, fmt::format("send at {} after {}", send_tick, *last_send_));
  }
  Tick arrival = send_tick + config_.raw_delay(sent_++);
  if (last_arrival_ && arrival < *last_arrival_) arrival = *last_arrival_;
  last_arrival_ = arrival;
  last_send_ = send_tick;
  queue_.push_back({encode_slice(slice), arrival});
  return arrival;
}

std::vector<Delivery> SimulatedChannel::deliver(Tick up_to) {
  std::vector<Delivery> out;
  while (!queue_.empty() && queue_.front().arrival <= up_to) {
    out.push_back({decode_slice(queue_.front().frame), queue_.front().arrival});
    queue_.pop_front();
  }
  return out;
}

std::optional<Tick> SimulatedChannel::next_arrival() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.front().arrival;
}

}  // namespace korrontea::transport
