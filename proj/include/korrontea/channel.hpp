#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "korrontea/flow_model.hpp"

namespace korrontea::transport {

enum class ChannelMode { kSimulated, kSocket };

struct ChannelConfig {
  Tick base_delay = 0;
  Tick jitter_bound = 0;
  std::uint64_t seed = 0;
  ChannelMode mode = ChannelMode::kSimulated;

  void validate() const;
  // Delay of the msg_index-th message before the FIFO clamp, in
  // [base_delay, base_delay + jitter_bound]. Pure function of (seed, index).
  Tick raw_delay(std::uint64_t msg_index) const;
};

struct Delivery {
  SynchronousSlice slice;
  Tick arrival_tick = 0;
};

// Point-to-point FIFO link in virtual time. Slices travel encoded; arrivals
// never overtake earlier sends.
class SimulatedChannel {
 public:
  explicit SimulatedChannel(ChannelConfig config);

  // Returns the arrival tick. Throws kChannelClosed after close().
  Tick send(const SynchronousSlice& slice, Tick send_tick);
  // Every message with arrival <= up_to, in send order.
  std::vector<Delivery> deliver(Tick up_to);

  // No more sends; messages in flight are still delivered.
  void close() { closed_ = true; }
  bool closed() const noexcept { return closed_; }
  std::optional<Tick> next_arrival() const;
  std::size_t in_flight() const noexcept { return queue_.size(); }
  const ChannelConfig& config() const noexcept { return config_; }

 private:
  struct Message {
    std::vector<std::uint8_t> frame;
    Tick arrival;
  };

  ChannelConfig config_;
  std::deque<Message> queue_;
  std::uint64_t sent_ = 0;
  std::optional<Tick> last_arrival_;
  std::optional<Tick> last_send_;
  bool closed_ = false;
};

}  // namespace korrontea::transport
