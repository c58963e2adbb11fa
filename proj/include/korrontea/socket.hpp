#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "korrontea/scenario.hpp"
#include "korrontea/trace.hpp"

namespace korrontea::transport {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port"; throws kInvalidConfig.
  static Endpoint parse(std::string_view text);
  std::string str() const;
};

// Owning TCP socket.
class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Connection& operator=(Connection&& o) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  static Connection connect(const Endpoint& endpoint);

  void write_all(std::span<const std::uint8_t> bytes);
  // Blocks until `n` bytes are read; throws kChannelClosed on EOF.
  std::vector<std::uint8_t> read_exact(std::size_t n);
  // Whatever is available, at most `max`; empty on EOF.
  std::vector<std::uint8_t> read_some(std::size_t max);
  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Port 0 picks a free port.
  explicit Listener(const Endpoint& endpoint);
  Listener(Listener&&) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  std::uint16_t port() const noexcept { return port_; }
  Connection accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Session, after both peers exchanged one version byte:
//   'C' u32 len + JSON scenario configuration
//   'S' one slice frame (see wire.hpp)
//   'E' u16 len + flow id: the flow sent its last slice
//   'Q' end of session
struct ServeOptions {
  // Real microseconds per tick of the fusion site clock.
  std::int64_t tick_us = 1000;
};

// Accepts one feeder, runs its slices through a fusion engine on a live
// clock and returns the composed trace.
sim::Trace serve_once(Listener& listener, const ServeOptions& options = {});

// Sends the scenario of `config`: each slice leaves when the feeder clock
// reaches its simulated arrival tick.
void feed(const Endpoint& endpoint, const sim::ScenarioConfig& config, std::int64_t tick_us = 1000);

}  // namespace korrontea::transport
