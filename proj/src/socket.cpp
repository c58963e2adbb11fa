#include "korrontea/socket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "korrontea/clocks.hpp"
#include "korrontea/wire.hpp"

namespace korrontea::transport {

namespace {

[[noreturn]] void sys_fail(std::string_view what) {
  throw Error(ErrorCode::kIoError, fmt::format("{}: {}", what, std::strerror(errno)));
}

sockaddr_in resolve(const Endpoint& e) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(e.host.c_str(), nullptr, &hints, &res); rc != 0) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot resolve {}: {}", e.host, ::gai_strerror(rc)));
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(e.port);
  return addr;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_le(std::span<const std::uint8_t> b, std::size_t n) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void exchange_version(Connection& c, bool client) {
  std::uint8_t mine = kWireVersion;
  if (client) c.write_all(std::span(&mine, 1));
  auto theirs = c.read_exact(1);
  if (!client) c.write_all(std::span(&mine, 1));
  if (theirs[0] != kWireVersion) {
    throw Error(ErrorCode::kVersionMismatch, fmt::format("peer speaks version {}, expected {}", theirs[0], mine));
  }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidConfig, fmt::format("endpoint '{}' is not host:port", text));
  }
  unsigned long port = 0;
  for (char ch : text.substr(colon + 1)) {
    if (ch < '0' || ch > '9' || port > 65535) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("bad port in '{}'", text));
    }
    port = port * 10 + static_cast<unsigned long>(ch - '0');
  }
  if (port > 65535) throw Error(ErrorCode::kInvalidConfig, fmt::format("bad port in '{}'", text));
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string Endpoint::str() const { return fmt::format("{}:{}", host, port); }

Connection& Connection::operator=(Connection&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

Connection Connection::connect(const Endpoint& endpoint) {
  sockaddr_in addr = resolve(endpoint);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  Connection c(fd);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    sys_fail(fmt::format("connect {}", endpoint.str()));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return c;
}

void Connection::write_all(std::span<const std::uint8_t> bytes) {
  while (!bytes.empty()) {
    ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    bytes = bytes.subspan(static_cast<std::size_t>(n));
  }
}

std::vector<std::uint8_t> Connection::read_exact(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  std::size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd_, out.data() + got, n - got, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    if (r == 0) throw Error(ErrorCode::kChannelClosed, "peer closed the connection");
    got += static_cast<std::size_t>(r);
  }
  return out;
}

std::vector<std::uint8_t> Connection::read_some(std::size_t max) {
  std::vector<std::uint8_t> out(max);
  for (;;) {
    ssize_t r = ::recv(fd_, out.data(), max, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    out.resize(static_cast<std::size_t>(r));
    return out;
  }
}

Listener::Listener(const Endpoint& endpoint) {
  sockaddr_in addr = resolve(endpoint);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    sys_fail(fmt::format("bind {}", endpoint.str()));
  }
  if (::listen(fd_, 1) != 0) {
    ::close(fd_);
    sys_fail("listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::Listener(Listener&& o) noexcept : fd_(o.fd_), port_(o.port_) { o.fd_ = -1; }

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Connection Listener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return Connection(fd);
    if (errno != EINTR) sys_fail("accept");
  }
}

namespace {

// Fusion site side of a session.
class Session {
 public:
  Session(Connection conn, const ServeOptions& options)
      : conn_(std::move(conn)),
        clock_(LocalPhysicalClock::live(SiteId("fusion"), ClockRate{1'000'000, options.tick_us})) {}

  sim::Trace run() {
    exchange_version(conn_, false);
    while (!done_) {
      if (!parse_available()) receive();
      fire_due_timers();
    }
    if (!engine_ || !engine_->all_ended()) throw Error(ErrorCode::kChannelClosed, "session ended early");
    return std::move(trace_);
  }

 private:
  void receive() {
    int timeout = -1;
    if (engine_) {
      if (auto deadline = timeline_.next_deadline()) {
        Tick wait = std::max<Tick>(0, *deadline - clock_.now());
        timeout = static_cast<int>(std::min<Tick>(wait * clock_.rate().den / 1000 + 1, 1000));
      }
    }
    pollfd p{conn_.fd(), POLLIN, 0};
    int rc = ::poll(&p, 1, timeout);
    if (rc < 0 && errno != EINTR) sys_fail("poll");
    if (rc <= 0) return;
    auto bytes = conn_.read_some(64 * 1024);
    if (bytes.empty()) throw Error(ErrorCode::kChannelClosed, "feeder closed the connection mid-session");
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  }

  // Handles one complete message if the buffer holds one.
  bool parse_available() {
    if (buffer_.empty()) return false;
    std::span<const std::uint8_t> b(buffer_);
    std::size_t used = 0;
    switch (b[0]) {
      case 'C': {
        if (b.size() < 5) return false;
        std::size_t len = get_le(b.subspan(1), 4);
        if (b.size() < 5 + len) return false;
        if (engine_) throw Error(ErrorCode::kMalformedFrame, "configuration sent twice");
        auto cfg = sim::parse_config(std::string(b.begin() + 5, b.begin() + 5 + static_cast<std::ptrdiff_t>(len)));
        auto scenario = sim::generate_scenario(cfg);
        engine_.emplace(scenario.site, scenario.descriptors(), scenario.params);
        timeline_ = VirtualTimeline(clock_.now());
        used = 5 + len;
        break;
      }
      case 'S': {
        auto size = complete_frame_size(b.subspan(1));
        if (!size) return false;
        SynchronousSlice slice = decode_slice(b.subspan(1, *size));
        if (slice.units.size() != 1) throw Error(ErrorCode::kMalformedFrame, "a source slice carries one flow");
        std::string flow = slice.units.begin()->first;
        apply(SliceArrived{std::move(flow), std::move(slice), clock_.now()});
        used = 1 + *size;
        break;
      }
      case 'E': {
        if (b.size() < 3) return false;
        std::size_t len = get_le(b.subspan(1), 2);
        if (b.size() < 3 + len) return false;
        apply(FlowEnded{std::string(b.begin() + 3, b.begin() + 3 + static_cast<std::ptrdiff_t>(len))});
        used = 3 + len;
        break;
      }
      case 'Q':
        done_ = true;
        used = 1;
        break;
      default:
        throw Error(ErrorCode::kMalformedFrame, fmt::format("unknown message type {:#04x}", b[0]));
    }
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(used));
    return true;
  }

  void fire_due_timers() {
    if (!engine_) return;
    for (;;) {
      auto due = timeline_.advance(std::max(timeline_.now(), clock_.now()));
      if (due.empty()) return;
      for (TimerId id : due) {
        auto it = timer_map_.find(id);
        std::uint64_t engine_id = it->second;
        timer_map_.erase(it);
        apply(TimerFired{engine_id});
      }
    }
  }

  void apply(const EngineEvent& ev) {
    if (!engine_) throw Error(ErrorCode::kMalformedFrame, "slice before configuration");
    StepOutput out = engine_->step(ev);
    Tick now = std::max(timeline_.now(), clock_.now());
    timeline_.advance(now);  // timers due now are picked up by fire_due_timers
    for (const auto& r : out.timers) timer_map_.emplace(timeline_.schedule_timer(r.delay), r.timer_id);
    for (const auto& e : out.emissions) trace_.records.push_back(sim::record_from(e, trace_.records.size() + 1));
    for (auto& u : out.unplaced) trace_.unplaced.push_back(std::move(u));
  }

  Connection conn_;
  LocalPhysicalClock clock_;
  VirtualTimeline timeline_;
  std::optional<FusionEngine> engine_;
  std::unordered_map<TimerId, std::uint64_t> timer_map_;
  std::vector<std::uint8_t> buffer_;
  sim::Trace trace_;
  bool done_ = false;
};

}  // namespace

sim::Trace serve_once(Listener& listener, const ServeOptions& options) {
  if (options.tick_us <= 0) throw Error(ErrorCode::kInvalidConfig, "tick_us must be positive");
  return Session(listener.accept(), options).run();
}

void feed(const Endpoint& endpoint, const sim::ScenarioConfig& config, std::int64_t tick_us) {
  if (tick_us <= 0) throw Error(ErrorCode::kInvalidConfig, "tick_us must be positive");
  sim::Scenario scenario = sim::generate_scenario(config);

  struct Item {
    Tick at;
    std::size_t flow;
    std::size_t index;
  };
  std::vector<Item> items;
  for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
    for (std::size_t i = 0; i < scenario.flows[f].slices.size(); ++i) {
      items.push_back({scenario.flows[f].slices[i].arrival_tick, f, i});
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.at != b.at ? a.at < b.at : a.flow < b.flow;
  });

  Connection conn = Connection::connect(endpoint);
  exchange_version(conn, true);

  std::vector<std::uint8_t> msg{'C'};
  std::string json = sim::to_json(config);
  put_u32(msg, static_cast<std::uint32_t>(json.size()));
  msg.insert(msg.end(), json.begin(), json.end());
  conn.write_all(msg);

  auto end_message = [](const std::string& flow) {
    std::vector<std::uint8_t> m{'E'};
    put_u16(m, static_cast<std::uint16_t>(flow.size()));
    m.insert(m.end(), flow.begin(), flow.end());
    return m;
  };
  for (const auto& f : scenario.flows) {
    if (f.slices.empty()) conn.write_all(end_message(f.descriptor.flow_id));
  }

  Tick origin = items.empty() ? 0 : items.front().at;
  auto start = std::chrono::steady_clock::now();
  for (const auto& item : items) {
    std::this_thread::sleep_until(start + std::chrono::microseconds((item.at - origin) * tick_us));
    const auto& flow = scenario.flows[item.flow];
    std::vector<std::uint8_t> m{'S'};
    auto frame = encode_slice(flow.slices[item.index].slice);
    m.insert(m.end(), frame.begin(), frame.end());
    if (item.index + 1 == flow.slices.size()) {
      auto e = end_message(flow.descriptor.flow_id);
      m.insert(m.end(), e.begin(), e.end());
    }
    conn.write_all(m);
  }
  std::uint8_t quit = 'Q';
  conn.write_all(std::span(&quit, 1));
  // Wait for the server to close so that the session is complete on return.
  pollfd p{conn.fd(), POLLIN, 0};
  ::poll(&p, 1, 5000);
}

}  // namespace korrontea::transport
