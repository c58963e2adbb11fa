#include "korrontea/wire.hpp"

#include <cstring>
#include <limits>

#include <fmt/format.h>

namespace korrontea::transport {

namespace {

constexpr std::uint8_t kMagic[4] = {'K', 'R', 'R', 'T'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  void str16(const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "identifier longer than 65535 bytes");
    }
    u16(static_cast<std::uint16_t>(s.size()));
    bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

// Thrown internally when the buffer ends early; callers map it either to
// "need more bytes" or to kMalformedFrame.
struct Truncated {};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::string str16() {
    auto b = bytes(u16());
    return std::string(b.begin(), b.end());
  }

  void skip(std::size_t n) { bytes(n); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Truncated{};
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void read_header(Reader& r) {
  auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error(ErrorCode::kMalformedFrame, "bad magic");
  if (auto v = r.u8(); v != kWireVersion) {
    throw Error(ErrorCode::kVersionMismatch, fmt::format("frame version {}, expected {}", v, kWireVersion));
  }
}

// Walks a frame without materializing it.
void skip_frame(Reader& r) {
  read_header(r);
  r.skip(r.u16());
  r.i64();
  std::uint16_t flows = r.u16();
  for (std::uint16_t f = 0; f < flows; ++f) {
    r.skip(r.u16());
    std::uint32_t units = r.u32();
    for (std::uint32_t u = 0; u < units; ++u) {
      r.u32();
      std::uint32_t samples = r.u32();
      for (std::uint32_t s = 0; s < samples; ++s) r.skip(r.u32());
    }
  }
}

}  // namespace

std::vector<std::uint8_t> encode_slice(const SynchronousSlice& slice) {
  if (slice.units.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "too many flows in one slice");
  }
  Writer w;
  w.bytes(kMagic);
  w.u8(kWireVersion);
  w.str16(slice.site.str());
  w.i64(slice.time_stamp);
  w.u16(static_cast<std::uint16_t>(slice.units.size()));
  for (const auto& [flow_id, units] : slice.units) {
    w.str16(flow_id);
    w.u32(static_cast<std::uint32_t>(units.size()));
    for (const auto& u : units) {
      w.u32(u.sequence_number);
      w.u32(static_cast<std::uint32_t>(u.samples.size()));
      for (const auto& s : u.samples) {
        w.u32(static_cast<std::uint32_t>(s.payload.size()));
        w.bytes(s.payload);
      }
    }
  }
  return w.take();
}

SynchronousSlice decode_slice(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  try {
    read_header(r);
    std::string site = r.str16();
    if (site.empty()) throw Error(ErrorCode::kMalformedFrame, "empty site id");
    SynchronousSlice slice{.time_stamp = 0, .site = SiteId(std::move(site)), .units = {}};
    slice.time_stamp = r.i64();
    std::uint16_t flows = r.u16();
    for (std::uint16_t f = 0; f < flows; ++f) {
      std::string flow_id = r.str16();
      if (slice.units.contains(flow_id)) {
        throw Error(ErrorCode::kMalformedFrame, fmt::format("flow {} appears twice", flow_id));
      }
      auto& units = slice.units[flow_id];
      std::uint32_t count = r.u32();
      for (std::uint32_t u = 0; u < count; ++u) {
        InformationUnit unit{flow_id, r.u32(), {}};
        std::uint32_t samples = r.u32();
        for (std::uint32_t s = 0; s < samples; ++s) {
          auto payload = r.bytes(r.u32());
          unit.samples.push_back({{payload.begin(), payload.end()}});
        }
        units.push_back(std::move(unit));
      }
    }
    if (r.pos() != bytes.size()) {
      throw Error(ErrorCode::kMalformedFrame, fmt::format("{} trailing bytes", bytes.size() - r.pos()));
    }
    for (const auto& v : validate_slice(slice)) {
      if (v.kind == ViolationKind::kSequenceGap || v.kind == ViolationKind::kDuplicateSequence) {
        throw Error(ErrorCode::kSequenceGap, v.message);
      }
      throw Error(ErrorCode::kMalformedFrame, v.message);
    }
    return slice;
  } catch (const Truncated&) {
    throw Error(ErrorCode::kMalformedFrame, "frame is truncated");
  }
}

std::optional<std::size_t> complete_frame_size(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  try {
    skip_frame(r);
    return r.pos();
  } catch (const Truncated&) {
    return std::nullopt;
  }
}

}  // namespace korrontea::transport
