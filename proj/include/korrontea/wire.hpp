#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "korrontea/flow_model.hpp"

namespace korrontea::transport {

// Frame layout, little-endian:
//   "KRRT" | version u8 | site len u16 + bytes | time stamp i64 | flow count u16
//   per flow:   flow-id len u16 + bytes | unit count u32
//   per unit:   sequence number u32 | sample count u32
//   per sample: payload len u32 + bytes
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 4 + 1;

std::vector<std::uint8_t> encode_slice(const SynchronousSlice& slice);

// Decodes exactly one frame. Throws kMalformedFrame on truncation, bad magic
// or trailing bytes, kVersionMismatch on an unknown version and kSequenceGap
// when the decoded slice breaks the sequence-number rule.
SynchronousSlice decode_slice(std::span<const std::uint8_t> bytes);

// Size of the frame at the start of `bytes`, or nullopt if more bytes are
// needed to tell. Throws like decode_slice on a header that can never parse.
std::optional<std::size_t> complete_frame_size(std::span<const std::uint8_t> bytes);

}  // namespace korrontea::transport
