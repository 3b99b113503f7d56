#pragma once

// LIFX LAN packets, lab layout. All multi-byte fields little-endian:
//
//   offset  size  field
//   0       2     size (whole packet)
//   2       2     protocol_flags
//   4       4     source
//   8       8     target
//   16      1     sequence
//   17      2     msg_type
//   19      ...   payload
//
// Payloads, in field order:
//   Get       (101)  -
//   SetColor  (102)  hue, saturation, brightness, kelvin (u16), duration (u32)
//   State     (107)  hue, saturation, brightness, kelvin (u16), power (u16)
//   SetPower  (117)  level (u16)

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace iotsurface::proto {

inline constexpr std::size_t kLifxHeaderSize = 19;
inline constexpr std::uint16_t kLifxDefaultFlags = 0x3400;

enum class LifxType : std::uint16_t {
  Get = 101,
  SetColor = 102,
  State = 107,
  SetPower = 117,
  SetAccessPoint = 305,  // provisioning; never produced by the codec
};

struct LifxHsbk {
  std::uint16_t hue = 0;
  std::uint16_t saturation = 0;
  std::uint16_t brightness = 0;
  std::uint16_t kelvin = 0;
  bool operator==(const LifxHsbk&) const = default;
};

struct LifxGet {
  bool operator==(const LifxGet&) const = default;
};
struct LifxSetPower {
  std::uint16_t level = 0;
  bool operator==(const LifxSetPower&) const = default;
};
struct LifxSetColor {
  LifxHsbk color;
  std::uint32_t duration = 0;
  bool operator==(const LifxSetColor&) const = default;
};
struct LifxState {
  LifxHsbk color;
  std::uint16_t power = 0;
  bool operator==(const LifxState&) const = default;
};

using LifxPayload = std::variant<LifxGet, LifxSetPower, LifxSetColor, LifxState>;

LifxType lifx_type_of(const LifxPayload& payload);
std::size_t lifx_payload_size(LifxType type);

struct LifxPacket {
  std::uint16_t size = 0;
  std::uint16_t protocol_flags = kLifxDefaultFlags;
  std::uint32_t source = 0;
  std::uint64_t target = 0;
  std::uint8_t sequence = 0;
  std::uint16_t msg_type = 0;
  LifxPayload payload;
  bool operator==(const LifxPacket&) const = default;
};

/// Fills size and msg_type from the payload.
LifxPacket make_lifx_packet(LifxPayload payload, std::uint32_t source = 0,
                            std::uint64_t target = 0, std::uint8_t sequence = 0);

struct LifxDecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncatedPacket : LifxDecodeError {
  using LifxDecodeError::LifxDecodeError;
};
struct SizeMismatch : LifxDecodeError {
  using LifxDecodeError::LifxDecodeError;
};
struct UnknownType : LifxDecodeError {
  using LifxDecodeError::LifxDecodeError;
};

/// Throws std::invalid_argument if size/msg_type disagree with the payload.
std::vector<std::uint8_t> lifx_encode(const LifxPacket& packet);
LifxPacket lifx_decode(std::span<const std::uint8_t> bytes);

/// msg_type of a raw datagram, if it carries at least a header.
std::optional<std::uint16_t> lifx_peek_type(std::span<const std::uint8_t> bytes);

}  // namespace iotsurface::proto
