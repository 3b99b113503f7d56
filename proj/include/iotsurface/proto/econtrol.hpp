#pragma once

// Broadlink e-Control local messages (lab schema):
//
//   probe      {"cmd":"discover"}
//   probe ack  {"cmd":"discover_ack","device":{"mac":..,"name":..,"type":..}}
//   IR send    {"cmd":"ir_send","code":"<hex>"}
//   IR ack     {"cmd":"ir_ack","code":"<hex>","status":0}
//   auth       {"cmd":"auth",...}   (pairing; the lab only counts it)

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iotsurface/proto/kasa.hpp"

namespace iotsurface::proto {

struct EControlMessage {
  enum class Kind { Discover, IrCommand };
  Kind kind = Kind::Discover;
  Bytes code;  // IrCommand only, non-empty

  static EControlMessage discover() { return {Kind::Discover, {}}; }
  static EControlMessage ir(Bytes code) { return {Kind::IrCommand, std::move(code)}; }
  bool operator==(const EControlMessage&) const = default;
};

std::string econtrol_build(const EControlMessage& message);
/// MalformedCommand on anything but the two request shapes.
EControlMessage econtrol_parse(std::string_view text);

struct EControlDevice {
  std::string mac;
  std::string name;
  std::string type;
  bool operator==(const EControlDevice&) const = default;
};

std::string econtrol_discover_ack(const EControlDevice& device);
EControlDevice econtrol_parse_discover_ack(std::string_view text);
std::string econtrol_ir_ack(std::span<const std::uint8_t> code, int status = 0);
/// Returns the echoed code; MalformedCommand if status is non-zero or shape is wrong.
Bytes econtrol_parse_ir_ack(std::string_view text);

bool econtrol_is_pairing_request(std::string_view text);

}  // namespace iotsurface::proto
