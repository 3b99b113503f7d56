#pragma once

// TP-Link Kasa local protocol: JSON commands obscured by an autokey XOR
// stream whose seed is compiled into every app and plug.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iotsurface::proto {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view text);
std::string to_text(std::span<const std::uint8_t> bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);
/// Accepts optional whitespace between pairs and an optional 0x prefix.
Bytes from_hex(std::string_view hex);

inline constexpr std::uint8_t kKasaDefaultSeed = 0xAB;

struct AutokeyCipherConfig {
  std::uint8_t seed = kKasaDefaultSeed;
};

/// out[i] = in[i] ^ k[i], k[0] = seed, k[i+1] = out[i].
Bytes autokey_encrypt(std::span<const std::uint8_t> plaintext, AutokeyCipherConfig cfg = {});
Bytes autokey_decrypt(std::span<const std::uint8_t> ciphertext, AutokeyCipherConfig cfg = {});

class MalformedCommand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KasaCommand {
  enum class Kind { GetSysinfo, SetRelayState };
  Kind kind = Kind::GetSysinfo;
  int state = 0;  // SetRelayState only: 0 or 1

  static KasaCommand get_sysinfo() { return {Kind::GetSysinfo, 0}; }
  static KasaCommand set_relay_state(bool on) { return {Kind::SetRelayState, on ? 1 : 0}; }
  bool operator==(const KasaCommand&) const = default;
};

std::string kasa_build(const KasaCommand& command);
/// Accepts exactly the two command shapes; anything else is MalformedCommand.
KasaCommand kasa_parse(std::string_view text);

struct KasaSysinfo {
  std::string alias;
  std::string model;
  std::string device_id;
  bool relay_on = false;
  bool operator==(const KasaSysinfo&) const = default;
};

std::string kasa_sysinfo_reply(const KasaSysinfo& info);
KasaSysinfo kasa_parse_sysinfo_reply(std::string_view text);
std::string kasa_relay_ack(int err_code = 0);
/// Returns err_code.
int kasa_parse_relay_ack(std::string_view text);

/// Setup-time modules (cloud binding, Wi-Fi provisioning). The lab counts
/// them as pairing traffic.
bool kasa_is_pairing_request(std::string_view text);

}  // namespace iotsurface::proto
