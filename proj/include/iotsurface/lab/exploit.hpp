#pragma once

// Rogue clients that drive the simulated devices the way the vendor apps
// do: discover on the local network, then send commands. None of them
// performs any pairing or authentication step.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iotsurface/lab/devices.hpp"

namespace iotsurface::lab {

enum class Action { Discover, Status, On, Off, SetColor, IrCode };

std::string_view to_string(Action a);
std::optional<Action> action_from(std::string_view name);

struct ActionParams {
  proto::LifxHsbk color{};
  std::uint32_t duration = 0;
  proto::Bytes ir_code;
};

/// One message on the wire, as the client saw it.
struct WireMessage {
  std::string direction;  // "send" or "recv"
  std::string transport;  // "udp" or "http"
  std::string peer;       // host:port or URL
  proto::Bytes bytes;
  std::string decoded;    // plaintext / JSON / SOAP as applicable
};

struct ActionResult {
  DeviceKind target = DeviceKind::Kasa;
  Action action = Action::Status;
  /// Parsed device answer, e.g. {"relay_on": false}.
  nlohmann::json response;
  std::vector<WireMessage> wire;
};

class Timeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument for actions the target does not support.
ActionResult exploit_client(DeviceKind target, Action action, const LabConfig& config,
                            const ActionParams& params = {});

/// Sends raw bytes to a UDP device and waits for one reply (used to replay
/// captured ciphertext). Returns nullopt on timeout.
std::optional<proto::Bytes> send_raw_udp(const std::string& host, std::uint16_t port,
                                         const proto::Bytes& bytes, std::chrono::milliseconds timeout);

}  // namespace iotsurface::lab
