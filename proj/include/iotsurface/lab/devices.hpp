#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "iotsurface/proto/kasa.hpp"
#include "iotsurface/proto/lifx.hpp"

namespace iotsurface::lab {

enum class DeviceKind { Kasa, Lifx, Wemo, EControl };

std::string_view to_string(DeviceKind k);
std::optional<DeviceKind> device_kind_from(std::string_view name);

struct DeviceState {
  bool relay_on = false;
  std::uint16_t power_level = 0;
  proto::LifxHsbk color{};
  std::string alias;
  proto::Bytes last_ir_code;
  bool operator==(const DeviceState&) const = default;
};

/// Port 0 means "pick an ephemeral port"; handles report the real one.
struct LabPorts {
  std::uint16_t kasa = 9999;
  std::uint16_t lifx = 56700;
  std::uint16_t wemo_http = 49153;
  std::uint16_t wemo_discovery = 1900;
  std::uint16_t econtrol = 8030;
};

struct LabConfig {
  std::string bind_address = "127.0.0.1";
  /// Where clients send discovery probes. Loopback cannot carry real
  /// broadcast or multicast, so this defaults to the bind address.
  std::string discovery_address = "127.0.0.1";
  LabPorts ports;
  std::uint8_t seed = proto::kKasaDefaultSeed;
  std::chrono::milliseconds timeout{1000};

  /// Throws std::invalid_argument on clashing non-zero ports or a
  /// non-positive timeout.
  void validate() const;
  /// Same config with every port set to 0, for tests running in parallel.
  LabConfig with_ephemeral_ports() const;
};

/// A running simulated device. Each device handles one message at a time
/// on its own thread; destroying the handle stops it.
class SimDevice {
 public:
  virtual ~SimDevice() = default;

  virtual DeviceKind kind() const = 0;
  /// The control port (UDP for Kasa/LIFX/e-Control, TCP for WeMo).
  virtual std::uint16_t port() const = 0;
  /// WeMo's SSDP responder; equals port() elsewhere.
  virtual std::uint16_t discovery_port() const { return port(); }
  virtual void stop() = 0;

  DeviceState state() const;
  void set_state(const DeviceState& s);

  std::uint64_t handled() const { return handled_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t pairing_events() const { return pairing_events_; }

 protected:
  mutable std::mutex mutex_;
  DeviceState state_;
  std::atomic<std::uint64_t> handled_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> pairing_events_{0};
};

std::unique_ptr<SimDevice> run_kasa_sim(const LabConfig& config, DeviceState initial = {});
std::unique_ptr<SimDevice> run_lifx_sim(const LabConfig& config, DeviceState initial = {});
std::unique_ptr<SimDevice> run_wemo_sim(const LabConfig& config, DeviceState initial = {});
std::unique_ptr<SimDevice> run_econtrol_sim(const LabConfig& config, DeviceState initial = {});
std::unique_ptr<SimDevice> run_sim(DeviceKind kind, const LabConfig& config, DeviceState initial = {});

/// Copy of `config` whose port for `device` is the one it actually bound.
LabConfig bound_config(const LabConfig& config, const SimDevice& device);

}  // namespace iotsurface::lab
