#include "iotsurface/lab/devices.hpp"

#include <set>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "iotsurface/lab/net.hpp"
#include "iotsurface/proto/econtrol.hpp"
#include "iotsurface/proto/wemo.hpp"

namespace iotsurface::lab {

using namespace std::chrono_literals;

namespace {

constexpr auto kPollInterval = 50ms;

/// UDP device: one thread, one datagram at a time.
class UdpSim : public SimDevice {
 public:
  std::uint16_t port() const override { return port_; }

  void stop() override {
    if (thread_.joinable()) {
      thread_.request_stop();
      thread_.join();
    }
  }

 protected:
  UdpSim(const LabConfig& config, std::uint16_t port, DeviceState initial)
      : socket_(UdpSocket::bind(config.bind_address, port)), config_(config) {
    state_ = std::move(initial);
    port_ = socket_.local_port();
  }

  void start() {
    thread_ = std::jthread([this](std::stop_token stop) {
      while (!stop.stop_requested()) {
        auto d = socket_.receive(kPollInterval);
        if (!d) continue;
        auto reply = handle(*d);
        if (reply) socket_.send_to(*reply, d->from);
      }
    });
  }

  /// Returns the reply datagram, if any.
  virtual std::optional<proto::Bytes> handle(const Datagram& d) = 0;

  UdpSocket socket_;
  LabConfig config_;
  std::uint16_t port_ = 0;
  std::jthread thread_;
};

class KasaSim final : public UdpSim {
 public:
  KasaSim(const LabConfig& config, DeviceState initial) : UdpSim(config, config.ports.kasa, std::move(initial)) {
    start();
  }
  ~KasaSim() override { stop(); }
  DeviceKind kind() const override { return DeviceKind::Kasa; }

 protected:
  std::optional<proto::Bytes> handle(const Datagram& d) override {
    proto::AutokeyCipherConfig cipher{config_.seed};
    auto text = proto::to_text(proto::autokey_decrypt(d.data, cipher));
    if (proto::kasa_is_pairing_request(text)) {
      ++pairing_events_;
      return std::nullopt;
    }
    proto::KasaCommand cmd;
    try {
      cmd = proto::kasa_parse(text);
    } catch (const proto::MalformedCommand&) {
      ++dropped_;
      return std::nullopt;
    }
    ++handled_;
    std::string reply;
    {
      std::lock_guard lock(mutex_);
      if (cmd.kind == proto::KasaCommand::Kind::GetSysinfo) {
        reply = proto::kasa_sysinfo_reply({state_.alias, "HS100(US)", "8006LAB0000000000000", state_.relay_on});
      } else {
        state_.relay_on = cmd.state == 1;
        reply = proto::kasa_relay_ack(0);
      }
    }
    return proto::autokey_encrypt(proto::to_bytes(reply), cipher);
  }
};

class LifxSim final : public UdpSim {
 public:
  static constexpr std::uint64_t kTarget = 0x0000'D073'D5AA'BB01ULL;

  LifxSim(const LabConfig& config, DeviceState initial) : UdpSim(config, config.ports.lifx, std::move(initial)) {
    start();
  }
  ~LifxSim() override { stop(); }
  DeviceKind kind() const override { return DeviceKind::Lifx; }

 protected:
  std::optional<proto::Bytes> handle(const Datagram& d) override {
    if (proto::lifx_peek_type(d.data) == static_cast<std::uint16_t>(proto::LifxType::SetAccessPoint)) {
      ++pairing_events_;
      return std::nullopt;
    }
    proto::LifxPacket in;
    try {
      in = proto::lifx_decode(d.data);
    } catch (const proto::LifxDecodeError&) {
      ++dropped_;
      return std::nullopt;
    }
    if (std::holds_alternative<proto::LifxState>(in.payload)) {
      ++dropped_;
      return std::nullopt;
    }
    ++handled_;
    proto::LifxState reply;
    {
      std::lock_guard lock(mutex_);
      if (const auto* p = std::get_if<proto::LifxSetPower>(&in.payload)) {
        state_.power_level = p->level;
        state_.relay_on = p->level != 0;
      } else if (const auto* c = std::get_if<proto::LifxSetColor>(&in.payload)) {
        state_.color = c->color;
      }
      reply.color = state_.color;
      reply.power = state_.power_level;
    }
    return proto::lifx_encode(proto::make_lifx_packet(reply, in.source, kTarget, in.sequence));
  }
};

class EControlSim final : public UdpSim {
 public:
  EControlSim(const LabConfig& config, DeviceState initial)
      : UdpSim(config, config.ports.econtrol, std::move(initial)) {
    start();
  }
  ~EControlSim() override { stop(); }
  DeviceKind kind() const override { return DeviceKind::EControl; }

 protected:
  std::optional<proto::Bytes> handle(const Datagram& d) override {
    auto text = proto::to_text(d.data);
    if (proto::econtrol_is_pairing_request(text)) {
      ++pairing_events_;
      return std::nullopt;
    }
    proto::EControlMessage msg;
    try {
      msg = proto::econtrol_parse(text);
    } catch (const proto::MalformedCommand&) {
      ++dropped_;
      return std::nullopt;
    }
    ++handled_;
    std::lock_guard lock(mutex_);
    if (msg.kind == proto::EControlMessage::Kind::Discover) {
      return proto::to_bytes(proto::econtrol_discover_ack({"34:ea:34:aa:bb:01", state_.alias, "RM mini 3"}));
    }
    state_.last_ir_code = msg.code;
    return proto::to_bytes(proto::econtrol_ir_ack(msg.code));
  }
};

/// SSDP responder on a loopback UDP socket plus a one-worker SOAP server.
class WemoSim final : public SimDevice {
 public:
  WemoSim(const LabConfig& config, DeviceState initial)
      : config_(config), discovery_(UdpSocket::bind(config.bind_address, config.ports.wemo_discovery)) {
    state_ = std::move(initial);
    discovery_port_ = discovery_.local_port();

    server_.new_task_queue = [] { return new httplib::ThreadPool(1); };
    server_.set_keep_alive_max_count(1);
    server_.Get(std::string(proto::kWemoSetupPath), [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(setup_xml(), "text/xml");
    });
    server_.Post(std::string(proto::kWemoControlPath),
                 [this](const httplib::Request& req, httplib::Response& res) { control(req, res); });
    server_.Post(std::string(proto::kWemoWifiSetupPath), [this](const httplib::Request&, httplib::Response& res) {
      ++pairing_events_;
      res.status = 200;
    });

    if (config.ports.wemo_http == 0) {
      int p = server_.bind_to_any_port(config.bind_address);
      if (p < 0) throw NetError("WeMo sim: cannot bind HTTP port");
      http_port_ = static_cast<std::uint16_t>(p);
    } else {
      if (!server_.bind_to_port(config.bind_address, config.ports.wemo_http)) {
        throw NetError("WeMo sim: cannot bind HTTP port " + std::to_string(config.ports.wemo_http));
      }
      http_port_ = config.ports.wemo_http;
    }
    http_thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();

    ssdp_thread_ = std::jthread([this](std::stop_token stop) {
      while (!stop.stop_requested()) {
        auto d = discovery_.receive(kPollInterval);
        if (!d) continue;
        if (auto reply = answer_search(*d)) discovery_.send_to(proto::to_bytes(*reply), d->from);
      }
    });
  }

  ~WemoSim() override { stop(); }

  DeviceKind kind() const override { return DeviceKind::Wemo; }
  std::uint16_t port() const override { return http_port_; }
  std::uint16_t discovery_port() const override { return discovery_port_; }

  void stop() override {
    if (ssdp_thread_.joinable()) {
      ssdp_thread_.request_stop();
      ssdp_thread_.join();
    }
    if (http_thread_.joinable()) {
      server_.stop();
      http_thread_.join();
    }
  }

 private:
  std::optional<std::string> answer_search(const Datagram& d) {
    std::string st;
    try {
      st = proto::ssdp_parse_msearch(proto::to_text(d.data));
    } catch (const proto::MalformedResponse&) {
      ++dropped_;
      return std::nullopt;
    }
    bool ours = st == "ssdp:all" || st == "upnp:rootdevice" || st == proto::kWemoControlleeUrn ||
                st == proto::kWemoBasicEventUrn;
    if (!ours) return std::nullopt;
    ++handled_;
    auto location = "http://" + config_.bind_address + ":" + std::to_string(http_port_) +
                    std::string(proto::kWemoSetupPath);
    return proto::ssdp_build_response({location, st}, "uuid:Socket-1_0-LAB0001");
  }

  void control(const httplib::Request& req, httplib::Response& res) {
    proto::WemoSoapMessage msg;
    try {
      msg = proto::wemo_parse(req.body);
      if (msg.kind == proto::WemoSoapMessage::Kind::Response) throw proto::UnknownAction("response sent to device");
    } catch (const std::exception& e) {
      ++dropped_;
      res.status = 500;
      res.set_content(std::string("<fault>") + e.what() + "</fault>", "text/xml");
      return;
    }
    ++handled_;
    proto::WemoSoapMessage reply{proto::WemoSoapMessage::Kind::Response, 0, msg.service_urn};
    {
      std::lock_guard lock(mutex_);
      if (msg.kind == proto::WemoSoapMessage::Kind::SetBinaryState) state_.relay_on = msg.state == 1;
      reply.state = state_.relay_on ? 1 : 0;
    }
    res.set_content(proto::wemo_build(reply), "text/xml; charset=\"utf-8\"");
  }

  std::string setup_xml() const {
    std::lock_guard lock(mutex_);
    return "<?xml version=\"1.0\"?>\n<root xmlns=\"urn:Belkin:device-1-0\"><device>"
           "<deviceType>" + std::string(proto::kWemoControlleeUrn) + "</deviceType>"
           "<friendlyName>" + state_.alias + "</friendlyName>"
           "<UDN>uuid:Socket-1_0-LAB0001</UDN><serviceList><service>"
           "<serviceType>" + std::string(proto::kWemoBasicEventUrn) + "</serviceType>"
           "<controlURL>" + std::string(proto::kWemoControlPath) + "</controlURL>"
           "</service></serviceList></device></root>\n";
  }

  LabConfig config_;
  UdpSocket discovery_;
  std::uint16_t discovery_port_ = 0;
  std::uint16_t http_port_ = 0;
  httplib::Server server_;
  std::thread http_thread_;
  std::jthread ssdp_thread_;
};

}  // namespace

std::string_view to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::Kasa: return "kasa";
    case DeviceKind::Lifx: return "lifx";
    case DeviceKind::Wemo: return "wemo";
    case DeviceKind::EControl: return "econtrol";
  }
  return "?";
}

std::optional<DeviceKind> device_kind_from(std::string_view name) {
  for (auto k : {DeviceKind::Kasa, DeviceKind::Lifx, DeviceKind::Wemo, DeviceKind::EControl}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void LabConfig::validate() const {
  if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
  std::set<std::uint16_t> seen;
  for (auto p : {ports.kasa, ports.lifx, ports.wemo_http, ports.wemo_discovery, ports.econtrol}) {
    if (p != 0 && !seen.insert(p).second) {
      throw std::invalid_argument("lab ports must be distinct (" + std::to_string(p) + " repeated)");
    }
  }
}

LabConfig LabConfig::with_ephemeral_ports() const {
  LabConfig c = *this;
  c.ports = {0, 0, 0, 0, 0};
  return c;
}

DeviceState SimDevice::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void SimDevice::set_state(const DeviceState& s) {
  std::lock_guard lock(mutex_);
  state_ = s;
}

std::unique_ptr<SimDevice> run_kasa_sim(const LabConfig& config, DeviceState initial) {
  config.validate();
  if (initial.alias.empty()) initial.alias = "Lab Plug";
  return std::make_unique<KasaSim>(config, std::move(initial));
}

std::unique_ptr<SimDevice> run_lifx_sim(const LabConfig& config, DeviceState initial) {
  config.validate();
  if (initial.alias.empty()) initial.alias = "Lab Bulb";
  return std::make_unique<LifxSim>(config, std::move(initial));
}

std::unique_ptr<SimDevice> run_wemo_sim(const LabConfig& config, DeviceState initial) {
  config.validate();
  if (initial.alias.empty()) initial.alias = "Lab Switch";
  return std::make_unique<WemoSim>(config, std::move(initial));
}

std::unique_ptr<SimDevice> run_econtrol_sim(const LabConfig& config, DeviceState initial) {
  config.validate();
  if (initial.alias.empty()) initial.alias = "Lab Remote";
  return std::make_unique<EControlSim>(config, std::move(initial));
}

std::unique_ptr<SimDevice> run_sim(DeviceKind kind, const LabConfig& config, DeviceState initial) {
  switch (kind) {
    case DeviceKind::Kasa: return run_kasa_sim(config, std::move(initial));
    case DeviceKind::Lifx: return run_lifx_sim(config, std::move(initial));
    case DeviceKind::Wemo: return run_wemo_sim(config, std::move(initial));
    case DeviceKind::EControl: return run_econtrol_sim(config, std::move(initial));
  }
  throw std::invalid_argument("unknown device kind");
}

LabConfig bound_config(const LabConfig& config, const SimDevice& device) {
  LabConfig c = config;
  switch (device.kind()) {
    case DeviceKind::Kasa: c.ports.kasa = device.port(); break;
    case DeviceKind::Lifx: c.ports.lifx = device.port(); break;
    case DeviceKind::Wemo:
      c.ports.wemo_http = device.port();
      c.ports.wemo_discovery = device.discovery_port();
      break;
    case DeviceKind::EControl: c.ports.econtrol = device.port(); break;
  }
  return c;
}

}  // namespace iotsurface::lab
