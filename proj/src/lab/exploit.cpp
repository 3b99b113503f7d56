#include "iotsurface/lab/exploit.hpp"

#include <atomic>
#include <functional>
#include <regex>

#include "httplib.h"
#include "iotsurface/lab/net.hpp"
#include "iotsurface/proto/econtrol.hpp"
#include "iotsurface/proto/wemo.hpp"

namespace iotsurface::lab {

namespace {

constexpr std::uint32_t kClientSource = 0x5EED'0001;

std::string peer_of(const Endpoint& e) { return e.host + ":" + std::to_string(e.port); }

/// Single request/response exchange over UDP, logged into `wire`.
proto::Bytes exchange_udp(const Endpoint& to, const proto::Bytes& payload, bool broadcast,
                          std::chrono::milliseconds timeout, std::vector<WireMessage>& wire,
                          const std::string& decoded, const std::function<std::string(const proto::Bytes&)>& decode_reply) {
  auto sock = UdpSocket::bind("0.0.0.0", 0);
  if (broadcast) sock.enable_broadcast();
  wire.push_back({"send", "udp", peer_of(to), payload, decoded});
  sock.send_to(payload, to);

  auto d = sock.receive(timeout);
  if (d) {
    wire.push_back({"recv", "udp", peer_of(d->from), d->data, decode_reply(d->data)});
    return d->data;
  }
  throw Timeout("no reply from " + peer_of(to) + " within " + std::to_string(timeout.count()) + " ms");
}

ActionResult kasa_action(Action action, const LabConfig& cfg) {
  ActionResult r{DeviceKind::Kasa, action, {}, {}};
  proto::AutokeyCipherConfig cipher{cfg.seed};
  proto::KasaCommand cmd;
  switch (action) {
    case Action::Discover:
    case Action::Status: cmd = proto::KasaCommand::get_sysinfo(); break;
    case Action::On: cmd = proto::KasaCommand::set_relay_state(true); break;
    case Action::Off: cmd = proto::KasaCommand::set_relay_state(false); break;
    default: throw std::invalid_argument("kasa does not support " + std::string(to_string(action)));
  }
  auto plain = proto::kasa_build(cmd);
  bool discover = action == Action::Discover;
  Endpoint to{discover ? cfg.discovery_address : cfg.bind_address, cfg.ports.kasa};
  auto decrypt = [&](const proto::Bytes& b) { return proto::to_text(proto::autokey_decrypt(b, cipher)); };
  auto reply = exchange_udp(to, proto::autokey_encrypt(proto::to_bytes(plain), cipher), discover, cfg.timeout,
                            r.wire, plain, decrypt);
  auto text = decrypt(reply);
  try {
    if (cmd.kind == proto::KasaCommand::Kind::GetSysinfo) {
      auto info = proto::kasa_parse_sysinfo_reply(text);
      r.response = {{"alias", info.alias},
                    {"model", info.model},
                    {"device_id", info.device_id},
                    {"relay_on", info.relay_on}};
    } else {
      r.response = {{"err_code", proto::kasa_parse_relay_ack(text)}};
    }
  } catch (const proto::MalformedCommand& e) {
    throw ProtocolError(e.what());
  }
  return r;
}

ActionResult lifx_action(Action action, const LabConfig& cfg, const ActionParams& params) {
  static std::atomic<std::uint8_t> sequence{0};
  ActionResult r{DeviceKind::Lifx, action, {}, {}};
  proto::LifxPayload payload;
  switch (action) {
    case Action::Discover:
    case Action::Status: payload = proto::LifxGet{}; break;
    case Action::On: payload = proto::LifxSetPower{0xFFFF}; break;
    case Action::Off: payload = proto::LifxSetPower{0}; break;
    case Action::SetColor: payload = proto::LifxSetColor{params.color, params.duration}; break;
    default: throw std::invalid_argument("lifx does not support " + std::string(to_string(action)));
  }
  auto packet = proto::make_lifx_packet(payload, kClientSource, 0, sequence++);
  bool discover = action == Action::Discover;
  Endpoint to{discover ? cfg.discovery_address : cfg.bind_address, cfg.ports.lifx};
  auto describe = [](const proto::Bytes& b) {
    auto t = proto::lifx_peek_type(b);
    return t ? "lifx type " + std::to_string(*t) : std::string("short datagram");
  };
  auto out = proto::lifx_encode(packet);
  auto reply = exchange_udp(to, out, discover, cfg.timeout, r.wire, describe(out), describe);
  proto::LifxPacket in;
  try {
    in = proto::lifx_decode(reply);
  } catch (const proto::LifxDecodeError& e) {
    throw ProtocolError(e.what());
  }
  const auto* state = std::get_if<proto::LifxState>(&in.payload);
  if (!state) throw ProtocolError("LIFX reply is not a State message");
  r.response = {{"power", state->power},
                {"hue", state->color.hue},
                {"saturation", state->color.saturation},
                {"brightness", state->color.brightness},
                {"kelvin", state->color.kelvin},
                {"target", in.target}};
  return r;
}

struct Url {
  std::string host;
  std::uint16_t port = 80;
  std::string path;
};

Url parse_location(const std::string& location) {
  static const std::regex kUrl(R"(^http://([^/:]+)(?::(\d{1,5}))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(location, m, kUrl)) throw ProtocolError("unsupported LOCATION " + location);
  Url u;
  u.host = m[1];
  if (m[2].matched) u.port = static_cast<std::uint16_t>(std::stoi(m[2]));
  u.path = m[3].matched ? std::string(m[3]) : "/";
  return u;
}

proto::SsdpResponse wemo_discover(const LabConfig& cfg, std::vector<WireMessage>& wire) {
  auto search = proto::ssdp_msearch(proto::kWemoControlleeUrn);
  auto reply = exchange_udp({cfg.discovery_address, cfg.ports.wemo_discovery}, proto::to_bytes(search), true,
                            cfg.timeout, wire, search, [](const proto::Bytes& b) { return proto::to_text(b); });
  try {
    return proto::ssdp_parse_response(proto::to_text(reply));
  } catch (const proto::MalformedResponse& e) {
    throw ProtocolError(e.what());
  }
}

ActionResult wemo_action(Action action, const LabConfig& cfg) {
  ActionResult r{DeviceKind::Wemo, action, {}, {}};
  proto::WemoSoapMessage msg;
  switch (action) {
    case Action::Discover: break;
    case Action::Status: msg.kind = proto::WemoSoapMessage::Kind::GetBinaryState; break;
    case Action::On: msg = {proto::WemoSoapMessage::Kind::SetBinaryState, 1}; break;
    case Action::Off: msg = {proto::WemoSoapMessage::Kind::SetBinaryState, 0}; break;
    default: throw std::invalid_argument("wemo does not support " + std::string(to_string(action)));
  }

  auto found = wemo_discover(cfg, r.wire);
  if (action == Action::Discover) {
    r.response = {{"location", found.location}, {"urn", found.urn}};
    return r;
  }

  auto url = parse_location(found.location);
  auto body = proto::wemo_build(msg);
  auto control_url = "http://" + url.host + ":" + std::to_string(url.port) + std::string(proto::kWemoControlPath);
  r.wire.push_back({"send", "http", control_url, proto::to_bytes(body), body});

  httplib::Client client(url.host, url.port);
  auto ms = cfg.timeout.count();
  client.set_connection_timeout(ms / 1000, (ms % 1000) * 1000);
  client.set_read_timeout(ms / 1000, (ms % 1000) * 1000);
  client.set_write_timeout(ms / 1000, (ms % 1000) * 1000);
  httplib::Headers headers{{"SOAPACTION", proto::wemo_soap_action(msg)}};
  auto res = client.Post(std::string(proto::kWemoControlPath), headers, body, "text/xml; charset=\"utf-8\"");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Timeout("no SOAP reply from " + control_url);
    }
    throw ProtocolError("SOAP request failed: " + httplib::to_string(err));
  }
  r.wire.push_back({"recv", "http", control_url, proto::to_bytes(res->body), res->body});
  if (res->status != 200) throw ProtocolError("SOAP fault, HTTP " + std::to_string(res->status));
  try {
    auto answer = proto::wemo_parse(res->body);
    if (answer.kind != proto::WemoSoapMessage::Kind::Response) throw ProtocolError("device did not answer with a response");
    r.response = {{"binary_state", answer.state}, {"location", found.location}};
  } catch (const proto::MalformedEnvelope& e) {
    throw ProtocolError(e.what());
  } catch (const proto::UnknownAction& e) {
    throw ProtocolError(e.what());
  }
  return r;
}

ActionResult econtrol_action(Action action, const LabConfig& cfg, const ActionParams& params) {
  ActionResult r{DeviceKind::EControl, action, {}, {}};
  proto::EControlMessage msg;
  switch (action) {
    case Action::Discover: msg = proto::EControlMessage::discover(); break;
    case Action::IrCode: msg = proto::EControlMessage::ir(params.ir_code); break;
    default: throw std::invalid_argument("econtrol does not support " + std::string(to_string(action)));
  }
  auto text = proto::econtrol_build(msg);
  bool discover = action == Action::Discover;
  Endpoint to{discover ? cfg.discovery_address : cfg.bind_address, cfg.ports.econtrol};
  auto reply = exchange_udp(to, proto::to_bytes(text), discover, cfg.timeout, r.wire, text,
                            [](const proto::Bytes& b) { return proto::to_text(b); });
  try {
    if (discover) {
      auto dev = proto::econtrol_parse_discover_ack(proto::to_text(reply));
      r.response = {{"mac", dev.mac}, {"name", dev.name}, {"type", dev.type}};
    } else {
      r.response = {{"code", proto::to_hex(proto::econtrol_parse_ir_ack(proto::to_text(reply)))}};
    }
  } catch (const proto::MalformedCommand& e) {
    throw ProtocolError(e.what());
  }
  return r;
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Discover: return "discover";
    case Action::Status: return "status";
    case Action::On: return "on";
    case Action::Off: return "off";
    case Action::SetColor: return "set_color";
    case Action::IrCode: return "ir_code";
  }
  return "?";
}

std::optional<Action> action_from(std::string_view name) {
  for (auto a : {Action::Discover, Action::Status, Action::On, Action::Off, Action::SetColor, Action::IrCode}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

ActionResult exploit_client(DeviceKind target, Action action, const LabConfig& config,
                            const ActionParams& params) {
  config.validate();
  switch (target) {
    case DeviceKind::Kasa: return kasa_action(action, config);
    case DeviceKind::Lifx: return lifx_action(action, config, params);
    case DeviceKind::Wemo: return wemo_action(action, config);
    case DeviceKind::EControl: return econtrol_action(action, config, params);
  }
  throw std::invalid_argument("unknown target");
}

std::optional<proto::Bytes> send_raw_udp(const std::string& host, std::uint16_t port,
                                         const proto::Bytes& bytes, std::chrono::milliseconds timeout) {
  auto sock = UdpSocket::bind("0.0.0.0", 0);
  sock.send_to(bytes, {host, port});
  auto d = sock.receive(timeout);
  if (!d) return std::nullopt;
  return d->data;
}

}  // namespace iotsurface::lab
