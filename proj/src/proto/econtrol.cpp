#include "iotsurface/proto/econtrol.hpp"

#include <nlohmann/json.hpp>

namespace iotsurface::proto {

using nlohmann::json;

namespace {

json parse_object(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedCommand("e-Control message is not a JSON object");
  }
  return j;
}

std::string cmd_of(const json& j) {
  auto it = j.find("cmd");
  if (it == j.end() || !it->is_string()) throw MalformedCommand("e-Control message without cmd");
  return it->get<std::string>();
}

Bytes code_of(const json& j) {
  auto it = j.find("code");
  if (it == j.end() || !it->is_string()) throw MalformedCommand("IR message without code");
  Bytes code;
  try {
    code = from_hex(it->get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw MalformedCommand(std::string("IR code is not hex: ") + e.what());
  }
  if (code.empty()) throw MalformedCommand("empty IR code");
  return code;
}

}  // namespace

std::string econtrol_build(const EControlMessage& message) {
  json j;
  if (message.kind == EControlMessage::Kind::Discover) {
    j["cmd"] = "discover";
  } else {
    if (message.code.empty()) throw std::invalid_argument("IR code must not be empty");
    j["cmd"] = "ir_send";
    j["code"] = to_hex(message.code);
  }
  return j.dump();
}

EControlMessage econtrol_parse(std::string_view text) {
  auto j = parse_object(text);
  auto cmd = cmd_of(j);
  if (cmd == "discover" && j.size() == 1) return EControlMessage::discover();
  if (cmd == "ir_send" && j.size() == 2) return EControlMessage::ir(code_of(j));
  throw MalformedCommand("unexpected e-Control message: " + std::string(text.substr(0, 80)));
}

std::string econtrol_discover_ack(const EControlDevice& device) {
  json j;
  j["cmd"] = "discover_ack";
  j["device"] = {{"mac", device.mac}, {"name", device.name}, {"type", device.type}};
  return j.dump();
}

EControlDevice econtrol_parse_discover_ack(std::string_view text) {
  auto j = parse_object(text);
  if (cmd_of(j) != "discover_ack") throw MalformedCommand("not a discover ack");
  try {
    const auto& d = j.at("device");
    return {d.at("mac").get<std::string>(), d.at("name").get<std::string>(),
            d.at("type").get<std::string>()};
  } catch (const json::exception& e) {
    throw MalformedCommand(std::string("bad discover ack: ") + e.what());
  }
}

std::string econtrol_ir_ack(std::span<const std::uint8_t> code, int status) {
  json j;
  j["cmd"] = "ir_ack";
  j["code"] = to_hex(code);
  j["status"] = status;
  return j.dump();
}

Bytes econtrol_parse_ir_ack(std::string_view text) {
  auto j = parse_object(text);
  if (cmd_of(j) != "ir_ack") throw MalformedCommand("not an IR ack");
  auto status = j.find("status");
  if (status == j.end() || !status->is_number_integer()) throw MalformedCommand("IR ack without status");
  if (status->get<int>() != 0) throw MalformedCommand("device rejected IR code");
  return code_of(j);
}

bool econtrol_is_pairing_request(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  auto it = j.find("cmd");
  return it != j.end() && it->is_string() && it->get<std::string>() == "auth";
}

}  // namespace iotsurface::proto
