#include "iotsurface/proto/kasa.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

namespace iotsurface::proto {

using nlohmann::json;

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

std::string to_text(std::span<const std::uint8_t> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  int hi = -1;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':') {
      if (hi >= 0) throw std::invalid_argument("hex pair split by separator");
      continue;
    }
    int v = nibble(c);
    if (v < 0) throw std::invalid_argument(std::string("bad hex digit '") + c + "'");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi * 16 + v));
      hi = -1;
    }
  }
  if (hi >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

Bytes autokey_encrypt(std::span<const std::uint8_t> plaintext, AutokeyCipherConfig cfg) {
  Bytes out;
  out.reserve(plaintext.size());
  std::uint8_t key = cfg.seed;
  for (auto b : plaintext) {
    key = static_cast<std::uint8_t>(b ^ key);
    out.push_back(key);
  }
  return out;
}

Bytes autokey_decrypt(std::span<const std::uint8_t> ciphertext, AutokeyCipherConfig cfg) {
  Bytes out;
  out.reserve(ciphertext.size());
  std::uint8_t key = cfg.seed;
  for (auto c : ciphertext) {
    out.push_back(static_cast<std::uint8_t>(c ^ key));
    key = c;
  }
  return out;
}

std::string kasa_build(const KasaCommand& command) {
  json j;
  if (command.kind == KasaCommand::Kind::GetSysinfo) {
    j["system"]["get_sysinfo"] = json::object();
  } else {
    if (command.state != 0 && command.state != 1) {
      throw std::invalid_argument("relay state must be 0 or 1");
    }
    j["system"]["set_relay_state"]["state"] = command.state;
  }
  return j.dump();
}

KasaCommand kasa_parse(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  auto bad = [&]() -> MalformedCommand {
    return MalformedCommand("not a Kasa command: " + std::string(text.substr(0, 80)));
  };
  if (j.is_discarded() || !j.is_object() || j.size() != 1 || !j.contains("system")) throw bad();
  const auto& sys = j["system"];
  if (!sys.is_object() || sys.size() != 1) throw bad();

  if (auto it = sys.find("get_sysinfo"); it != sys.end()) {
    if (!it->is_object() || !it->empty()) throw bad();
    return KasaCommand::get_sysinfo();
  }
  if (auto it = sys.find("set_relay_state"); it != sys.end()) {
    if (!it->is_object() || it->size() != 1 || !it->contains("state")) throw bad();
    const auto& state = (*it)["state"];
    if (!state.is_number_integer()) throw bad();
    auto v = state.get<std::int64_t>();
    if (v != 0 && v != 1) throw bad();
    return KasaCommand::set_relay_state(v == 1);
  }
  throw bad();
}

std::string kasa_sysinfo_reply(const KasaSysinfo& info) {
  json j;
  auto& s = j["system"]["get_sysinfo"];
  s["alias"] = info.alias;
  s["model"] = info.model;
  s["deviceId"] = info.device_id;
  s["relay_state"] = info.relay_on ? 1 : 0;
  s["err_code"] = 0;
  return j.dump();
}

KasaSysinfo kasa_parse_sysinfo_reply(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedCommand("sysinfo reply is not JSON");
  try {
    const auto& s = j.at("system").at("get_sysinfo");
    KasaSysinfo info;
    info.alias = s.at("alias").get<std::string>();
    info.model = s.at("model").get<std::string>();
    info.device_id = s.at("deviceId").get<std::string>();
    info.relay_on = s.at("relay_state").get<int>() != 0;
    return info;
  } catch (const json::exception& e) {
    throw MalformedCommand(std::string("bad sysinfo reply: ") + e.what());
  }
}

std::string kasa_relay_ack(int err_code) {
  json j;
  j["system"]["set_relay_state"]["err_code"] = err_code;
  return j.dump();
}

int kasa_parse_relay_ack(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedCommand("relay ack is not JSON");
  try {
    return j.at("system").at("set_relay_state").at("err_code").get<int>();
  } catch (const json::exception& e) {
    throw MalformedCommand(std::string("bad relay ack: ") + e.what());
  }
}

bool kasa_is_pairing_request(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  return j.contains("netif") || j.contains("cnCloud");
}

}  // namespace iotsurface::proto
