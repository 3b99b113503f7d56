#include "iotsurface/proto/wemo.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>
#include <vector>

namespace iotsurface::proto {

namespace {

constexpr std::string_view kCrlf = "\r\n";

void require_urn(std::string_view urn) {
  if (!urn.starts_with("urn:")) {
    throw std::invalid_argument("service name must start with urn: (got '" + std::string(urn) + "')");
  }
}

std::string_view action_name(WemoSoapMessage::Kind kind) {
  switch (kind) {
    case WemoSoapMessage::Kind::SetBinaryState: return "SetBinaryState";
    case WemoSoapMessage::Kind::GetBinaryState: return "GetBinaryState";
    case WemoSoapMessage::Kind::Response: return "GetBinaryStateResponse";
  }
  return "";
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct HttpLike {
  std::string start_line;
  std::vector<std::pair<std::string, std::string>> headers;  // names lowercased

  std::optional<std::string> header(std::string_view name) const {
    for (const auto& [k, v] : headers) {
      if (k == name) return v;
    }
    return std::nullopt;
  }
};

HttpLike split_http(std::string_view text) {
  HttpLike msg;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    if (first) {
      msg.start_line = std::string(line);
      first = false;
      continue;
    }
    if (line.empty()) break;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    auto value = line.substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
    msg.headers.emplace_back(lower(line.substr(0, colon)), std::string(value));
  }
  return msg;
}

}  // namespace

std::string wemo_build(const WemoSoapMessage& message) {
  require_urn(message.service_urn);
  if (message.kind == WemoSoapMessage::Kind::SetBinaryState && message.state != 0 && message.state != 1) {
    throw std::invalid_argument("SetBinaryState takes 0 or 1");
  }
  if (message.state < 0) throw std::invalid_argument("BinaryState must be non-negative");
  auto action = action_name(message.kind);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      << "<s:Envelope xmlns:s=\"http://schemas.xmlsoap.org/soap/envelope/\" "
         "s:encodingStyle=\"http://schemas.xmlsoap.org/soap/encoding/\">\n"
      << "<s:Body>\n"
      << "<u:" << action << " xmlns:u=\"" << message.service_urn << "\">";
  if (message.kind != WemoSoapMessage::Kind::GetBinaryState) {
    out << "\n<BinaryState>" << message.state << "</BinaryState>\n";
  }
  out << "</u:" << action << ">\n"
      << "</s:Body>\n"
      << "</s:Envelope>\n";
  return out.str();
}

WemoSoapMessage wemo_parse(std::string_view envelope) {
  std::string text(envelope);
  static const std::regex kEnvelope(R"(<(?:[A-Za-z_][\w.-]*:)?Envelope\b[^>]*>)");
  static const std::regex kBody(R"(<((?:[A-Za-z_][\w.-]*:)?)Body\b[^>]*>)");
  static const std::regex kAction(R"(^\s*<((?:[A-Za-z_][\w.-]*:)?)([A-Za-z_][\w.-]*)\b([^>]*)>)");
  static const std::regex kXmlns(R"(xmlns(?::[\w.-]+)?\s*=\s*"([^"]*)\")");
  static const std::regex kBinaryState(R"(<BinaryState>\s*(\d{1,9})[^<\d]*</BinaryState>)");

  std::smatch m;
  if (!std::regex_search(text, m, kEnvelope)) throw MalformedEnvelope("no SOAP Envelope element");
  std::smatch body;
  if (!std::regex_search(text, body, kBody)) throw MalformedEnvelope("no SOAP Body element");
  std::string body_prefix = body[1];
  auto body_close = text.find("</" + body_prefix + "Body>");
  if (body_close == std::string::npos) throw MalformedEnvelope("unterminated SOAP Body");
  auto inner_begin = static_cast<std::size_t>(body.position(0) + body.length(0));
  std::string inner = text.substr(inner_begin, body_close - inner_begin);

  std::smatch action;
  if (!std::regex_search(inner, action, kAction)) throw MalformedEnvelope("SOAP Body has no action element");
  std::string prefix = action[1];
  std::string name = action[2];
  std::string attrs = action[3];
  if (inner.find("</" + prefix + name + ">") == std::string::npos) {
    throw MalformedEnvelope("unterminated action element " + name);
  }

  WemoSoapMessage msg;
  if (name == "SetBinaryState") {
    msg.kind = WemoSoapMessage::Kind::SetBinaryState;
  } else if (name == "GetBinaryState") {
    msg.kind = WemoSoapMessage::Kind::GetBinaryState;
  } else if (name == "GetBinaryStateResponse" || name == "SetBinaryStateResponse") {
    msg.kind = WemoSoapMessage::Kind::Response;
  } else {
    throw UnknownAction("unknown SOAP action " + name);
  }

  std::smatch ns;
  if (!std::regex_search(attrs, ns, kXmlns)) throw MalformedEnvelope("action element lacks a service namespace");
  msg.service_urn = ns[1];
  if (!msg.service_urn.starts_with("urn:")) throw MalformedEnvelope("service namespace is not a urn");

  if (msg.kind != WemoSoapMessage::Kind::GetBinaryState) {
    std::smatch st;
    if (!std::regex_search(inner, st, kBinaryState)) throw MalformedEnvelope("missing BinaryState");
    msg.state = std::stoi(st[1]);
    if (msg.kind == WemoSoapMessage::Kind::SetBinaryState && msg.state != 0 && msg.state != 1) {
      throw MalformedEnvelope("SetBinaryState takes 0 or 1");
    }
  }
  return msg;
}

std::string wemo_soap_action(const WemoSoapMessage& message) {
  auto action = message.kind == WemoSoapMessage::Kind::Response ? std::string_view("GetBinaryState")
                                                                : action_name(message.kind);
  return "\"" + message.service_urn + "#" + std::string(action) + "\"";
}

std::string ssdp_msearch(std::string_view service_urn) {
  require_urn(service_urn);
  std::ostringstream out;
  out << "M-SEARCH * HTTP/1.1" << kCrlf << "HOST: " << kSsdpMulticastAddress << ":" << kSsdpPort << kCrlf
      << "MAN: \"ssdp:discover\"" << kCrlf << "MX: 1" << kCrlf << "ST: " << service_urn << kCrlf << kCrlf;
  return out.str();
}

std::string ssdp_parse_msearch(std::string_view request) {
  auto msg = split_http(request);
  if (msg.start_line != "M-SEARCH * HTTP/1.1") throw MalformedResponse("not an M-SEARCH request");
  auto man = msg.header("man");
  if (!man || *man != "\"ssdp:discover\"") throw MalformedResponse("M-SEARCH without ssdp:discover");
  auto st = msg.header("st");
  if (!st || st->empty()) throw MalformedResponse("M-SEARCH without ST");
  return *st;
}

std::string ssdp_build_response(const SsdpResponse& response, std::string_view usn) {
  std::ostringstream out;
  out << "HTTP/1.1 200 OK" << kCrlf << "CACHE-CONTROL: max-age=86400" << kCrlf << "EXT:" << kCrlf
      << "LOCATION: " << response.location << kCrlf << "SERVER: Unspecified, UPnP/1.0, Unspecified"
      << kCrlf << "ST: " << response.urn << kCrlf << "USN: " << usn << "::" << response.urn << kCrlf
      << kCrlf;
  return out.str();
}

SsdpResponse ssdp_parse_response(std::string_view text) {
  auto msg = split_http(text);
  if (!msg.start_line.starts_with("HTTP/1.1 200")) throw MalformedResponse("not an SSDP 200 response");
  auto location = msg.header("location");
  if (!location || location->empty()) throw MalformedResponse("SSDP response without LOCATION");
  auto st = msg.header("st");
  if (!st || st->empty()) throw MalformedResponse("SSDP response without ST");
  return {*location, *st};
}

}  // namespace iotsurface::proto
