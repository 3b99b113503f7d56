#include "iotsurface/patterns.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "iotsurface_embedded_data.hpp"

namespace iotsurface {

namespace {

constexpr std::array<std::string_view, 8> kProtocolNames{"UDP",  "TCP",  "HTTP", "HTTPS",
                                                         "UPnP", "SSDP", "SIP",  "MQTT"};
constexpr std::array<std::string_view, 3> kSinkNames{"UdpSend", "TcpSend", "HttpRequest"};

std::vector<std::string> words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PatternFileError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    fn(line_no, line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

std::string_view to_string(Protocol p) { return kProtocolNames[static_cast<std::size_t>(p)]; }

std::optional<Protocol> protocol_from(std::string_view name) {
  for (std::size_t i = 0; i < kProtocolNames.size(); ++i) {
    if (kProtocolNames[i] == name) return static_cast<Protocol>(i);
  }
  return std::nullopt;
}

std::string_view to_string(SinkKind k) { return kSinkNames[static_cast<std::size_t>(k)]; }

std::optional<SinkKind> sink_kind_from(std::string_view name) {
  for (std::size_t i = 0; i < kSinkNames.size(); ++i) {
    if (kSinkNames[i] == name) return static_cast<SinkKind>(i);
  }
  return std::nullopt;
}

std::string ProtocolRule::describe() const {
  switch (match) {
    case Match::Owner: return "owner " + pattern;
    case Match::OwnerPrefix: return "owner-prefix " + pattern;
    case Match::ConstPrefix: return "const-prefix " + pattern;
    case Match::ConstExact: return "const-exact " + pattern;
  }
  return pattern;
}

PatternTable PatternTable::parse(std::string_view text) {
  PatternTable table;
  for_each_line(text, [&](int line_no, std::string_view raw) {
    auto w = words(strip_comment(raw));
    if (w.empty()) return;
    auto bad = [&](const std::string& why) {
      throw PatternFileError("patterns line " + std::to_string(line_no) + ": " + why);
    };
    const auto& kind = w[0];
    if (kind == "crypto-api") {
      if (w.size() != 2) bad("crypto-api takes one owner");
      table.crypto_api_owners.insert(w[1]);
    } else if (kind == "key-class") {
      if (w.size() != 3) bad("key-class takes owner and method");
      table.key_classes.push_back({w[1], w[2]});
    } else if (kind == "protocol") {
      if (w.size() != 4) bad("protocol takes name, matcher, pattern");
      auto p = protocol_from(w[1]);
      if (!p) bad("unknown protocol " + w[1]);
      ProtocolRule::Match m;
      if (w[2] == "owner") m = ProtocolRule::Match::Owner;
      else if (w[2] == "owner-prefix") m = ProtocolRule::Match::OwnerPrefix;
      else if (w[2] == "const-prefix") m = ProtocolRule::Match::ConstPrefix;
      else if (w[2] == "const-exact") m = ProtocolRule::Match::ConstExact;
      else bad("unknown matcher " + w[2]);
      table.protocol_rules.push_back({*p, m, w[3]});
    } else if (kind == "sink") {
      if (w.size() != 4) bad("sink takes kind, owner, method");
      auto k = sink_kind_from(w[1]);
      if (!k) bad("unknown sink kind " + w[1]);
      table.sinks.push_back({*k, w[2], w[3]});
    } else if (kind == "ui-method") {
      if (w.size() != 2) bad("ui-method takes one name");
      table.ui_methods.insert(w[1]);
    } else if (kind == "ui-class-suffix") {
      if (w.size() != 2) bad("ui-class-suffix takes one suffix");
      table.ui_class_suffixes.push_back(w[1]);
    } else {
      bad("unknown rule " + kind);
    }
  });
  return table;
}

PatternTable PatternTable::load(const std::string& path) { return parse(read_file(path)); }

const PatternTable& PatternTable::builtin() {
  static const PatternTable table = parse(embedded::kPatternsTxt);
  return table;
}

CveKnowledgeBase CveKnowledgeBase::parse(std::string_view text) {
  CveKnowledgeBase kb;
  for_each_line(text, [&](int line_no, std::string_view raw) {
    auto line = strip_comment(raw);
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in{std::string(line)};
    while (std::getline(in, field, ',')) {
      auto w = words(field);
      fields.push_back(w.empty() ? "" : w[0]);
    }
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) return;
    auto bad = [&](const std::string& why) {
      throw PatternFileError("cve kb line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3) bad("expected protocol, count, id");
    int count = 0;
    auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), count);
    if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size() || count <= 0) {
      bad("count must be a positive integer");
    }
    if (!fields[2].starts_with("CVE-")) bad("example id must be a CVE identifier");
    kb.entries_.push_back({fields[0], count, fields[2]});
  });
  return kb;
}

CveKnowledgeBase CveKnowledgeBase::load(const std::string& path) {
  return parse(read_file(path));
}

const CveKnowledgeBase& CveKnowledgeBase::builtin() {
  static const CveKnowledgeBase kb = parse(embedded::kCveKbTxt);
  return kb;
}

bool CveKnowledgeBase::covers(std::string_view protocol) const {
  for (const auto& e : entries_) {
    if (e.protocol == protocol) return true;
  }
  return false;
}

}  // namespace iotsurface
