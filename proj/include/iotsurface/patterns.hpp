#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iotsurface {

enum class Protocol { UDP, TCP, HTTP, HTTPS, UPnP, SSDP, SIP, MQTT };

std::string_view to_string(Protocol p);
std::optional<Protocol> protocol_from(std::string_view name);

enum class SinkKind { UdpSend, TcpSend, HttpRequest };

std::string_view to_string(SinkKind k);
std::optional<SinkKind> sink_kind_from(std::string_view name);

struct ProtocolRule {
  enum class Match { Owner, OwnerPrefix, ConstPrefix, ConstExact };
  Protocol protocol;
  Match match;
  std::string pattern;

  /// Human-readable form used as finding evidence, e.g. `owner java.net.Socket`.
  std::string describe() const;
};

struct SinkRule {
  SinkKind kind;
  std::string owner;
  std::string method;
};

struct KeyClassRule {
  std::string owner;
  std::string method;
};

/// Every matching table the analyzer consults, loaded from a plain text
/// file so the tables can grow without a rebuild.
struct PatternTable {
  std::set<std::string> crypto_api_owners;
  std::vector<KeyClassRule> key_classes;
  std::vector<ProtocolRule> protocol_rules;
  std::vector<SinkRule> sinks;
  std::set<std::string> ui_methods;
  std::vector<std::string> ui_class_suffixes;

  static PatternTable parse(std::string_view text);
  static PatternTable load(const std::string& path);
  /// The table shipped in data/patterns.txt, compiled in.
  static const PatternTable& builtin();
};

struct CveEntry {
  std::string protocol;
  int reported_count = 0;
  std::string example_id;
  bool operator==(const CveEntry&) const = default;
};

class CveKnowledgeBase {
 public:
  static CveKnowledgeBase parse(std::string_view text);
  static CveKnowledgeBase load(const std::string& path);
  static const CveKnowledgeBase& builtin();

  const std::vector<CveEntry>& entries() const { return entries_; }
  bool covers(std::string_view protocol) const;

 private:
  std::vector<CveEntry> entries_;
};

class PatternFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iotsurface
