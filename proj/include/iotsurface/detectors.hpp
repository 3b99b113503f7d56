#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iotsurface/callgraph.hpp"
#include "iotsurface/patterns.hpp"
#include "iotsurface/smir.hpp"

namespace iotsurface {

inline constexpr double kDefaultRatioThreshold = 0.3;
inline constexpr int kDefaultMinInstructions = 10;

struct CryptoFinding {
  enum class Kind { StdApi, CustomHeuristic };
  MethodId method;
  Kind kind = Kind::StdApi;
  double ratio = 0.0;  // CustomHeuristic only
  std::size_t arith_count = 0;
  std::size_t instruction_count = 0;
  std::vector<std::size_t> evidence;
  bool operator==(const CryptoFinding&) const = default;
};

struct KeyFinding {
  enum class Channel { StdApiKeyClass, CustomFunctionBody, CustomFunctionArgument };
  enum class Material { Text, Integer, Bytes };
  MethodId method;
  std::string material;  // text, decimal, or lowercase hex
  Material material_kind = Material::Text;
  Channel channel = Channel::StdApiKeyClass;
  std::size_t site = 0;  // instruction index of the constant or the call
  MethodId target;       // the key-class or custom-crypto method it reaches
  bool operator==(const KeyFinding&) const = default;
};

struct ProtocolFinding {
  std::string class_name;
  std::set<Protocol> protocols;
  std::map<Protocol, std::string> evidence;  // first matching pattern
  bool operator==(const ProtocolFinding&) const = default;
};

struct BroadcastFinding {
  enum class Category { LimitedBroadcast, DirectedBroadcast, Multicast };
  MethodId method;
  std::string address;
  Category category = Category::LimitedBroadcast;
  std::size_t site = 0;
  std::string note;
  bool counts_as_broadcast() const { return category != Category::Multicast; }
  bool operator==(const BroadcastFinding&) const = default;
};

std::string_view to_string(CryptoFinding::Kind k);
std::string_view to_string(KeyFinding::Channel c);
std::string_view to_string(BroadcastFinding::Category c);

std::vector<CryptoFinding> detect_std_crypto(const Program& program,
                                             const PatternTable& patterns = PatternTable::builtin());

/// Flags methods whose share of arithmetic/bitwise instructions reaches
/// `threshold`, ignoring methods shorter than `min_instructions`.
std::vector<CryptoFinding> detect_custom_crypto(const Program& program,
                                                double threshold = kDefaultRatioThreshold,
                                                int min_instructions = kDefaultMinInstructions);

std::vector<KeyFinding> detect_hardcoded_keys(const Program& program,
                                              const std::vector<CryptoFinding>& crypto,
                                              const CallGraph& graph,
                                              const PatternTable& patterns = PatternTable::builtin());

std::vector<ProtocolFinding> detect_protocols(const Program& program,
                                              const PatternTable& patterns = PatternTable::builtin());

std::vector<BroadcastFinding> detect_broadcast(const Program& program);

std::vector<CveEntry> match_cves(const std::set<std::string>& protocols,
                                 const CveKnowledgeBase& kb = CveKnowledgeBase::builtin());

/// Dotted-quad parser used by the broadcast scan; rejects anything else.
std::optional<std::array<int, 4>> parse_ipv4(std::string_view text);

/// Straight-line constant state: which register holds which literal after
/// the first `upto` instructions of `method` (last write wins).
struct ConstValue {
  std::string text;
  KeyFinding::Material kind = KeyFinding::Material::Text;
  std::size_t site = 0;
};
std::map<int, ConstValue> constants_before(const MethodDef& method, std::size_t upto);

}  // namespace iotsurface
