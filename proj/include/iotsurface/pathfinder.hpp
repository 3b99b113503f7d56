#pragma once

#include <string>
#include <vector>

#include "iotsurface/callgraph.hpp"
#include "iotsurface/detectors.hpp"
#include "iotsurface/patterns.hpp"
#include "iotsurface/smir.hpp"

namespace iotsurface {

struct Sink {
  MethodId method;
  SinkKind kind = SinkKind::UdpSend;
  auto operator<=>(const Sink&) const = default;
};

std::vector<Sink> find_sinks(const Program& program,
                             const PatternTable& patterns = PatternTable::builtin());

/// UI entry points: Android callback names, listener-suffixed classes, and
/// methods the fixture author marked with `# @ui`.
class UiSourcePredicate {
 public:
  explicit UiSourcePredicate(const Program& program,
                             const PatternTable& patterns = PatternTable::builtin());
  bool operator()(const MethodId& method) const;

 private:
  const PatternTable* patterns_;
  std::set<MethodId> marked_;
};

bool is_ui_source(const MethodId& method, const Program& program,
                  const PatternTable& patterns = PatternTable::builtin());

/// All detector output for one program.
struct Findings {
  std::vector<CryptoFinding> crypto;
  std::vector<KeyFinding> keys;
  std::vector<ProtocolFinding> protocols;
  std::vector<BroadcastFinding> broadcasts;
};

enum class EncryptionStatus { None, HardcodedKey, Keyed };
std::string_view to_string(EncryptionStatus s);

struct PathAnnotation {
  MethodId method;
  std::string what;  // e.g. "crypto:CustomHeuristic", "key:CustomFunctionBody"
  bool on_chain = true;
  bool operator==(const PathAnnotation&) const = default;
};

struct VulnPath {
  MethodChain chain;  // source first, sink last
  SinkKind sink_kind = SinkKind::UdpSend;
  EncryptionStatus encryption_status = EncryptionStatus::None;
  std::vector<PathAnnotation> annotations;
  bool operator==(const VulnPath&) const = default;
};

std::vector<VulnPath> find_vulnerable_paths(const Program& program, const CallGraph& graph,
                                            const Findings& findings,
                                            const PatternTable& patterns = PatternTable::builtin(),
                                            int max_depth = kDefaultMaxDepth);

}  // namespace iotsurface
