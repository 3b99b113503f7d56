#include "iotsurface/pathfinder.hpp"

#include <algorithm>

namespace iotsurface {

std::string_view to_string(EncryptionStatus s) {
  switch (s) {
    case EncryptionStatus::None: return "None";
    case EncryptionStatus::HardcodedKey: return "HardcodedKey";
    case EncryptionStatus::Keyed: return "Keyed";
  }
  return "?";
}

std::vector<Sink> find_sinks(const Program& program, const PatternTable& patterns) {
  std::vector<Sink> out;
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      std::set<SinkKind> kinds;
      for (const auto& ins : m.instructions) {
        const auto* call = std::get_if<insn::Invoke>(&ins);
        if (!call) continue;
        for (const auto& rule : patterns.sinks) {
          if (rule.owner == call->owner && rule.method == call->name) kinds.insert(rule.kind);
        }
      }
      for (auto k : kinds) out.push_back({id_of(m), k});
    }
  }
  return out;
}

UiSourcePredicate::UiSourcePredicate(const Program& program, const PatternTable& patterns)
    : patterns_(&patterns) {
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      if (m.ui_marked) marked_.insert(id_of(m));
    }
  }
}

bool UiSourcePredicate::operator()(const MethodId& method) const {
  if (marked_.contains(method)) return true;
  if (patterns_->ui_methods.contains(method.name)) return true;
  return std::any_of(patterns_->ui_class_suffixes.begin(), patterns_->ui_class_suffixes.end(),
                     [&](const std::string& suffix) { return method.owner.ends_with(suffix); });
}

bool is_ui_source(const MethodId& method, const Program& program, const PatternTable& patterns) {
  return UiSourcePredicate(program, patterns)(method);
}

std::vector<VulnPath> find_vulnerable_paths(const Program& program, const CallGraph& graph,
                                            const Findings& findings,
                                            const PatternTable& patterns, int max_depth) {
  UiSourcePredicate is_source(program, patterns);
  std::vector<VulnPath> out;

  for (const auto& sink : find_sinks(program, patterns)) {
    for (auto& chain : backward_chains(graph, sink.method, is_source, max_depth)) {
      // Helpers such as encoders hang one call off the chain.
      std::set<MethodId> members(chain.begin(), chain.end());
      std::set<MethodId> nearby = members;
      for (const auto& m : chain) {
        for (const auto& callee : graph.callees_of(m)) {
          if (graph.nodes().contains(callee)) nearby.insert(callee);
        }
      }

      VulnPath path;
      path.sink_kind = sink.kind;
      bool any_crypto = false;
      bool any_key = false;
      auto annotate = [&](const MethodId& id, std::string what) {
        PathAnnotation a{id, std::move(what), members.contains(id)};
        if (std::find(path.annotations.begin(), path.annotations.end(), a) == path.annotations.end()) {
          path.annotations.push_back(std::move(a));
        }
      };
      for (const auto& f : findings.crypto) {
        if (!nearby.contains(f.method)) continue;
        any_crypto = true;
        annotate(f.method, "crypto:" + std::string(to_string(f.kind)));
      }
      for (const auto& k : findings.keys) {
        if (!nearby.contains(k.method)) continue;
        any_key = true;
        annotate(k.method, "key:" + std::string(to_string(k.channel)));
      }
      path.encryption_status = any_key      ? EncryptionStatus::HardcodedKey
                               : any_crypto ? EncryptionStatus::Keyed
                                            : EncryptionStatus::None;
      path.chain = std::move(chain);
      out.push_back(std::move(path));
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const VulnPath& a, const VulnPath& b) {
    auto ja = join_chain(a.chain);
    auto jb = join_chain(b.chain);
    if (ja != jb) return ja < jb;
    return a.sink_kind < b.sink_kind;
  });
  return out;
}

}  // namespace iotsurface
