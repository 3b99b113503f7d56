#include "iotsurface/callgraph.hpp"

#include <algorithm>

namespace iotsurface {

std::string MethodId::str() const { return owner + "." + name + "/" + std::to_string(arity); }

std::string MethodId::short_name() const {
  auto dot = owner.rfind('.');
  auto cls = dot == std::string::npos ? owner : owner.substr(dot + 1);
  return cls + "." + name;
}

MethodId id_of(const MethodDef& method) { return {method.owner, method.name, method.arity}; }

bool CallGraph::contains(const MethodId& id) const {
  return nodes_.contains(id) || external_.contains(id);
}

std::set<MethodId> CallGraph::callers_of(const MethodId& target) const {
  if (!contains(target)) throw UnknownMethod(target);
  std::set<MethodId> out;
  if (auto it = incoming_.find(target); it != incoming_.end()) {
    for (auto e : it->second) out.insert(edges_[e].caller);
  }
  return out;
}

std::set<MethodId> CallGraph::callees_of(const MethodId& caller) const {
  if (!contains(caller)) throw UnknownMethod(caller);
  std::set<MethodId> out;
  if (auto it = outgoing_.find(caller); it != outgoing_.end()) {
    for (auto e : it->second) out.insert(edges_[e].callee);
  }
  return out;
}

std::vector<CallEdge> CallGraph::call_sites_of(const MethodId& target) const {
  std::vector<CallEdge> out;
  if (auto it = incoming_.find(target); it != incoming_.end()) {
    for (auto e : it->second) out.push_back(edges_[e]);
  }
  return out;
}

CallGraph build_callgraph(const Program& program) {
  CallGraph g;
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) g.nodes_.insert(id_of(m));
  }
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      auto caller = id_of(m);
      for (std::size_t i = 0; i < m.instructions.size(); ++i) {
        const auto* call = std::get_if<insn::Invoke>(&m.instructions[i]);
        if (!call) continue;
        MethodId callee{call->owner, call->name, call->arity};
        if (!g.nodes_.contains(callee)) g.external_.insert(callee);
        g.incoming_[callee].push_back(g.edges_.size());
        g.outgoing_[caller].push_back(g.edges_.size());
        g.edges_.push_back({caller, std::move(callee), i});
      }
    }
  }
  return g;
}

std::string join_chain(const MethodChain& chain) {
  std::string out;
  for (const auto& m : chain) {
    if (!out.empty()) out += " -> ";
    out += m.str();
  }
  return out;
}

std::vector<MethodChain> backward_chains(const CallGraph& graph, const MethodId& sink,
                                         const std::function<bool(const MethodId&)>& is_source,
                                         int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!graph.contains(sink)) throw UnknownMethod(sink);

  std::vector<MethodChain> found;
  // Walk is kept sink-first and reversed when a source is reached.
  MethodChain walk{sink};
  std::set<MethodId> on_walk{sink};

  std::function<void()> extend = [&] {
    const auto& head = walk.back();
    if (is_source(head)) found.emplace_back(walk.rbegin(), walk.rend());
    if (static_cast<int>(walk.size()) >= max_depth) return;
    for (const auto& caller : graph.callers_of(head)) {
      if (on_walk.contains(caller)) continue;
      walk.push_back(caller);
      on_walk.insert(caller);
      extend();
      on_walk.erase(caller);
      walk.pop_back();
    }
  };
  extend();

  std::sort(found.begin(), found.end(), [](const MethodChain& a, const MethodChain& b) {
    return join_chain(a) < join_chain(b);
  });
  return found;
}

}  // namespace iotsurface
