#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotsurface/smir.hpp"

namespace iotsurface {

struct MethodId {
  std::string owner;
  std::string name;
  int arity = 0;

  auto operator<=>(const MethodId&) const = default;

  /// `owner.name/arity`
  std::string str() const;
  /// Last owner segment plus method name, e.g. `TPUDPClient.a`.
  std::string short_name() const;
};

MethodId id_of(const MethodDef& method);

struct CallEdge {
  MethodId caller;
  MethodId callee;
  std::size_t site = 0;  // instruction index inside the caller
  auto operator<=>(const CallEdge&) const = default;
};

class UnknownMethod : public std::out_of_range {
 public:
  explicit UnknownMethod(const MethodId& id)
      : std::out_of_range("unknown method " + id.str()), id_(id) {}
  const MethodId& id() const { return id_; }

 private:
  MethodId id_;
};

/// Whole-program call graph. Callees are resolved by exact
/// (owner, name, arity); anything unresolved is external.
class CallGraph {
 public:
  const std::set<MethodId>& nodes() const { return nodes_; }
  const std::vector<CallEdge>& edges() const { return edges_; }
  const std::set<MethodId>& external_callees() const { return external_; }

  bool contains(const MethodId& id) const;
  bool is_external(const MethodId& id) const { return external_.contains(id); }

  std::set<MethodId> callers_of(const MethodId& target) const;
  std::set<MethodId> callees_of(const MethodId& caller) const;
  /// Edges whose callee is `target`, in construction order.
  std::vector<CallEdge> call_sites_of(const MethodId& target) const;

 private:
  friend CallGraph build_callgraph(const Program& program);

  std::set<MethodId> nodes_;
  std::vector<CallEdge> edges_;
  std::set<MethodId> external_;
  std::map<MethodId, std::vector<std::size_t>> incoming_;
  std::map<MethodId, std::vector<std::size_t>> outgoing_;
};

CallGraph build_callgraph(const Program& program);

using MethodChain = std::vector<MethodId>;

inline constexpr int kDefaultMaxDepth = 16;

/// All simple reverse-edge walks from `sink` back to methods satisfying
/// `is_source`, at most `max_depth` methods long. Chains are returned
/// source-first, sorted by their joined method names.
std::vector<MethodChain> backward_chains(const CallGraph& graph, const MethodId& sink,
                                         const std::function<bool(const MethodId&)>& is_source,
                                         int max_depth = kDefaultMaxDepth);

std::string join_chain(const MethodChain& chain);

}  // namespace iotsurface
