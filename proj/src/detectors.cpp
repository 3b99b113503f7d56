#include "iotsurface/detectors.hpp"

#include <charconv>
#include <stdexcept>

namespace iotsurface {

namespace {

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

std::optional<ConstValue> literal_of(const Instruction& i, std::size_t site) {
  using M = KeyFinding::Material;
  if (const auto* s = std::get_if<insn::ConstString>(&i)) return ConstValue{s->value, M::Text, site};
  if (const auto* n = std::get_if<insn::ConstInt>(&i)) {
    return ConstValue{std::to_string(n->value), M::Integer, site};
  }
  if (const auto* b = std::get_if<insn::ConstBytes>(&i)) return ConstValue{to_hex(b->value), M::Bytes, site};
  return std::nullopt;
}

std::optional<Register> literal_register(const Instruction& i) {
  if (const auto* s = std::get_if<insn::ConstString>(&i)) return s->reg;
  if (const auto* n = std::get_if<insn::ConstInt>(&i)) return n->reg;
  if (const auto* b = std::get_if<insn::ConstBytes>(&i)) return b->reg;
  return std::nullopt;
}

bool matches_key_class(const PatternTable& patterns, const insn::Invoke& call) {
  for (const auto& rule : patterns.key_classes) {
    if (rule.owner == call.owner && rule.method == call.name) return true;
  }
  return false;
}

// Invoke arguments travel in r0..r(arity-1).
void collect_arguments(const MethodDef& caller, std::size_t site, int arity,
                       KeyFinding::Channel channel, const MethodId& target,
                       std::vector<KeyFinding>& out) {
  auto consts = constants_before(caller, site);
  for (int r = 0; r < arity; ++r) {
    auto it = consts.find(r);
    if (it == consts.end() || it->second.text.empty()) continue;
    out.push_back({id_of(caller), it->second.text, it->second.kind, channel, site, target});
  }
}

}  // namespace

std::string_view to_string(CryptoFinding::Kind k) {
  return k == CryptoFinding::Kind::StdApi ? "StdApi" : "CustomHeuristic";
}

std::string_view to_string(KeyFinding::Channel c) {
  switch (c) {
    case KeyFinding::Channel::StdApiKeyClass: return "StdApiKeyClass";
    case KeyFinding::Channel::CustomFunctionBody: return "CustomFunctionBody";
    case KeyFinding::Channel::CustomFunctionArgument: return "CustomFunctionArgument";
  }
  return "?";
}

std::string_view to_string(BroadcastFinding::Category c) {
  switch (c) {
    case BroadcastFinding::Category::LimitedBroadcast: return "LimitedBroadcast";
    case BroadcastFinding::Category::DirectedBroadcast: return "DirectedBroadcast";
    case BroadcastFinding::Category::Multicast: return "Multicast";
  }
  return "?";
}

std::map<int, ConstValue> constants_before(const MethodDef& method, std::size_t upto) {
  std::map<int, ConstValue> regs;
  upto = std::min(upto, method.instructions.size());
  for (std::size_t i = 0; i < upto; ++i) {
    const auto& ins = method.instructions[i];
    if (auto lit = literal_of(ins, i)) {
      regs[literal_register(ins)->index] = std::move(*lit);
    } else if (const auto* mv = std::get_if<insn::Move>(&ins)) {
      if (auto it = regs.find(mv->src.index); it != regs.end()) {
        regs[mv->dst.index] = it->second;
      } else {
        regs.erase(mv->dst.index);
      }
    } else if (const auto* a = std::get_if<insn::Arith>(&ins)) {
      regs.erase(a->regs.front().index);
    }
  }
  return regs;
}

std::vector<CryptoFinding> detect_std_crypto(const Program& program, const PatternTable& patterns) {
  std::vector<CryptoFinding> out;
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      std::vector<std::size_t> hits;
      for (std::size_t i = 0; i < m.instructions.size(); ++i) {
        const auto* call = std::get_if<insn::Invoke>(&m.instructions[i]);
        if (call && patterns.crypto_api_owners.contains(call->owner)) hits.push_back(i);
      }
      if (hits.empty()) continue;
      CryptoFinding f;
      f.method = id_of(m);
      f.kind = CryptoFinding::Kind::StdApi;
      f.instruction_count = m.instructions.size();
      f.evidence = std::move(hits);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<CryptoFinding> detect_custom_crypto(const Program& program, double threshold,
                                                int min_instructions) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("ratio threshold must be in (0, 1]");
  }
  if (min_instructions < 1) throw std::invalid_argument("min_instructions must be >= 1");

  std::vector<CryptoFinding> out;
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      auto total = m.instructions.size();
      if (total < static_cast<std::size_t>(min_instructions)) continue;
      std::vector<std::size_t> arith;
      for (std::size_t i = 0; i < total; ++i) {
        if (is_arith_or_bitwise(m.instructions[i])) arith.push_back(i);
      }
      double ratio = static_cast<double>(arith.size()) / static_cast<double>(total);
      if (ratio < threshold) continue;
      CryptoFinding f;
      f.method = id_of(m);
      f.kind = CryptoFinding::Kind::CustomHeuristic;
      f.ratio = ratio;
      f.arith_count = arith.size();
      f.instruction_count = total;
      f.evidence = std::move(arith);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<KeyFinding> detect_hardcoded_keys(const Program& program,
                                              const std::vector<CryptoFinding>& crypto,
                                              const CallGraph& graph,
                                              const PatternTable& patterns) {
  std::vector<KeyFinding> out;

  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      for (std::size_t i = 0; i < m.instructions.size(); ++i) {
        const auto* call = std::get_if<insn::Invoke>(&m.instructions[i]);
        if (!call || !matches_key_class(patterns, *call)) continue;
        collect_arguments(m, i, call->arity, KeyFinding::Channel::StdApiKeyClass,
                          {call->owner, call->name, call->arity}, out);
      }
    }
  }

  std::set<MethodId> custom;
  for (const auto& f : crypto) {
    if (f.kind == CryptoFinding::Kind::CustomHeuristic) custom.insert(f.method);
  }

  for (const auto& id : custom) {
    const auto* m = program.find_method(id.owner, id.name, id.arity);
    if (!m) continue;
    for (std::size_t i = 0; i < m->instructions.size(); ++i) {
      auto lit = literal_of(m->instructions[i], i);
      if (!lit || lit->text.empty()) continue;
      out.push_back({id, lit->text, lit->kind, KeyFinding::Channel::CustomFunctionBody, i, id});
    }
  }

  for (const auto& id : custom) {
    if (!graph.contains(id)) continue;
    for (const auto& edge : graph.call_sites_of(id)) {
      const auto* caller = program.find_method(edge.caller.owner, edge.caller.name, edge.caller.arity);
      if (!caller) continue;
      collect_arguments(*caller, edge.site, id.arity, KeyFinding::Channel::CustomFunctionArgument,
                        id, out);
    }
  }
  return out;
}

std::vector<ProtocolFinding> detect_protocols(const Program& program, const PatternTable& patterns) {
  using Match = ProtocolRule::Match;
  std::vector<ProtocolFinding> out;
  for (const auto& cls : program.classes()) {
    ProtocolFinding f{cls.name, {}, {}};
    auto hit = [&](const ProtocolRule& rule) {
      if (f.protocols.insert(rule.protocol).second) f.evidence[rule.protocol] = rule.describe();
    };
    for (const auto& m : cls.methods) {
      for (const auto& ins : m.instructions) {
        if (const auto* call = std::get_if<insn::Invoke>(&ins)) {
          for (const auto& rule : patterns.protocol_rules) {
            if ((rule.match == Match::Owner && call->owner == rule.pattern) ||
                (rule.match == Match::OwnerPrefix && call->owner.starts_with(rule.pattern))) {
              hit(rule);
            }
          }
        } else if (const auto* s = std::get_if<insn::ConstString>(&ins)) {
          for (const auto& rule : patterns.protocol_rules) {
            if ((rule.match == Match::ConstExact && s->value == rule.pattern) ||
                (rule.match == Match::ConstPrefix && s->value.starts_with(rule.pattern))) {
              hit(rule);
            }
          }
        }
      }
    }
    if (!f.protocols.empty()) out.push_back(std::move(f));
  }
  return out;
}

std::optional<std::array<int, 4>> parse_ipv4(std::string_view text) {
  std::array<int, 4> octets{};
  std::size_t pos = 0;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) {
      if (pos >= text.size() || text[pos] != '.') return std::nullopt;
      ++pos;
    }
    auto start = pos;
    while (pos < text.size() && pos - start < 3 && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
    int value = 0;
    std::from_chars(text.data() + start, text.data() + pos, value);
    if (value > 255) return std::nullopt;
    octets[k] = value;
  }
  if (pos != text.size()) return std::nullopt;
  return octets;
}

std::vector<BroadcastFinding> detect_broadcast(const Program& program) {
  using Category = BroadcastFinding::Category;
  std::vector<BroadcastFinding> out;
  for (const auto& cls : program.classes()) {
    for (const auto& m : cls.methods) {
      for (std::size_t i = 0; i < m.instructions.size(); ++i) {
        const auto* s = std::get_if<insn::ConstString>(&m.instructions[i]);
        if (!s) continue;
        auto ip = parse_ipv4(s->value);
        if (!ip) continue;
        const auto& o = *ip;
        BroadcastFinding f{id_of(m), s->value, Category::LimitedBroadcast, i, {}};
        if (o[0] == 255 && o[1] == 255 && o[2] == 255 && o[3] == 255) {
          f.category = Category::LimitedBroadcast;
        } else if (o[0] >= 224 && o[0] <= 239) {
          f.category = Category::Multicast;
        } else if (o[3] == 255) {
          f.category = Category::DirectedBroadcast;
          f.note = "heuristic: trailing .255 octet, subnet mask unknown";
        } else {
          continue;
        }
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

std::vector<CveEntry> match_cves(const std::set<std::string>& protocols, const CveKnowledgeBase& kb) {
  std::vector<CveEntry> out;
  for (const auto& e : kb.entries()) {
    if (protocols.contains(e.protocol)) out.push_back(e);
  }
  return out;
}

}  // namespace iotsurface
