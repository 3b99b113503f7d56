#pragma once

// Shared helpers: fixture paths and a small seeded generator of random
// SMIR programs for the property tests.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "iotsurface/smir.hpp"

namespace testsupport {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(IOTSURFACE_FIXTURE_DIR) / rel;
}

inline std::filesystem::path corpus_app(const std::string& app) { return fixture("corpus/" + app); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }
  std::vector<std::uint8_t> bytes(int max_len) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(range(0, max_len)));
    for (auto& b : out) b = static_cast<std::uint8_t>(range(0, 255));
    return out;
  }
};

inline const std::vector<std::string>& string_pool() {
  static const std::vector<std::string> pool{
      "255.255.255.255", "192.168.1.255", "239.255.255.250", "224.0.0.251", "10.0.0.7",
      "urn:Belkin:device:controllee:1", "hello", "AES", "a \"quoted\" word", "tab\there",
      "line\nbreak", "back\\slash", "# not a comment", "k3y"};
  return pool;
}

struct ExternalCall {
  std::string owner, name;
  int arity;
};

inline const std::vector<ExternalCall>& external_pool() {
  static const std::vector<ExternalCall> pool{
      {"java.net.DatagramSocket", "send", 1},
      {"java.net.Socket", "getOutputStream", 0},
      {"java.net.HttpURLConnection", "connect", 0},
      {"javax.crypto.Cipher", "doFinal", 1},
      {"javax.crypto.spec.SecretKeySpec", "<init>", 2},
      {"java.lang.String", "getBytes", 0},
      {"android.net.sip.SipManager", "newInstance", 1},
      {"org.eclipse.paho.client.mqttv3.MqttClient", "connect", 0},
  };
  return pool;
}

/// Random program with `n_classes` classes. Invokes target other generated
/// methods (so the call graph has internal edges) or well-known APIs.
inline iotsurface::Program random_program(Gen& g, int n_classes, int max_methods, int max_insns,
                                          const std::string& app_id = "gen") {
  using namespace iotsurface;
  struct Sig {
    std::string owner, name;
    int arity;
  };
  std::vector<Sig> sigs;
  std::vector<AppClass> classes;
  for (int c = 0; c < n_classes; ++c) {
    AppClass cls{"com.gen.pkg" + std::to_string(c % 3) + ".C" + std::to_string(c),
                 g.coin(0.3) ? "android.app.Activity" : "java.lang.Object", {}};
    int n = g.range(1, max_methods);
    for (int m = 0; m < n; ++m) {
      static const std::vector<std::string> names{"a", "b", "run", "onClick", "send", "encode", "<init>"};
      MethodDef def{cls.name, names[static_cast<std::size_t>(m % names.size())] + (m >= 7 ? std::to_string(m) : ""),
                    g.range(0, 3), g.coin(0.15), {}};
      sigs.push_back({def.owner, def.name, def.arity});
      cls.methods.push_back(std::move(def));
    }
    classes.push_back(std::move(cls));
  }

  auto reg = [&] { return Register{g.range(0, 7)}; };
  for (auto& cls : classes) {
    for (auto& m : cls.methods) {
      int n = g.range(0, max_insns);
      for (int i = 0; i < n; ++i) {
        switch (g.range(0, 9)) {
          case 0: {
            const auto& s = sigs[static_cast<std::size_t>(g.range(0, static_cast<int>(sigs.size()) - 1))];
            m.instructions.push_back(insn::Invoke{s.owner, s.name, s.arity});
            break;
          }
          case 1: {
            const auto& e = g.pick(external_pool());
            m.instructions.push_back(insn::Invoke{e.owner, e.name, e.arity});
            break;
          }
          case 2: m.instructions.push_back(insn::ConstString{reg(), g.pick(string_pool())}); break;
          case 3: m.instructions.push_back(insn::ConstInt{reg(), g.range(-100000, 100000)}); break;
          case 4: {
            auto b = g.bytes(8);
            if (b.empty()) b.push_back(0x42);
            m.instructions.push_back(insn::ConstBytes{reg(), b});
            break;
          }
          case 5:
          case 6: {
            auto op = static_cast<ArithOp>(g.range(0, 11));
            insn::Arith a{op, {reg(), reg()}};
            if (op != ArithOp::Not && g.coin()) a.regs.push_back(reg());
            m.instructions.push_back(a);
            break;
          }
          case 7: m.instructions.push_back(insn::Move{reg(), reg()}); break;
          case 8: m.instructions.push_back(insn::Other{g.coin() ? "iget-object" : "if-lt"}); break;
          default:
            if (g.coin()) m.instructions.push_back(insn::Nop{});
            else m.instructions.push_back(insn::NewInstance{"java.net.DatagramPacket"});
        }
      }
      m.instructions.push_back(insn::Return{});
    }
  }
  return Program(app_id, std::move(classes));
}

inline std::vector<iotsurface::SourceDocument> render_program(const iotsurface::Program& p) {
  std::vector<iotsurface::SourceDocument> docs;
  for (const auto& c : p.classes()) docs.push_back({c.name + ".smir", iotsurface::render_class(c)});
  return docs;
}

}  // namespace testsupport
