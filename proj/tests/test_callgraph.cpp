#include <set>

#include "doctest.h"
#include "iotsurface/callgraph.hpp"
#include "iotsurface/pathfinder.hpp"
#include "support.hpp"

using namespace iotsurface;

namespace {

Program prog(const std::string& text) { return parse_program("t", {{"t.smir", text}}); }

const char* kDiamond = R"(.class A
.method top(0)
  invoke B left 0
  invoke B right 0
.end method
.class B
.method left(0)
  invoke C sink 0
.end method
.method right(0)
  invoke C sink 0
.end method
.class C
.method sink(0)
  invoke java.net.DatagramSocket send 1
.end method
)";

const char* kCycle = R"(.class A
# @ui
.method f(0)
  invoke B g 0
.end method
.class B
.method g(0)
  invoke A f 0
  invoke B h 0
.end method
.method h(0)
  invoke B g 0
.end method
)";

std::size_t invoke_count(const Program& p) {
  std::size_t n = 0;
  for (const auto& c : p.classes())
    for (const auto& m : c.methods)
      for (const auto& i : m.instructions) n += std::holds_alternative<insn::Invoke>(i);
  return n;
}

}  // namespace

TEST_CASE("no invokes, no edges") {
  auto g = build_callgraph(prog(".class A\n.method f(0)\n  return\n.end method\n"));
  CHECK(g.edges().empty());
  CHECK(g.nodes().size() == 1);
  CHECK(g.external_callees().empty());
}

TEST_CASE("direct resolution and external callees") {
  auto g = build_callgraph(prog(".class A\n.method f(0)\n  invoke B g 1\n  invoke java.net.DatagramSocket send 1\n.end method\n"
                                ".class B\n.method g(1)\n.end method\n"));
  MethodId f{"A", "f", 0}, bg{"B", "g", 1}, send{"java.net.DatagramSocket", "send", 1};
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0] == CallEdge{f, bg, 0});
  CHECK(g.edges()[1] == CallEdge{f, send, 1});
  CHECK(g.external_callees() == std::set<MethodId>{send});
  CHECK(g.is_external(send));
  CHECK_FALSE(g.is_external(bg));
  CHECK(g.contains(send));
  CHECK(g.callees_of(f) == std::set<MethodId>{bg, send});
}

TEST_CASE("arity is part of the resolution key") {
  auto g = build_callgraph(prog(".class A\n.method f(0)\n  invoke B g 2\n.end method\n.class B\n.method g(1)\n.end method\n"));
  CHECK(g.is_external(MethodId{"B", "g", 2}));
  CHECK(g.callers_of(MethodId{"B", "g", 1}).empty());
}

TEST_CASE("callers_of") {
  auto g = build_callgraph(prog(kDiamond));
  CHECK(g.callers_of(MethodId{"C", "sink", 0}) == std::set<MethodId>{{"B", "left", 0}, {"B", "right", 0}});
  CHECK(g.callers_of(MethodId{"A", "top", 0}).empty());
  CHECK_THROWS_AS(g.callers_of(MethodId{"Nope", "x", 0}), UnknownMethod);
}

TEST_CASE("Kasa: UDPClient.b is called only by TPUDPClient.a") {
  auto g = build_callgraph(load_app_dir(testsupport::corpus_app("Kasa")));
  CHECK(g.callers_of(MethodId{"com.tplink.kasa.udp.UDPClient", "b", 1}) ==
        std::set<MethodId>{{"com.tplink.kasa.udp.TPUDPClient", "a", 1}});
}

TEST_CASE("backward_chains") {
  SUBCASE("diamond gives both routes, sorted") {
    auto g = build_callgraph(prog(kDiamond));
    auto chains = backward_chains(g, {"C", "sink", 0}, [](const MethodId& m) { return m.name == "top"; });
    REQUIRE(chains.size() == 2);
    CHECK(join_chain(chains[0]) == "A.top/0 -> B.left/0 -> C.sink/0");
    CHECK(join_chain(chains[1]) == "A.top/0 -> B.right/0 -> C.sink/0");
  }
  SUBCASE("unreachable sink") {
    auto g = build_callgraph(prog(kDiamond));
    CHECK(backward_chains(g, {"C", "sink", 0}, [](const MethodId&) { return false; }).empty());
  }
  SUBCASE("max_depth bounds chain length") {
    auto g = build_callgraph(prog(kDiamond));
    auto top = [](const MethodId& m) { return m.name == "top"; };
    CHECK(backward_chains(g, {"C", "sink", 0}, top, 2).empty());
    CHECK(backward_chains(g, {"C", "sink", 0}, top, 3).size() == 2);
    CHECK_THROWS_AS(backward_chains(g, {"C", "sink", 0}, top, 0), std::invalid_argument);
  }
  SUBCASE("sink that is itself a source") {
    auto g = build_callgraph(prog(kDiamond));
    auto chains = backward_chains(g, {"C", "sink", 0}, [](const MethodId& m) { return m.name == "sink"; });
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].size() == 1);
  }
  SUBCASE("cycle terminates without repeats") {
    auto g = build_callgraph(prog(kCycle));
    auto chains = backward_chains(g, {"B", "h", 0}, [](const MethodId& m) { return m.owner == "A"; });
    REQUIRE(chains.size() == 1);
    CHECK(join_chain(chains[0]) == "A.f/0 -> B.g/0 -> B.h/0");
  }
  SUBCASE("unknown sink") {
    auto g = build_callgraph(prog(kDiamond));
    CHECK_THROWS_AS(backward_chains(g, {"Z", "z", 0}, [](const MethodId&) { return true; }), UnknownMethod);
  }
  SUBCASE("Kasa UI-to-UDP chain") {
    auto p = load_app_dir(testsupport::corpus_app("Kasa"));
    auto g = build_callgraph(p);
    auto chains = backward_chains(g, {"com.tplink.kasa.udp.UDPClient", "b", 1}, UiSourcePredicate(p));
    REQUIRE(chains.size() == 1);
    std::vector<std::string> names;
    for (const auto& m : chains[0]) names.push_back(m.short_name());
    CHECK(names == std::vector<std::string>{"c.a", "TPUDPClient.a", "UDPClient.b"});
  }
}

TEST_CASE("property: edge count equals invoke count; edges well formed") {
  testsupport::Gen gen(11);
  for (int trial = 0; trial < 150; ++trial) {
    auto p = testsupport::random_program(gen, gen.range(1, 5), 6, 20);
    auto g = build_callgraph(p);
    CHECK(g.edges().size() == invoke_count(p));
    for (const auto& e : g.edges()) {
      CHECK(p.find_method(e.caller.owner, e.caller.name, e.caller.arity) != nullptr);
      bool defined = p.find_method(e.callee.owner, e.callee.name, e.callee.arity) != nullptr;
      CHECK(defined != g.is_external(e.callee));
    }
  }
}

TEST_CASE("property: chains are simple, bounded, source-to-sink, sorted, deterministic") {
  testsupport::Gen gen(12);
  for (int trial = 0; trial < 150; ++trial) {
    auto p = testsupport::random_program(gen, gen.range(1, 5), 7, 15);
    auto g = build_callgraph(p);
    int depth = gen.range(1, 6);
    auto is_src = [](const MethodId& m) { return m.name == "onClick" || m.name == "a"; };
    for (const auto& sink : g.nodes()) {
      auto chains = backward_chains(g, sink, is_src, depth);
      CHECK(chains == backward_chains(build_callgraph(p), sink, is_src, depth));
      std::vector<std::string> keys;
      for (const auto& c : chains) {
        REQUIRE_FALSE(c.empty());
        CHECK(static_cast<int>(c.size()) <= depth);
        CHECK(is_src(c.front()));
        CHECK(c.back() == sink);
        CHECK(std::set<MethodId>(c.begin(), c.end()).size() == c.size());
        for (std::size_t i = 0; i + 1 < c.size(); ++i) CHECK(g.callees_of(c[i]).contains(c[i + 1]));
        keys.push_back(join_chain(c));
      }
      CHECK(std::is_sorted(keys.begin(), keys.end()));
    }
  }
}
