#include <fstream>
#include <sstream>

#include "doctest.h"
#include "iotsurface/smir.hpp"
#include "support.hpp"

using namespace iotsurface;

namespace {

Program parse_one(const std::string& text, const std::string& file = "t.smir") {
  return parse_program("t", {{file, text}});
}

int count_instruction_lines(const std::string& text) {
  // counted independently of the parser: non-blank, non-comment, non-directive
  // lines between `.method` and `.end method`
  std::istringstream in(text);
  std::string line;
  bool inside = false;
  int n = 0;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto body = line.substr(first);
    if (body.rfind(".method", 0) == 0) { inside = true; continue; }
    if (body.rfind(".end method", 0) == 0) { inside = false; continue; }
    if (inside && body[0] != '#') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("empty document list gives an empty program") {
  auto p = parse_program("none", {});
  CHECK(p.app_id() == "none");
  CHECK(p.classes().empty());
}

TEST_CASE("minimal class") {
  auto p = parse_one(".class A\n.super B\n.method f(1)\n  return\n.end method\n");
  REQUIRE(p.classes().size() == 1);
  const auto& c = p.classes()[0];
  CHECK(c.name == "A");
  CHECK(c.super_name == "B");
  REQUIRE(c.methods.size() == 1);
  CHECK(c.methods[0].owner == "A");
  CHECK(c.methods[0].arity == 1);
  REQUIRE(c.methods[0].instructions.size() == 1);
  CHECK(std::holds_alternative<insn::Return>(c.methods[0].instructions[0]));
}

TEST_CASE("missing .super defaults to java.lang.Object") {
  auto p = parse_one(".class a.B\n.method f(0)\n.end method\n");
  CHECK(p.classes()[0].super_name == "java.lang.Object");
  CHECK(p.classes()[0].methods[0].instructions.empty());
}

TEST_CASE("every instruction form parses") {
  auto p = parse_one(R"(.class x.Y
.method m(2)
  invoke java.net.Socket connect 1
  const-string r0 "a # b \"q\" \\ \n"
  const-int r1 -42
  const-bytes r2 DE ad 0b
  xor r3 r1 r2
  not r4 r3
  shl r3 r3
  move r5 r3
  new-instance java.net.DatagramPacket
  nop
  other monitor-enter
  return
.end method
)");
  const auto& ins = p.classes()[0].methods[0].instructions;
  REQUIRE(ins.size() == 12);
  CHECK(std::get<insn::Invoke>(ins[0]) == insn::Invoke{"java.net.Socket", "connect", 1});
  CHECK(std::get<insn::ConstString>(ins[1]).value == "a # b \"q\" \\ \n");
  CHECK(std::get<insn::ConstInt>(ins[2]).value == -42);
  CHECK(std::get<insn::ConstBytes>(ins[3]).value == std::vector<std::uint8_t>{0xDE, 0xAD, 0x0B});
  CHECK(std::get<insn::Arith>(ins[4]).op == ArithOp::Xor);
  CHECK(std::get<insn::Arith>(ins[4]).regs.size() == 3);
  CHECK(std::get<insn::Arith>(ins[5]).op == ArithOp::Not);
  CHECK(std::get<insn::Move>(ins[7]) == insn::Move{Register{5}, Register{3}});
  CHECK(std::get<insn::Other>(ins[10]).mnemonic == "monitor-enter");
}

TEST_CASE("@ui marker") {
  SUBCASE("comment line before .method") {
    auto p = parse_one(".class A\n# @ui\n.method f(0)\n.end method\n.method g(0)\n.end method\n");
    CHECK(p.classes()[0].methods[0].ui_marked);
    CHECK_FALSE(p.classes()[0].methods[1].ui_marked);
  }
  SUBCASE("trailing comment on the .method line") {
    auto p = parse_one(".class A\n.method f(0)  # @ui\n.end method\n");
    CHECK(p.classes()[0].methods[0].ui_marked);
  }
  SUBCASE("other comments do not mark") {
    auto p = parse_one(".class A\n# ui stuff\n.method f(0)\n.end method\n");
    CHECK_FALSE(p.classes()[0].methods[0].ui_marked);
  }
  SUBCASE("dangling marker is an error") {
    CHECK_THROWS_AS(parse_one(".class A\n# @ui\n"), SyntaxError);
    CHECK_THROWS_AS(parse_one(".class A\n.method f(0)\n# @ui\n  return\n.end method\n"), SyntaxError);
  }
}

TEST_CASE("syntax errors name file and first offending line") {
  struct Case {
    const char* text;
    int line;
  };
  const Case cases[] = {
      {".class A\n.method f(1)\n  frobnicate r0\n.end method\n", 3},
      {".bogus\n", 1},
      {".class A\n.class A\n", 2},
      {".class A\n.method f(1)\n.end method\n.method f(1)\n.end method\n", 5},
      {".class A\n.method f(x)\n", 2},
      {".class A\n.method f(-1)\n", 2},
      {".class A\n.method f(0)\n  add r0\n.end method\n", 3},
      {".class A\n.method f(0)\n  not r0 r1 r2\n.end method\n", 3},
      {".class A\n.method f(0)\n  const-int q1 3\n.end method\n", 3},
      {".class A\n.method f(0)\n  const-string r0 unquoted\n.end method\n", 3},
      {".class A\n.method f(0)\n  const-bytes r0 abc\n.end method\n", 3},
      {".class A\n.method f(0)\n  invoke java..net x 1\n.end method\n", 3},
      {".class A\n.method f(0)\n  return\n", 4},
      {"  return\n", 1},
      {".class A\n.method f(0)\n.end method\n.super B\n", 4},
      {".class A\n.method f(0)\n  const-string r0 \"bad \\q\"\n.end method\n", 3},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    try {
      parse_one(c.text, "bad.smir");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.file() == "bad.smir");
      CHECK(e.line() == c.line);
      CHECK_FALSE(e.reason().empty());
    }
  }
}

TEST_CASE("duplicate class across documents is rejected") {
  CHECK_THROWS_AS(parse_program("t", {{"a.smir", ".class A\n"}, {"b.smir", ".class A\n"}}), SyntaxError);
}

TEST_CASE("is_arith_or_bitwise") {
  for (int op = 0; op < 12; ++op) {
    CHECK(is_arith_or_bitwise(insn::Arith{static_cast<ArithOp>(op), {Register{0}, Register{1}}}));
  }
  CHECK_FALSE(is_arith_or_bitwise(insn::Invoke{"java.net.Socket", "connect", 1}));
  CHECK_FALSE(is_arith_or_bitwise(insn::Other{"monitor-enter"}));
  CHECK_FALSE(is_arith_or_bitwise(insn::Other{"xor"}));
  CHECK_FALSE(is_arith_or_bitwise(insn::Move{}));
}

TEST_CASE("Program constructor enforces invariants") {
  CHECK_THROWS_AS(Program("x", {AppClass{"A", "B", {}}, AppClass{"A", "B", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(Program("x", {AppClass{"A", "B", {MethodDef{"Z", "f", 0, false, {}}}}}), std::invalid_argument);
  CHECK_THROWS_AS(Program("x", {AppClass{"A", "B", {MethodDef{"A", "f", 0, false, {}}, MethodDef{"A", "f", 0, false, {}}}}}),
                  std::invalid_argument);
  // same name, different arity is an overload, not a duplicate
  CHECK_NOTHROW(Program("x", {AppClass{"A", "B", {MethodDef{"A", "f", 0, false, {}}, MethodDef{"A", "f", 1, false, {}}}}}));
}

TEST_CASE("load_app_dir uses the directory name and reads files in order") {
  auto p = load_app_dir(testsupport::corpus_app("Kasa"));
  CHECK(p.app_id() == "Kasa");
  REQUIRE(p.classes().size() == 4);
  // udp.smir, ui.smir, util.smir
  CHECK(p.classes()[0].name == "com.tplink.kasa.udp.TPUDPClient");
  CHECK(p.classes()[2].name == "com.tplink.kasa.ui.c");
  CHECK(p.find_method("com.tplink.kasa.util.TPClientUtils", "encode", 1) != nullptr);
  CHECK(p.find_method("com.tplink.kasa.util.TPClientUtils", "encode", 2) == nullptr);
}

TEST_CASE("property: render then parse is the identity") {
  testsupport::Gen g(0x5EED);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = testsupport::random_program(g, g.range(1, 6), 9, 25, "rt");
    auto back = parse_program("rt", testsupport::render_program(p));
    REQUIRE(back == p);
  }
}

TEST_CASE("property: instruction count equals instruction lines") {
  testsupport::Gen g(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = testsupport::random_program(g, 1, 6, 30);
    auto text = render_class(p.classes()[0]);
    auto back = parse_one(text);
    std::size_t total = 0;
    for (const auto& m : back.classes()[0].methods) total += m.instructions.size();
    CHECK(static_cast<int>(total) == count_instruction_lines(text));
  }
  // fixtures too, including comments and blank lines
  for (const auto* f : {"corpus/Kasa/util.smir", "corpus/WeMo/upnp.smir"}) {
    std::ifstream in(testsupport::fixture(f));
    std::stringstream ss;
    ss << in.rdbuf();
    auto p = parse_one(ss.str());
    std::size_t total = 0;
    for (const auto& c : p.classes())
      for (const auto& m : c.methods) total += m.instructions.size();
    CHECK(static_cast<int>(total) == count_instruction_lines(ss.str()));
  }
}

TEST_CASE("property: parsing is total (program or exactly one SyntaxError)") {
  testsupport::Gen g(4242);
  const std::vector<std::string> junk{"frob r1", ".method", "xor r1", "\"", "const-int r0 9x", ".end method",
                                      ".class", "# @ui", "invoke a b", "r0", "move r0", ".super X"};
  for (int trial = 0; trial < 300; ++trial) {
    auto p = testsupport::random_program(g, 1, 4, 10);
    auto text = render_class(p.classes()[0]);
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    int edits = g.range(1, 3);
    for (int e = 0; e < edits; ++e) {
      auto at = static_cast<std::size_t>(g.range(0, static_cast<int>(lines.size())));
      lines.insert(lines.begin() + static_cast<long>(at), g.pick(junk));
    }
    std::string mutated;
    for (const auto& l : lines) mutated += l + "\n";
    try {
      parse_one(mutated);
    } catch (const SyntaxError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.line() <= static_cast<int>(lines.size()) + 1);
    }
    // anything else escapes and fails the test
  }
}
