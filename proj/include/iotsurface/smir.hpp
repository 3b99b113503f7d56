#pragma once

// SMIR: a line-oriented, smali-like text IR for disassembled companion apps.
//
//   .class <Dotted>
//   .super <Dotted>
//   .method <name>(<arity>)
//     instruction lines...
//   .end method
//
// `#` starts a comment. A comment consisting of `@ui` marks the next
// `.method` as a UI entry point.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iotsurface {

struct Register {
  int index = 0;
  auto operator<=>(const Register&) const = default;
};

enum class ArithOp { Add, Sub, Mul, Div, Rem, And, Or, Xor, Shl, Shr, Ushr, Not };

std::string_view to_string(ArithOp op);

namespace insn {

struct Invoke {
  std::string owner;
  std::string name;
  int arity = 0;
  bool operator==(const Invoke&) const = default;
};

struct ConstString {
  Register reg;
  std::string value;
  bool operator==(const ConstString&) const = default;
};

struct ConstInt {
  Register reg;
  std::int64_t value = 0;
  bool operator==(const ConstInt&) const = default;
};

struct ConstBytes {
  Register reg;
  std::vector<std::uint8_t> value;
  bool operator==(const ConstBytes&) const = default;
};

struct Arith {
  ArithOp op = ArithOp::Add;
  std::vector<Register> regs;  // destination first
  bool operator==(const Arith&) const = default;
};

struct Move {
  Register dst;
  Register src;
  bool operator==(const Move&) const = default;
};

struct NewInstance {
  std::string owner;
  bool operator==(const NewInstance&) const = default;
};

struct Return {
  bool operator==(const Return&) const = default;
};

struct Nop {
  bool operator==(const Nop&) const = default;
};

struct Other {
  std::string mnemonic;
  bool operator==(const Other&) const = default;
};

}  // namespace insn

using Instruction = std::variant<insn::Invoke, insn::ConstString, insn::ConstInt,
                                 insn::ConstBytes, insn::Arith, insn::Move,
                                 insn::NewInstance, insn::Return, insn::Nop,
                                 insn::Other>;

/// True iff the instruction is one of the twelve arithmetic/bitwise ops.
bool is_arith_or_bitwise(const Instruction& instruction);

struct MethodDef {
  std::string owner;
  std::string name;
  int arity = 0;
  bool ui_marked = false;
  std::vector<Instruction> instructions;
  bool operator==(const MethodDef&) const = default;
};

struct AppClass {
  std::string name;
  std::string super_name;
  std::vector<MethodDef> methods;
  bool operator==(const AppClass&) const = default;
};

/// A parsed app. Immutable once built; the constructor enforces the
/// uniqueness and ownership invariants.
class Program {
 public:
  Program() = default;
  Program(std::string app_id, std::vector<AppClass> classes);

  const std::string& app_id() const { return app_id_; }
  const std::vector<AppClass>& classes() const { return classes_; }
  const AppClass* find_class(std::string_view name) const;
  const MethodDef* find_method(std::string_view owner, std::string_view name, int arity) const;

  bool operator==(const Program&) const = default;

 private:
  std::string app_id_;
  std::vector<AppClass> classes_;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string file, int line, std::string reason);
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string file_;
  int line_;
  std::string reason_;
};

struct SourceDocument {
  std::string name;
  std::string text;
};

Program parse_program(std::string app_id, const std::vector<SourceDocument>& sources);

/// Reads every `*.smir` file in `app_dir` (sorted by file name); the app id
/// is the directory name.
Program load_app_dir(const std::filesystem::path& app_dir);

/// Canonical SMIR text for one class; parse(render(p)) == p.
std::string render_class(const AppClass& cls);
std::string render_instruction(const Instruction& instruction);

}  // namespace iotsurface
