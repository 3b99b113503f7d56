#include "iotsurface/smir.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

namespace iotsurface {

namespace {

constexpr std::array<std::pair<std::string_view, ArithOp>, 12> kArithOps{{
    {"add", ArithOp::Add},
    {"sub", ArithOp::Sub},
    {"mul", ArithOp::Mul},
    {"div", ArithOp::Div},
    {"rem", ArithOp::Rem},
    {"and", ArithOp::And},
    {"or", ArithOp::Or},
    {"xor", ArithOp::Xor},
    {"shl", ArithOp::Shl},
    {"shr", ArithOp::Shr},
    {"ushr", ArithOp::Ushr},
    {"not", ArithOp::Not},
}};

std::optional<ArithOp> arith_op_from(std::string_view token) {
  for (const auto& [name, op] : kArithOps) {
    if (name == token) return op;
  }
  return std::nullopt;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_dotted(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  char prev = '\0';
  for (char c : s) {
    if (c == '.') {
      if (prev == '.') return false;
    } else if (!is_ident_char(c)) {
      return false;
    }
    prev = c;
  }
  return true;
}

bool is_method_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return is_ident_char(c) || c == '<' || c == '>'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits a raw line into code and comment, honoring string literals.
std::pair<std::string_view, std::string_view> split_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return {line.substr(0, i), line.substr(i + 1)};
    }
  }
  return {line, {}};
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<Register> parse_register(std::string_view token) {
  if (token.size() < 2 || token.front() != 'r') return std::nullopt;
  auto digits = token.substr(1);
  if (!std::all_of(digits.begin(), digits.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  auto k = parse_int<int>(digits);
  if (!k) return std::nullopt;
  return Register{*k};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

class Parser {
 public:
  Parser(std::string file, std::set<std::string>& seen_classes)
      : file_(std::move(file)), seen_classes_(seen_classes) {}

  void run(std::string_view text, std::vector<AppClass>& out) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no_;
      handle_line(line, out);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (method_) fail("unterminated method '" + method_->name + "'");
    if (pending_ui_) fail("dangling @ui marker");
    flush_class(out);
  }

 private:
  [[noreturn]] void fail(const std::string& reason) const {
    throw SyntaxError(file_, line_no_, reason);
  }

  void flush_class(std::vector<AppClass>& out) {
    if (cls_) {
      out.push_back(std::move(*cls_));
      cls_.reset();
    }
  }

  void handle_line(std::string_view raw, std::vector<AppClass>& out) {
    auto [code_part, comment_part] = split_comment(raw);
    auto code = trim(code_part);
    bool ui_comment = trim(comment_part) == "@ui";
    if (code.empty()) {
      if (ui_comment) pending_ui_ = true;
      return;
    }
    if (pending_ui_ && !code.starts_with(".method")) fail("@ui marker must precede a .method");

    if (code.front() == '.') {
      handle_directive(code, ui_comment, out);
      return;
    }
    if (!method_) fail("instruction outside of a method");
    method_->instructions.push_back(parse_instruction(code));
  }

  void handle_directive(std::string_view code, bool ui_comment, std::vector<AppClass>& out) {
    auto tokens = split_ws(code);
    const auto& head = tokens.front();
    if (head == ".class") {
      if (method_) fail(".class inside a method");
      if (tokens.size() != 2 || !is_dotted(tokens[1])) fail("malformed .class directive");
      flush_class(out);
      std::string name(tokens[1]);
      if (!seen_classes_.insert(name).second) fail("duplicate class '" + name + "'");
      cls_ = AppClass{name, "java.lang.Object", {}};
      super_seen_ = false;
    } else if (head == ".super") {
      if (!cls_ || method_ || !cls_->methods.empty()) fail(".super outside of a class header");
      if (super_seen_) fail("duplicate .super");
      if (tokens.size() != 2 || !is_dotted(tokens[1])) fail("malformed .super directive");
      cls_->super_name = std::string(tokens[1]);
      super_seen_ = true;
    } else if (head == ".method") {
      if (!cls_) fail(".method outside of a class");
      if (method_) fail("nested .method");
      start_method(code.substr(head.size()), ui_comment || pending_ui_);
      pending_ui_ = false;
    } else if (head == ".end") {
      if (tokens.size() != 2 || tokens[1] != "method") fail("malformed .end directive");
      if (!method_) fail(".end method without .method");
      for (const auto& m : cls_->methods) {
        if (m.name == method_->name && m.arity == method_->arity) {
          fail("duplicate method '" + m.name + "(" + std::to_string(m.arity) + ")'");
        }
      }
      cls_->methods.push_back(std::move(*method_));
      method_.reset();
    } else {
      fail("unknown directive '" + std::string(head) + "'");
    }
  }

  void start_method(std::string_view rest, bool ui) {
    rest = trim(rest);
    auto open = rest.find('(');
    if (open == std::string_view::npos || rest.back() != ')') fail("malformed .method directive");
    auto name = rest.substr(0, open);
    auto arity_text = rest.substr(open + 1, rest.size() - open - 2);
    if (!is_method_name(name)) fail("malformed method name");
    auto arity = parse_int<int>(arity_text);
    if (!arity || *arity < 0) fail("arity must be a non-negative integer");
    method_ = MethodDef{cls_->name, std::string(name), *arity, ui, {}};
  }

  Register reg(std::string_view token) const {
    auto r = parse_register(token);
    if (!r) fail("bad register '" + std::string(token) + "'");
    return *r;
  }

  Instruction parse_instruction(std::string_view code) const {
    auto tokens = split_ws(code);
    auto op = tokens.front();
    auto expect = [&](std::size_t n) {
      if (tokens.size() != n) fail("wrong operand count for '" + std::string(op) + "'");
    };

    if (op == "invoke") {
      expect(4);
      if (!is_dotted(tokens[1])) fail("bad owner in invoke");
      if (!is_method_name(tokens[2])) fail("bad method name in invoke");
      auto arity = parse_int<int>(tokens[3]);
      if (!arity || *arity < 0) fail("bad arity in invoke");
      return insn::Invoke{std::string(tokens[1]), std::string(tokens[2]), *arity};
    }
    if (op == "const-string") {
      if (tokens.size() < 3) fail("const-string needs a register and a literal");
      auto r = reg(tokens[1]);
      auto after_reg = static_cast<std::size_t>(tokens[1].data() - code.data()) + tokens[1].size();
      auto literal = trim(code.substr(after_reg));
      return insn::ConstString{r, parse_literal(literal)};
    }
    if (op == "const-int") {
      expect(3);
      auto value = parse_int<std::int64_t>(tokens[2]);
      if (!value) fail("bad integer literal");
      return insn::ConstInt{reg(tokens[1]), *value};
    }
    if (op == "const-bytes") {
      if (tokens.size() < 3) fail("const-bytes needs at least one byte");
      std::vector<std::uint8_t> bytes;
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        auto t = tokens[i];
        if (t.size() % 2 != 0) fail("odd hex digit count");
        for (std::size_t j = 0; j < t.size(); j += 2) {
          int hi = hex_value(t[j]);
          int lo = hex_value(t[j + 1]);
          if (hi < 0 || lo < 0) fail("bad hex digit");
          bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        }
      }
      return insn::ConstBytes{reg(tokens[1]), std::move(bytes)};
    }
    if (auto arith = arith_op_from(op)) {
      std::size_t operands = tokens.size() - 1;
      bool ok = *arith == ArithOp::Not ? operands == 2 : (operands == 2 || operands == 3);
      if (!ok) fail("wrong operand count for '" + std::string(op) + "'");
      insn::Arith a{*arith, {}};
      for (std::size_t i = 1; i < tokens.size(); ++i) a.regs.push_back(reg(tokens[i]));
      return a;
    }
    if (op == "move") {
      expect(3);
      return insn::Move{reg(tokens[1]), reg(tokens[2])};
    }
    if (op == "new-instance") {
      expect(2);
      if (!is_dotted(tokens[1])) fail("bad owner in new-instance");
      return insn::NewInstance{std::string(tokens[1])};
    }
    if (op == "return") {
      expect(1);
      return insn::Return{};
    }
    if (op == "nop") {
      expect(1);
      return insn::Nop{};
    }
    if (op == "other") {
      expect(2);
      return insn::Other{std::string(tokens[1])};
    }
    fail("unknown instruction '" + std::string(op) + "'");
  }

  std::string parse_literal(std::string_view s) const {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') fail("string literal must be quoted");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      char c = s[i];
      if (c == '"') fail("unescaped quote in string literal");
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (i + 2 >= s.size()) fail("dangling escape in string literal");
      char e = s[++i];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  std::string file_;
  std::set<std::string>& seen_classes_;
  int line_no_ = 0;
  std::optional<AppClass> cls_;
  std::optional<MethodDef> method_;
  bool super_seen_ = false;
  bool pending_ui_ = false;
};

}  // namespace

std::string_view to_string(ArithOp op) {
  for (const auto& [name, value] : kArithOps) {
    if (value == op) return name;
  }
  return "?";
}

bool is_arith_or_bitwise(const Instruction& instruction) {
  return std::holds_alternative<insn::Arith>(instruction);
}

Program::Program(std::string app_id, std::vector<AppClass> classes)
    : app_id_(std::move(app_id)), classes_(std::move(classes)) {
  std::set<std::string_view> names;
  for (const auto& cls : classes_) {
    if (!names.insert(cls.name).second) {
      throw std::invalid_argument("duplicate class " + cls.name);
    }
    std::set<std::pair<std::string_view, int>> keys;
    for (const auto& m : cls.methods) {
      if (m.owner != cls.name) throw std::invalid_argument("method owner mismatch in " + cls.name);
      if (m.arity < 0) throw std::invalid_argument("negative arity in " + cls.name);
      if (!keys.insert({m.name, m.arity}).second) {
        throw std::invalid_argument("duplicate method " + cls.name + "." + m.name);
      }
    }
  }
}

const AppClass* Program::find_class(std::string_view name) const {
  for (const auto& cls : classes_) {
    if (cls.name == name) return &cls;
  }
  return nullptr;
}

const MethodDef* Program::find_method(std::string_view owner, std::string_view name,
                                      int arity) const {
  const auto* cls = find_class(owner);
  if (!cls) return nullptr;
  for (const auto& m : cls->methods) {
    if (m.name == name && m.arity == arity) return &m;
  }
  return nullptr;
}

SyntaxError::SyntaxError(std::string file, int line, std::string reason)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + reason),
      file_(std::move(file)),
      line_(line),
      reason_(std::move(reason)) {}

Program parse_program(std::string app_id, const std::vector<SourceDocument>& sources) {
  std::vector<AppClass> classes;
  std::set<std::string> seen;
  for (const auto& doc : sources) {
    Parser(doc.name, seen).run(doc.text, classes);
  }
  return Program(std::move(app_id), std::move(classes));
}

Program load_app_dir(const std::filesystem::path& app_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(app_dir)) {
    throw std::runtime_error("not a directory: " + app_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(app_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".smir") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<SourceDocument> docs;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    docs.push_back({f.filename().string(), buf.str()});
  }
  auto dir = app_dir;
  if (!dir.has_filename()) dir = dir.parent_path();
  return parse_program(dir.filename().string(), docs);
}

std::string render_instruction(const Instruction& instruction) {
  auto r = [](Register reg) { return "r" + std::to_string(reg.index); };
  return std::visit(
      [&](const auto& i) -> std::string {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, insn::Invoke>) {
          return "invoke " + i.owner + " " + i.name + " " + std::to_string(i.arity);
        } else if constexpr (std::is_same_v<T, insn::ConstString>) {
          return "const-string " + r(i.reg) + " " + escape_string(i.value);
        } else if constexpr (std::is_same_v<T, insn::ConstInt>) {
          return "const-int " + r(i.reg) + " " + std::to_string(i.value);
        } else if constexpr (std::is_same_v<T, insn::ConstBytes>) {
          static constexpr char kHex[] = "0123456789abcdef";
          std::string out = "const-bytes " + r(i.reg);
          for (auto b : i.value) {
            out += ' ';
            out += kHex[b >> 4];
            out += kHex[b & 0xF];
          }
          return out;
        } else if constexpr (std::is_same_v<T, insn::Arith>) {
          std::string out(to_string(i.op));
          for (auto reg : i.regs) out += " " + r(reg);
          return out;
        } else if constexpr (std::is_same_v<T, insn::Move>) {
          return "move " + r(i.dst) + " " + r(i.src);
        } else if constexpr (std::is_same_v<T, insn::NewInstance>) {
          return "new-instance " + i.owner;
        } else if constexpr (std::is_same_v<T, insn::Return>) {
          return "return";
        } else if constexpr (std::is_same_v<T, insn::Nop>) {
          return "nop";
        } else {
          return "other " + i.mnemonic;
        }
      },
      instruction);
}

std::string render_class(const AppClass& cls) {
  std::ostringstream out;
  out << ".class " << cls.name << "\n.super " << cls.super_name << "\n";
  for (const auto& m : cls.methods) {
    out << "\n";
    if (m.ui_marked) out << "# @ui\n";
    out << ".method " << m.name << "(" << m.arity << ")\n";
    for (const auto& i : m.instructions) out << "  " << render_instruction(i) << "\n";
    out << ".end method\n";
  }
  return out.str();
}

}  // namespace iotsurface
