#include <sstream>

#include "itin/dsl.hpp"

namespace itin::dsl {

namespace {

// Binding strength, loosest first. Matches the parser's grammar levels.
enum Prec {
  kTernary = 1,
  kOr = 2,
  kAnd = 3,
  kNot = 4,
  kCompare = 5,
  kSum = 6,
  kProduct = 7,
  kUnary = 8,
  kPostfix = 9,
  kAtom = 10,
};

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::ternary:
      return kTernary;
    case Expr::Kind::boolop:
      return e.text == "or" ? kOr : kAnd;
    case Expr::Kind::unary:
      return e.text == "not" ? kNot : kUnary;
    case Expr::Kind::compare:
      return kCompare;
    case Expr::Kind::binary:
      return (e.text == "+" || e.text == "-") ? kSum : kProduct;
    case Expr::Kind::call:
    case Expr::Kind::index:
      return kPostfix;
    default:
      return kAtom;
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  return out + "\"";
}

std::string show(const Expr& e, int min_prec);

std::string join(const std::vector<ExprPtr>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += show(*items[i], kTernary);
  }
  return out;
}

std::string show_raw(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number:
      return e.number.to_string();
    case Expr::Kind::text:
      return quote(e.text);
    case Expr::Kind::boolean:
      return e.flag ? "True" : "False";
    case Expr::Kind::none:
      return "None";
    case Expr::Kind::name:
      return e.text;
    case Expr::Kind::list:
      return "[" + join(e.args) + "]";
    case Expr::Kind::set:
      return "{" + join(e.args) + "}";
    case Expr::Kind::call:
      return e.text + "(" + join(e.args) + ")";
    case Expr::Kind::index:
      return show(*e.args[0], kPostfix) + "[" + show(*e.args[1], kTernary) + "]";
    case Expr::Kind::unary:
      if (e.text == "not") return "not " + show(*e.args[0], kNot);
      return "-" + show(*e.args[0], kUnary);
    case Expr::Kind::binary: {
      int p = prec_of(e);
      return show(*e.args[0], p) + " " + e.text + " " + show(*e.args[1], p + 1);
    }
    case Expr::Kind::compare: {
      std::string out = show(*e.args[0], kCompare + 1);
      for (std::size_t i = 0; i < e.ops.size(); ++i) {
        out += " " + e.ops[i] + " " + show(*e.args[i + 1], kCompare + 1);
      }
      return out;
    }
    case Expr::Kind::boolop: {
      int p = prec_of(e);
      return show(*e.args[0], p) + " " + e.text + " " + show(*e.args[1], p + 1);
    }
    case Expr::Kind::ternary:
      return show(*e.args[0], kOr) + " if " + show(*e.args[1], kOr) + " else " +
             show(*e.args[2], kTernary);
  }
  return "";
}

std::string show(const Expr& e, int min_prec) {
  std::string s = show_raw(e);
  if (prec_of(e) < min_prec) return "(" + s + ")";
  return s;
}

void print_block(const Block& block, int depth, std::ostringstream& out) {
  std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& st : block) {
    switch (st->kind) {
      case Stmt::Kind::assign:
        out << pad << st->target << " " << st->op << " " << show(*st->expr, kTernary) << "\n";
        break;
      case Stmt::Kind::ret:
        out << pad << "return " << show(*st->expr, kTernary) << "\n";
        break;
      case Stmt::Kind::for_in:
        out << pad << "for " << st->target << " in " << show(*st->expr, kTernary) << ":\n";
        print_block(st->body, depth + 1, out);
        break;
      case Stmt::Kind::if_chain:
        for (std::size_t i = 0; i < st->branches.size(); ++i) {
          out << pad << (i == 0 ? "if " : "elif ") << show(*st->branches[i].first, kTernary)
              << ":\n";
          print_block(st->branches[i].second, depth + 1, out);
        }
        if (st->orelse) {
          out << pad << "else:\n";
          print_block(*st->orelse, depth + 1, out);
        }
        break;
    }
  }
}

bool same_expr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.number != b.number || a.flag != b.flag ||
      a.ops != b.ops || a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_expr(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool same_block(const Block& a, const Block& b);

bool same_stmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.target != b.target || a.op != b.op) return false;
  if (bool(a.expr) != bool(b.expr) || (a.expr && !same_expr(*a.expr, *b.expr))) return false;
  if (!same_block(a.body, b.body)) return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    if (!same_expr(*a.branches[i].first, *b.branches[i].first) ||
        !same_block(a.branches[i].second, b.branches[i].second)) {
      return false;
    }
  }
  if (a.orelse.has_value() != b.orelse.has_value()) return false;
  return !a.orelse || same_block(*a.orelse, *b.orelse);
}

bool same_block(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_stmt(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

std::string pretty_print(const Program& program) {
  std::ostringstream out;
  print_block(program.body, 0, out);
  return out.str();
}

bool same_ast(const Program& a, const Program& b) { return same_block(a.body, b.body); }

std::vector<ManifestBlock> parse_manifest(std::string_view text) {
  std::vector<ManifestBlock> blocks;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::string preamble;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("--- ", 0) == 0 || line == "---") {
      ManifestBlock b;
      b.name = trim(line.substr(3));
      b.first_line = lineno + 1;
      blocks.push_back(std::move(b));
      continue;
    }
    if (blocks.empty()) {
      preamble += line;
      continue;
    }
    blocks.back().source += line + "\n";
  }
  if (!trim(preamble).empty()) {
    throw ParseError("manifest: text before the first '--- name' header");
  }
  return blocks;
}

std::string write_manifest(const std::vector<ManifestBlock>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    out += "--- " + b.name + "\n" + b.source;
    if (!b.source.empty() && b.source.back() != '\n') out += "\n";
  }
  return out;
}

}  // namespace itin::dsl
