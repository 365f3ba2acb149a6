#include <cctype>
#include <map>

#include "itin/dsl.hpp"

namespace itin::dsl {

namespace {

enum class Tok { name, number, string, op, newline, indent, dedent, eof };

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

[[noreturn]] void fail(Pos pos, std::string message, std::string hint = "") {
  throw SyntaxError(Diagnostic{Severity::error, pos, std::move(message), std::move(hint)});
}

const std::map<std::string, std::string>& disallowed() {
  static const std::map<std::string, std::string> m = {
      {"while", "while loops"},          {"def", "function definitions"},
      {"lambda", "lambda expressions"},  {"import", "imports"},
      {"from", "imports"},               {"class", "class definitions"},
      {"try", "exception handling"},     {"except", "exception handling"},
      {"finally", "exception handling"}, {"raise", "exception handling"},
      {"with", "with blocks"},           {"yield", "generators"},
      {"global", "global declarations"}, {"nonlocal", "nonlocal declarations"},
      {"del", "del statements"},         {"assert", "assert statements"},
      {"pass", "pass statements"},       {"break", "break statements"},
      {"continue", "continue statements"}, {"async", "async code"},
      {"await", "async code"},           {"is", "identity comparison"},
  };
  return m;
}

[[noreturn]] void fail_construct(Pos pos, const std::string& what) {
  fail(pos, "construct not in DSL: " + what,
       "only assignments, for-in loops, if/elif/else and return are available");
}

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"for", "in", "if", "elif", "else", "return", "and",
                             "or",  "not", "True", "False", "None"};
  for (const char* k : kw) {
    if (s == k) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool at_line_start = true;
    while (i_ < src_.size()) {
      if (at_line_start && depth_ == 0) {
        if (!line_start()) continue;  // blank or comment line consumed
        at_line_start = false;
      }
      char c = src_[i_];
      if (c == '\n') {
        if (depth_ == 0) push(Tok::newline, "\n", here());
        advance();
        at_line_start = depth_ == 0;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      if (c == '\\') {
        Pos p = here();
        advance();
        while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\r')) advance();
        if (i_ < src_.size() && src_[i_] == '\n') {
          advance();
          continue;
        }
        fail(p, "unexpected character '\\'");
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_name();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && i_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string();
      } else {
        lex_op();
      }
    }
    // An unclosed bracket is left to the parser, which reports the first
    // token that cannot continue the expression.
    if (!tokens_.empty() && tokens_.back().kind != Tok::newline && tokens_.back().kind != Tok::dedent &&
        tokens_.back().kind != Tok::indent) {
      push(Tok::newline, "\n", here());
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(Tok::dedent, "", here());
    }
    push(Tok::eof, "", here());
    return std::move(tokens_);
  }

 private:
  Pos here() const { return {line_, col_}; }
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void push(Tok k, std::string text, Pos p) { tokens_.push_back({k, std::move(text), p}); }

  // Measures indentation and emits INDENT/DEDENT. Returns false when the
  // line is blank or a comment (it is then consumed entirely).
  bool line_start() {
    int width = 0;
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) {
      if (src_[i_] == '\t') fail(here(), "tab used for indentation", "indent with spaces");
      ++width;
      advance();
    }
    if (i_ < src_.size() && src_[i_] == '\r') advance();
    if (i_ >= src_.size()) return true;
    if (src_[i_] == '\n' || src_[i_] == '#') {
      while (i_ < src_.size() && src_[i_] != '\n') advance();
      if (i_ < src_.size()) advance();
      return false;
    }
    Pos p = here();
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(Tok::indent, "", p);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(Tok::dedent, "", p);
      }
      if (width != indents_.back()) fail(p, "unindent does not match any outer indentation level");
    }
    return true;
  }

  void lex_name() {
    Pos p = here();
    std::string s;
    while (i_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
      s += src_[i_];
      advance();
    }
    push(Tok::name, s, p);
  }

  void lex_number() {
    Pos p = here();
    std::string s;
    bool dot = false;
    while (i_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[i_])) || (src_[i_] == '.' && !dot))) {
      if (src_[i_] == '.') dot = true;
      s += src_[i_];
      advance();
    }
    if (i_ < src_.size() &&
        (std::isalpha(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
      fail(here(), "invalid numeric literal");
    }
    push(Tok::number, s, p);
  }

  void lex_string() {
    Pos p = here();
    char quote = src_[i_];
    advance();
    std::string s;
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') fail(p, "unterminated string literal");
      char c = src_[i_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (i_ >= src_.size()) fail(p, "unterminated string literal");
        char e = src_[i_];
        switch (e) {
          case 'n':
            s += '\n';
            break;
          case 't':
            s += '\t';
            break;
          case '\\':
          case '\'':
          case '"':
            s += e;
            break;
          default:
            s += '\\';
            s += e;
        }
        advance();
        continue;
      }
      s += c;
      advance();
    }
    push(Tok::string, s, p);
  }

  void lex_op() {
    Pos p = here();
    static const char* two[] = {"==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "**", "//"};
    if (i_ + 1 < src_.size()) {
      std::string pair(src_.substr(i_, 2));
      for (const char* t : two) {
        if (pair == t) {
          advance();
          advance();
          push(Tok::op, pair, p);
          return;
        }
      }
    }
    char c = src_[i_];
    static const std::string single = "()[]{},:.+-*/%<>=";
    if (single.find(c) == std::string::npos) {
      fail(p, std::string("unexpected character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) fail(p, std::string("unmatched '") + c + "'");
      --depth_;
    }
    advance();
    push(Tok::op, std::string(1, c), p);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Program program() {
    Program prog;
    while (peek().kind == Tok::newline) ++k_;
    while (peek().kind != Tok::eof) {
      if (peek().kind == Tok::indent) fail(peek().pos, "unexpected indent");
      statement(prog.body);
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = std::min(k_ + ahead, t_.size() - 1);
    return t_[j];
  }
  const Token& next() {
    const Token& tok = t_[k_];
    if (k_ + 1 < t_.size()) ++k_;
    return tok;
  }
  bool is_op(const char* op, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::op && peek(ahead).text == op;
  }
  bool is_name(const char* n, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::name && peek(ahead).text == n;
  }
  static std::string describe(const Token& tok) {
    switch (tok.kind) {
      case Tok::newline:
        return "end of line";
      case Tok::indent:
        return "indent";
      case Tok::dedent:
        return "dedent";
      case Tok::eof:
        return "end of input";
      case Tok::string:
        return "string literal";
      default:
        return "'" + tok.text + "'";
    }
  }
  void expect_op(const char* op, const char* hint = "") {
    if (!is_op(op)) {
      fail(peek().pos, std::string("expected '") + op + "', found " + describe(peek()), hint);
    }
    next();
  }
  void expect_newline() {
    if (peek().kind != Tok::newline) {
      fail(peek().pos, "expected end of line, found " + describe(peek()));
    }
    next();
  }
  void check_disallowed(const Token& tok) {
    if (tok.kind != Tok::name) return;
    auto it = disallowed().find(tok.text);
    if (it != disallowed().end()) fail_construct(tok.pos, it->second);
  }

  void statement(Block& out) {
    const Token& tok = peek();
    check_disallowed(tok);
    if (is_name("for")) {
      out.push_back(for_stmt());
    } else if (is_name("if")) {
      out.push_back(if_stmt());
    } else if (is_name("elif") || is_name("else")) {
      fail(tok.pos, "'" + tok.text + "' without a matching 'if'");
    } else {
      out.push_back(simple_stmt());
      expect_newline();
    }
  }

  StmtPtr simple_stmt() {
    const Token& tok = peek();
    check_disallowed(tok);
    if (is_name("return")) {
      Pos p = next().pos;
      Stmt s;
      s.kind = Stmt::Kind::ret;
      s.pos = p;
      if (peek().kind == Tok::newline) fail(peek().pos, "return needs a value");
      s.expr = expression();
      if (is_op(",")) fail_construct(peek().pos, "tuples");
      return std::make_shared<const Stmt>(std::move(s));
    }
    if (tok.kind == Tok::name && !is_keyword(tok.text)) {
      static const char* assign_ops[] = {"=", "+=", "-=", "*=", "/="};
      for (const char* op : assign_ops) {
        if (is_op(op, 1)) {
          Stmt s;
          s.kind = Stmt::Kind::assign;
          s.pos = tok.pos;
          s.target = tok.text;
          next();
          s.op = next().text;
          s.expr = expression();
          if (is_op(",")) fail_construct(peek().pos, "tuples");
          if (is_op("=")) fail_construct(peek().pos, "chained assignment");
          return std::make_shared<const Stmt>(std::move(s));
        }
      }
      if (is_op(",", 1)) fail_construct(peek(1).pos, "tuple unpacking");
    }
    if (is_op("**=", 1) || is_op("%", 1)) fail_construct(peek(1).pos, "this operator");
    Pos p = tok.pos;
    ExprPtr e = expression();
    if (is_op("=")) fail(peek().pos, "only plain variable names can be assigned to");
    fail(p, "expression statement has no effect", "assign the value to a variable or return it");
    (void)e;
  }

  Block suite() {
    expect_op(":", "block headers end with ':'");
    Block body;
    if (peek().kind != Tok::newline) {
      // Inline body: `if cond: count += 1`.
      body.push_back(simple_stmt());
      expect_newline();
      return body;
    }
    next();
    if (peek().kind != Tok::indent) fail(peek().pos, "expected an indented block");
    next();
    while (peek().kind != Tok::dedent && peek().kind != Tok::eof) statement(body);
    if (peek().kind == Tok::dedent) next();
    return body;
  }

  StmtPtr for_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::for_in;
    s.pos = next().pos;
    const Token& var = peek();
    if (var.kind != Tok::name || is_keyword(var.text)) {
      fail(var.pos, "expected a loop variable name after 'for'");
    }
    s.target = var.text;
    next();
    if (is_op(",")) fail_construct(peek().pos, "tuple unpacking");
    if (!is_name("in")) fail(peek().pos, "expected 'in' after the loop variable");
    next();
    s.expr = expression();
    s.body = suite();
    return std::make_shared<const Stmt>(std::move(s));
  }

  StmtPtr if_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::if_chain;
    s.pos = next().pos;
    ExprPtr cond = expression();
    s.branches.emplace_back(cond, suite());
    while (is_name("elif")) {
      next();
      ExprPtr c = expression();
      s.branches.emplace_back(c, suite());
    }
    if (is_name("else")) {
      next();
      s.orelse = suite();
    }
    return std::make_shared<const Stmt>(std::move(s));
  }

  ExprPtr expression() {
    check_disallowed(peek());
    ExprPtr body = or_expr();
    if (is_name("if")) {
      Pos p = next().pos;
      ExprPtr cond = or_expr();
      if (!is_name("else")) fail(peek().pos, "conditional expression needs 'else'");
      next();
      ExprPtr orelse = expression();
      Expr e;
      e.kind = Expr::Kind::ternary;
      e.pos = p;
      e.args = {body, cond, orelse};
      return make(std::move(e));
    }
    return body;
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (is_name("or")) {
      Pos p = next().pos;
      Expr e;
      e.kind = Expr::Kind::boolop;
      e.pos = p;
      e.text = "or";
      e.args = {lhs, and_expr()};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (is_name("and")) {
      Pos p = next().pos;
      Expr e;
      e.kind = Expr::Kind::boolop;
      e.pos = p;
      e.text = "and";
      e.args = {lhs, not_expr()};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (is_name("not")) {
      Pos p = next().pos;
      Expr e;
      e.kind = Expr::Kind::unary;
      e.pos = p;
      e.text = "not";
      e.args = {not_expr()};
      return make(std::move(e));
    }
    return comparison();
  }

  std::optional<std::string> compare_op() {
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : ops) {
      if (is_op(op)) return std::string(op);
    }
    if (is_name("in")) return std::string("in");
    if (is_name("not") && is_name("in", 1)) return std::string("not in");
    if (is_name("is")) fail_construct(peek().pos, "identity comparison");
    return std::nullopt;
  }

  ExprPtr comparison() {
    ExprPtr first = arith();
    auto op = compare_op();
    if (!op) return first;
    Expr e;
    e.kind = Expr::Kind::compare;
    e.pos = peek().pos;
    e.args.push_back(first);
    while (op) {
      next();
      if (*op == "not in") next();
      e.ops.push_back(*op);
      e.args.push_back(arith());
      op = compare_op();
    }
    return make(std::move(e));
  }

  ExprPtr arith() {
    ExprPtr lhs = term();
    while (is_op("+") || is_op("-")) {
      const Token& tok = next();
      Expr e;
      e.kind = Expr::Kind::binary;
      e.pos = tok.pos;
      e.text = tok.text;
      e.args = {lhs, term()};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (is_op("*") || is_op("/") || is_op("%") || is_op("//") || is_op("**")) {
      const Token& tok = next();
      if (tok.text != "*" && tok.text != "/") {
        fail_construct(tok.pos, "operator '" + tok.text + "'");
      }
      Expr e;
      e.kind = Expr::Kind::binary;
      e.pos = tok.pos;
      e.text = tok.text;
      e.args = {lhs, factor()};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr factor() {
    if (is_op("-")) {
      Pos p = next().pos;
      Expr e;
      e.kind = Expr::Kind::unary;
      e.pos = p;
      e.text = "-";
      e.args = {factor()};
      return make(std::move(e));
    }
    if (is_op("+")) fail_construct(peek().pos, "unary '+'");
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr base = atom();
    while (true) {
      if (is_op("(")) {
        Pos p = peek().pos;
        if (base->kind != Expr::Kind::name) fail(p, "only named functions can be called");
        next();
        Expr e;
        e.kind = Expr::Kind::call;
        e.pos = base->pos;
        e.text = base->text;
        if (!is_op(")")) {
          while (true) {
            if (peek().kind == Tok::name && is_op("=", 1)) {
              fail_construct(peek().pos, "keyword arguments");
            }
            e.args.push_back(expression());
            if (is_name("for")) fail_construct(peek().pos, "comprehensions");
            if (is_op(",")) {
              next();
              if (is_op(")")) break;
              continue;
            }
            break;
          }
        }
        expect_op(")");
        base = make(std::move(e));
      } else if (is_op("[")) {
        Pos p = next().pos;
        ExprPtr idx = expression();
        if (is_op(":")) fail_construct(peek().pos, "slicing");
        expect_op("]");
        Expr e;
        e.kind = Expr::Kind::index;
        e.pos = p;
        e.args = {base, idx};
        base = make(std::move(e));
      } else if (is_op(".")) {
        fail_construct(peek().pos, "method calls and attribute access");
      } else {
        return base;
      }
    }
  }

  std::vector<ExprPtr> sequence(const char* close) {
    std::vector<ExprPtr> items;
    while (!is_op(close)) {
      items.push_back(expression());
      if (is_name("for")) fail_construct(peek().pos, "comprehensions");
      if (is_op(":")) fail_construct(peek().pos, "dictionaries");
      if (is_op(",")) {
        next();
        continue;
      }
      break;
    }
    expect_op(close);
    return items;
  }

  ExprPtr atom() {
    const Token& tok = peek();
    Expr e;
    e.pos = tok.pos;
    switch (tok.kind) {
      case Tok::number:
        next();
        e.kind = Expr::Kind::number;
        e.number = Decimal::parse(tok.text);
        return make(std::move(e));
      case Tok::string:
        next();
        e.kind = Expr::Kind::text;
        e.text = tok.text;
        return make(std::move(e));
      case Tok::name:
        check_disallowed(tok);
        if (tok.text == "True" || tok.text == "False") {
          next();
          e.kind = Expr::Kind::boolean;
          e.flag = tok.text == "True";
          return make(std::move(e));
        }
        if (tok.text == "None") {
          next();
          e.kind = Expr::Kind::none;
          return make(std::move(e));
        }
        if (is_keyword(tok.text)) fail(tok.pos, "unexpected keyword '" + tok.text + "'");
        next();
        e.kind = Expr::Kind::name;
        e.text = tok.text;
        return make(std::move(e));
      case Tok::op:
        if (tok.text == "(") {
          next();
          ExprPtr inner = expression();
          if (is_op(",")) fail_construct(peek().pos, "tuples");
          expect_op(")");
          return inner;
        }
        if (tok.text == "[") {
          next();
          e.kind = Expr::Kind::list;
          e.args = sequence("]");
          return make(std::move(e));
        }
        if (tok.text == "{") {
          next();
          if (is_op("}")) fail_construct(tok.pos, "dictionaries");
          e.kind = Expr::Kind::set;
          e.args = sequence("}");
          return make(std::move(e));
        }
        break;
      default:
        break;
    }
    fail(tok.pos, "expected an expression, found " + describe(tok));
  }

  std::vector<Token> t_;
  std::size_t k_ = 0;
};

}  // namespace

Program parse(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.program();
}

std::string Diagnostic::format(std::string_view file) const {
  std::string out = std::string(file) + ":" + std::to_string(pos.line) + ":" +
                    std::to_string(pos.col) + ": " +
                    (severity == Severity::error ? "error" : "warning") + ": " + message;
  if (!hint.empty()) out += " (hint: " + hint + ")";
  return out;
}

}  // namespace itin::dsl
