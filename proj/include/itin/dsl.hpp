#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itin/common.hpp"
#include "itin/decimal.hpp"
#include "itin/sandbox.hpp"
#include "itin/value.hpp"

namespace itin::dsl {

struct Pos {
  int line = 1;
  int col = 1;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  Pos pos;
  std::string message;
  std::string hint;  // empty when there is no suggestion

  /// `file:line:col: severity: message` plus ` (hint: ...)` when present.
  std::string format(std::string_view file) const;
};

/// Lexical or syntactic failure; carries the diagnostic.
struct SyntaxError : Error {
  Diagnostic diag;
  explicit SyntaxError(Diagnostic d) : Error(d.message), diag(std::move(d)) {}
};

/// Runtime failure (type mismatch, division by zero, bad index, ...).
struct EvalError : Error {
  Pos pos;
  EvalError(Pos p, const std::string& msg) : Error(msg), pos(p) {}
};

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Expr {
  enum class Kind {
    number,
    text,
    boolean,
    none,
    name,
    list,
    set,
    call,     // text = callee name
    index,    // args = {object, index}
    unary,    // text = "-" or "not"
    binary,   // text = operator, args = {lhs, rhs}
    compare,  // ops[i] joins args[i] and args[i+1]
    boolop,   // text = "and"/"or"
    ternary,  // args = {body, condition, orelse}
  };
  Kind kind = Kind::none;
  Pos pos;
  std::string text;
  Decimal number;
  bool flag = false;
  std::vector<std::string> ops;
  std::vector<ExprPtr> args;
};

struct Stmt {
  enum class Kind { assign, for_in, if_chain, ret };
  Kind kind = Kind::ret;
  Pos pos;
  std::string target;  // assign target / loop variable
  std::string op;      // "=", "+=", "-=", "*=", "/="
  ExprPtr expr;        // assign value, loop iterable, return value
  Block body;          // loop body
  std::vector<std::pair<ExprPtr, Block>> branches;  // if / elif
  std::optional<Block> orelse;
};

struct Program {
  Block body;
};

/// Throws SyntaxError on the first lexical or grammatical problem,
/// including constructs outside the language (loops other than for-in,
/// definitions, imports, method calls, ...).
Program parse(std::string_view source);

/// Canonical source: one statement per line, 4-space indentation.
std::string pretty_print(const Program& program);

/// Structural equality ignoring source positions.
bool same_ast(const Program& a, const Program& b);

/// Empty iff the program parses, every call names a known concept or
/// builtin with correct arity, every variable is assigned before use, and
/// the program always reaches a return.
std::vector<Diagnostic> check_syntax(std::string_view source);
std::vector<Diagnostic> check_program(const Program& program);

/// Evaluates the program with `plan` bound to the plan. Throws EvalError.
Value evaluate(const Program& program, const Plan& plan, const Sandbox* sandbox);

struct ConstraintOutcome {
  bool passed = false;
  std::optional<Value> value;
  std::vector<Diagnostic> diagnostics;
};

/// One outcome per source: non-boolean results and errors record false.
std::vector<ConstraintOutcome> extract_constraints(const std::vector<std::string>& sources,
                                                   const Plan& plan, const Sandbox* sandbox);
std::vector<ConstraintOutcome> extract_constraints(const std::vector<Program>& programs,
                                                   const Plan& plan, const Sandbox* sandbox);

/// Named constraint block of a manifest file. Blocks start with a line
/// `--- name`; text before the first header is ignored if blank.
struct ManifestBlock {
  std::string name;
  std::string source;
  int first_line = 1;  // line of the block's first source line in the file
};
std::vector<ManifestBlock> parse_manifest(std::string_view text);
std::string write_manifest(const std::vector<ManifestBlock>& blocks);

/// Builtin function names accepted alongside the concept functions.
const std::vector<std::string>& builtin_names();
/// Sets `*known` to whether `name` is a builtin; returns whether `n`
/// arguments are accepted.
bool builtin_arity_ok(std::string_view name, int n, bool* known);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace itin::dsl
