#include <algorithm>
#include <map>

#include "itin/concepts.hpp"
#include "itin/dsl.hpp"

namespace itin::dsl {

namespace {

struct Builtin {
  const char* name;
  int min_args;
  int max_args;  // -1: unbounded
};

constexpr Builtin kBuiltins[] = {
    {"len", 1, 1},   {"union", 2, 2}, {"uni", 2, 2}, {"inter", 2, 2}, {"diff", 2, 2},
    {"set", 0, 1},   {"list", 0, 1},  {"abs", 1, 1}, {"min", 1, -1},  {"max", 1, -1},
    {"sum", 1, 1},
};

const Builtin* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) return &b;
  }
  return nullptr;
}

[[noreturn]] void eval_fail(Pos pos, const std::string& msg) { throw EvalError(pos, msg); }

const char* kind_str(const Value& v) { return kind_name(v.kind()).data(); }

// Control-flow signal for `return`.
struct Returned {
  Value value;
};

class Interpreter {
 public:
  Interpreter(const Plan& plan, const Sandbox* sb) : sb_(sb) { env_["plan"] = Value(&plan); }

  Value run(const Program& prog) {
    try {
      exec_block(prog.body);
    } catch (Returned& r) {
      return std::move(r.value);
    }
    eval_fail({1, 1}, "program finished without returning a value");
  }

 private:
  void exec_block(const Block& block) {
    for (const auto& st : block) exec(*st);
  }

  void exec(const Stmt& st) {
    switch (st.kind) {
      case Stmt::Kind::assign: {
        Value rhs = eval(*st.expr);
        if (st.op == "=") {
          env_[st.target] = std::move(rhs);
          return;
        }
        auto it = env_.find(st.target);
        if (it == env_.end()) eval_fail(st.pos, "variable '" + st.target + "' used before assignment");
        std::string op = st.op.substr(0, 1);
        it->second = binary(op, it->second, rhs, st.pos);
        return;
      }
      case Stmt::Kind::ret:
        throw Returned{eval(*st.expr)};
      case Stmt::Kind::for_in: {
        Value coll = eval(*st.expr);
        if (!coll.is(Value::Kind::list) && !coll.is(Value::Kind::set)) {
          eval_fail(st.expr->pos, std::string("cannot iterate over ") + kind_str(coll));
        }
        for (const auto& item : coll.items()) {
          env_[st.target] = item;
          exec_block(st.body);
        }
        return;
      }
      case Stmt::Kind::if_chain:
        for (const auto& [cond, body] : st.branches) {
          if (truth(*cond)) {
            exec_block(body);
            return;
          }
        }
        if (st.orelse) exec_block(*st.orelse);
        return;
    }
  }

  bool truth(const Expr& e) {
    Value v = eval(e);
    if (!v.is(Value::Kind::boolean)) {
      eval_fail(e.pos, std::string("condition must be a boolean, got ") + kind_str(v));
    }
    return v.as_bool();
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::number:
        return Value(e.number);
      case Expr::Kind::text:
        return Value(e.text);
      case Expr::Kind::boolean:
        return Value(e.flag);
      case Expr::Kind::none:
        return Value();
      case Expr::Kind::name: {
        auto it = env_.find(e.text);
        if (it == env_.end()) eval_fail(e.pos, "variable '" + e.text + "' used before assignment");
        return it->second;
      }
      case Expr::Kind::list: {
        ValueList items;
        for (const auto& a : e.args) items.push_back(eval(*a));
        return Value::list(std::move(items));
      }
      case Expr::Kind::set: {
        ValueList items;
        for (const auto& a : e.args) {
          Value v = eval(*a);
          if (!v.is_scalar()) eval_fail(a->pos, std::string("set elements must be scalars, got ") + kind_str(v));
          items.push_back(std::move(v));
        }
        return Value::set(std::move(items));
      }
      case Expr::Kind::call:
        return call(e);
      case Expr::Kind::index: {
        Value obj = eval(*e.args[0]);
        Value idx = eval(*e.args[1]);
        if (!idx.is(Value::Kind::number) || !idx.as_number().is_integer()) {
          eval_fail(e.args[1]->pos, "index must be an integer");
        }
        std::int64_t i = idx.as_number().floor();
        if (obj.is(Value::Kind::list)) {
          auto n = static_cast<std::int64_t>(obj.items().size());
          if (i < 0) i += n;
          if (i < 0 || i >= n) eval_fail(e.pos, "list index out of range");
          return obj.items()[static_cast<std::size_t>(i)];
        }
        if (obj.is(Value::Kind::text)) {
          auto n = static_cast<std::int64_t>(obj.as_text().size());
          if (i < 0) i += n;
          if (i < 0 || i >= n) eval_fail(e.pos, "string index out of range");
          return Value(obj.as_text().substr(static_cast<std::size_t>(i), 1));
        }
        eval_fail(e.pos, std::string("cannot index ") + kind_str(obj));
      }
      case Expr::Kind::unary: {
        if (e.text == "not") return Value(!truth(*e.args[0]));
        Value v = eval(*e.args[0]);
        if (!v.is(Value::Kind::number)) eval_fail(e.pos, std::string("cannot negate ") + kind_str(v));
        return Value(-v.as_number());
      }
      case Expr::Kind::binary:
        return binary(e.text, eval(*e.args[0]), eval(*e.args[1]), e.pos);
      case Expr::Kind::compare: {
        Value lhs = eval(*e.args[0]);
        for (std::size_t i = 0; i < e.ops.size(); ++i) {
          Value rhs = eval(*e.args[i + 1]);
          if (!compare(e.ops[i], lhs, rhs, e.args[i + 1]->pos)) return Value(false);
          lhs = std::move(rhs);
        }
        return Value(true);
      }
      case Expr::Kind::boolop: {
        bool left = truth(*e.args[0]);
        if (e.text == "and" && !left) return Value(false);
        if (e.text == "or" && left) return Value(true);
        return Value(truth(*e.args[1]));
      }
      case Expr::Kind::ternary:
        return truth(*e.args[1]) ? eval(*e.args[0]) : eval(*e.args[2]);
    }
    eval_fail(e.pos, "unknown expression");
  }

  Value binary(const std::string& op, const Value& a, const Value& b, Pos pos) {
    if (a.is(Value::Kind::number) && b.is(Value::Kind::number)) {
      Decimal x = a.as_number(), y = b.as_number();
      if (op == "+") return Value(x + y);
      if (op == "-") return Value(x - y);
      if (op == "*") return Value(x * y);
      if (op == "/") {
        if (y == Decimal(0)) eval_fail(pos, "division by zero");
        return Value(x / y);
      }
    }
    if (op == "+" && a.is(Value::Kind::text) && b.is(Value::Kind::text)) {
      return Value(a.as_text() + b.as_text());
    }
    if (op == "+" && a.is(Value::Kind::list) && b.is(Value::Kind::list)) {
      ValueList items = a.items();
      items.insert(items.end(), b.items().begin(), b.items().end());
      return Value::list(std::move(items));
    }
    if (op == "-" && a.is(Value::Kind::set) && b.is(Value::Kind::set)) return set_op("diff", a, b);
    eval_fail(pos, "unsupported operands for '" + op + "': " + kind_str(a) + " and " + kind_str(b));
  }

  bool compare(const std::string& op, const Value& a, const Value& b, Pos pos) {
    if (op == "==") return a == b;
    if (op == "!=") return !(a == b);
    if (op == "in" || op == "not in") {
      bool found = false;
      if (b.is(Value::Kind::list) || b.is(Value::Kind::set)) {
        found = std::find(b.items().begin(), b.items().end(), a) != b.items().end();
      } else if (b.is(Value::Kind::text) && a.is(Value::Kind::text)) {
        found = b.as_text().find(a.as_text()) != std::string::npos;
      } else {
        eval_fail(pos, std::string("'in' needs a list, set or text on the right, got ") + kind_str(b));
      }
      return op == "in" ? found : !found;
    }
    int c = 0;
    if (a.is(Value::Kind::number) && b.is(Value::Kind::number)) {
      c = a.as_number() < b.as_number() ? -1 : (b.as_number() < a.as_number() ? 1 : 0);
    } else if (a.is(Value::Kind::text) && b.is(Value::Kind::text)) {
      c = a.as_text().compare(b.as_text());
      c = c < 0 ? -1 : (c > 0 ? 1 : 0);
    } else {
      eval_fail(pos, "cannot order " + std::string(kind_str(a)) + " and " + kind_str(b));
    }
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    return c >= 0;
  }

  static ValueList as_elements(const Value& v, Pos pos, const char* fn) {
    if (v.is(Value::Kind::list) || v.is(Value::Kind::set)) {
      for (const auto& item : v.items()) {
        if (!item.is_scalar()) {
          eval_fail(pos, std::string(fn) + ": set elements must be scalars, got " + kind_str(item));
        }
      }
      return v.items();
    }
    eval_fail(pos, std::string(fn) + " needs a list or set, got " + kind_str(v));
  }

  static Value set_op(const std::string& fn, const Value& a, const Value& b, Pos pos = {}) {
    Value sa = Value::set(as_elements(a, pos, fn.c_str()));
    Value sb = Value::set(as_elements(b, pos, fn.c_str()));
    ValueList out;
    const auto& x = sa.items();
    const auto& y = sb.items();
    if (fn == "union" || fn == "uni") {
      std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    } else if (fn == "inter") {
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    } else {
      std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    }
    return Value::set(std::move(out));
  }

  Value call(const Expr& e) {
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    if (const Builtin* b = find_builtin(e.text)) {
      int n = static_cast<int>(args.size());
      if (n < b->min_args || (b->max_args >= 0 && n > b->max_args)) {
        eval_fail(e.pos, e.text + ": wrong number of arguments");
      }
      return builtin(e, args);
    }
    try {
      return call_concept(e.text, args, sb_);
    } catch (const NameError& ex) {
      eval_fail(e.pos, ex.what());
    } catch (const ArityError& ex) {
      eval_fail(e.pos, ex.what());
    } catch (const ConceptTypeError& ex) {
      eval_fail(e.pos, ex.what());
    } catch (const Error& ex) {
      eval_fail(e.pos, e.text + ": " + ex.what());
    }
  }

  Value builtin(const Expr& e, const std::vector<Value>& args) {
    const std::string& fn = e.text;
    if (fn == "len") {
      const Value& v = args[0];
      if (v.is(Value::Kind::list) || v.is(Value::Kind::set)) {
        return Value(static_cast<int>(v.items().size()));
      }
      if (v.is(Value::Kind::text)) return Value(static_cast<int>(v.as_text().size()));
      eval_fail(e.pos, std::string("len needs a list, set or text, got ") + kind_str(v));
    }
    if (fn == "union" || fn == "uni" || fn == "inter" || fn == "diff") {
      return set_op(fn, args[0], args[1], e.pos);
    }
    if (fn == "set") {
      if (args.empty()) return Value::set({});
      return Value::set(as_elements(args[0], e.pos, "set"));
    }
    if (fn == "list") {
      if (args.empty()) return Value::list({});
      const Value& v = args[0];
      if (!v.is(Value::Kind::list) && !v.is(Value::Kind::set)) {
        eval_fail(e.pos, std::string("list needs a list or set, got ") + kind_str(v));
      }
      return Value::list(v.items());
    }
    if (fn == "abs") {
      if (!args[0].is(Value::Kind::number)) eval_fail(e.pos, "abs needs a number");
      Decimal d = args[0].as_number();
      return Value(d < Decimal(0) ? -d : d);
    }
    if (fn == "min" || fn == "max" || fn == "sum") {
      ValueList nums = args;
      if (args.size() == 1) {
        if (!args[0].is(Value::Kind::list) && !args[0].is(Value::Kind::set)) {
          eval_fail(e.pos, fn + " needs numbers or one list of numbers");
        }
        nums = args[0].items();
      }
      for (const auto& v : nums) {
        if (!v.is(Value::Kind::number)) eval_fail(e.pos, fn + " needs numbers, got " + kind_str(v));
      }
      if (fn == "sum") {
        Decimal s;
        for (const auto& v : nums) s += v.as_number();
        return Value(s);
      }
      if (nums.empty()) eval_fail(e.pos, fn + " of an empty sequence");
      Decimal best = nums[0].as_number();
      for (const auto& v : nums) {
        Decimal d = v.as_number();
        if (fn == "min" ? d < best : best < d) best = d;
      }
      return Value(best);
    }
    eval_fail(e.pos, "unknown builtin " + fn);
  }

  const Sandbox* sb_;
  std::map<std::string, Value> env_;
};

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& b : kBuiltins) out.emplace_back(b.name);
    return out;
  }();
  return names;
}

bool builtin_arity_ok(std::string_view name, int n, bool* known) {
  const Builtin* b = find_builtin(name);
  *known = b != nullptr;
  if (!b) return false;
  return n >= b->min_args && (b->max_args < 0 || n <= b->max_args);
}

Value evaluate(const Program& program, const Plan& plan, const Sandbox* sandbox) {
  Interpreter interp(plan, sandbox);
  return interp.run(program);
}

std::vector<ConstraintOutcome> extract_constraints(const std::vector<Program>& programs,
                                                   const Plan& plan, const Sandbox* sandbox) {
  std::vector<ConstraintOutcome> out;
  for (const auto& prog : programs) {
    ConstraintOutcome o;
    try {
      Value v = evaluate(prog, plan, sandbox);
      if (v.is(Value::Kind::boolean)) {
        o.passed = v.as_bool();
      } else {
        o.diagnostics.push_back({Severity::warning, {1, 1},
                                 std::string("constraint returned ") + kind_name(v.kind()).data() +
                                     ", counted as false",
                                 ""});
      }
      o.value = std::move(v);
    } catch (const EvalError& ex) {
      o.diagnostics.push_back({Severity::error, ex.pos, ex.what(), ""});
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<ConstraintOutcome> extract_constraints(const std::vector<std::string>& sources,
                                                   const Plan& plan, const Sandbox* sandbox) {
  std::vector<ConstraintOutcome> out;
  for (const auto& src : sources) {
    try {
      Program prog = parse(src);
      auto r = extract_constraints(std::vector<Program>{prog}, plan, sandbox);
      out.push_back(std::move(r[0]));
    } catch (const SyntaxError& ex) {
      ConstraintOutcome o;
      o.diagnostics.push_back(ex.diag);
      out.push_back(std::move(o));
    }
  }
  return out;
}

}  // namespace itin::dsl
