#include <algorithm>
#include <map>
#include <set>

#include "itin/concepts.hpp"
#include "itin/dsl.hpp"

namespace itin::dsl {

namespace {

enum class Ty { unknown, boolean, number, text, list, set };

const char* ty_name(Ty t) {
  switch (t) {
    case Ty::boolean:
      return "a boolean";
    case Ty::number:
      return "a number";
    case Ty::text:
      return "text";
    case Ty::list:
      return "a list";
    case Ty::set:
      return "a set";
    default:
      return "unknown";
  }
}

Ty concept_result(const std::string& name) {
  static const std::map<std::string, Ty> m = {
      {"day_count", Ty::number},
      {"people_count", Ty::number},
      {"start_city", Ty::text},
      {"target_city", Ty::text},
      {"allactivities", Ty::list},
      {"allactivities_count", Ty::number},
      {"dayactivities", Ty::list},
      {"activity_cost", Ty::number},
      {"activity_position", Ty::text},
      {"activity_price", Ty::number},
      {"activity_type", Ty::text},
      {"activity_tickets", Ty::number},
      {"activity_transports", Ty::list},
      {"activity_start_time", Ty::text},
      {"activity_end_time", Ty::text},
      {"activity_time", Ty::number},
      {"poi_recommend_time", Ty::number},
      {"poi_distance", Ty::number},
      {"innercity_transport_cost", Ty::number},
      {"innercity_transport_price", Ty::number},
      {"innercity_transport_distance", Ty::number},
      {"innercity_transport_time", Ty::number},
      {"metro_tickets", Ty::number},
      {"taxi_cars", Ty::number},
      {"room_count", Ty::number},
      {"room_type", Ty::number},
      {"restaurant_type", Ty::text},
      {"attraction_type", Ty::text},
      {"accommodation_type", Ty::text},
      {"innercity_transport_type", Ty::text},
      {"intercity_transport_type", Ty::text},
      {"innercity_transport_start_time", Ty::text},
      {"innercity_transport_end_time", Ty::text},
      {"intercity_transport_origin", Ty::text},
      {"intercity_transport_destination", Ty::text},
      {"len", Ty::number},
      {"abs", Ty::number},
      {"min", Ty::number},
      {"max", Ty::number},
      {"sum", Ty::number},
      {"union", Ty::set},
      {"uni", Ty::set},
      {"inter", Ty::set},
      {"diff", Ty::set},
      {"set", Ty::set},
      {"list", Ty::list},
  };
  auto canonical = resolve_concept(name);
  auto it = m.find(canonical ? *canonical : name);
  return it == m.end() ? Ty::unknown : it->second;
}

class Checker {
 public:
  std::vector<Diagnostic> run(const Program& prog) {
    collect_types(prog.body);
    std::set<std::string> assigned = {"plan"};
    block(prog.body, assigned);
    if (!always_returns(prog.body)) {
      Pos p = prog.body.empty() ? Pos{1, 1} : prog.body.back()->pos;
      add(Severity::error, p, "program can finish without reaching a return",
          "end the program with `return <expression>`");
    }
    std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return a.pos.line != b.pos.line ? a.pos.line < b.pos.line : a.pos.col < b.pos.col;
    });
    return std::move(diags_);
  }

 private:
  void add(Severity s, Pos p, std::string msg, std::string hint = "") {
    diags_.push_back({s, p, std::move(msg), std::move(hint)});
  }

  // Flow-insensitive variable typing: a variable has a type only when every
  // assignment agrees on it.
  void collect_types(const Block& b) {
    for (const auto& st : b) {
      switch (st->kind) {
        case Stmt::Kind::assign:
          merge(st->target, st->op == "=" ? infer(*st->expr) : Ty::number);
          break;
        case Stmt::Kind::for_in:
          merge(st->target, Ty::unknown);
          collect_types(st->body);
          break;
        case Stmt::Kind::if_chain:
          for (const auto& br : st->branches) collect_types(br.second);
          if (st->orelse) collect_types(*st->orelse);
          break;
        case Stmt::Kind::ret:
          break;
      }
    }
  }

  void merge(const std::string& var, Ty t) {
    auto it = var_types_.find(var);
    if (it == var_types_.end()) {
      var_types_[var] = t;
    } else if (it->second != t) {
      it->second = Ty::unknown;
    }
  }

  // Best-effort static type; used only for the no-truthiness check.
  Ty infer(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::number:
        return Ty::number;
      case Expr::Kind::text:
        return Ty::text;
      case Expr::Kind::boolean:
      case Expr::Kind::compare:
      case Expr::Kind::boolop:
        return Ty::boolean;
      case Expr::Kind::list:
        return Ty::list;
      case Expr::Kind::set:
        return Ty::set;
      case Expr::Kind::name: {
        auto it = var_types_.find(e.text);
        return it == var_types_.end() ? Ty::unknown : it->second;
      }
      case Expr::Kind::call:
        return concept_result(e.text);
      case Expr::Kind::unary:
        return e.text == "not" ? Ty::boolean : Ty::number;
      case Expr::Kind::binary: {
        Ty l = infer(*e.args[0]);
        Ty r = infer(*e.args[1]);
        if (e.text == "*" || e.text == "/") return Ty::number;
        if (l == r) return l;
        return Ty::unknown;
      }
      case Expr::Kind::ternary: {
        Ty a = infer(*e.args[0]);
        return a == infer(*e.args[2]) ? a : Ty::unknown;
      }
      default:
        return Ty::unknown;
    }
  }

  void condition(const Expr& e) {
    Ty t = infer(e);
    if (t != Ty::unknown && t != Ty::boolean) {
      add(Severity::error, e.pos, std::string("condition is ") + ty_name(t) + ", not a boolean",
          "values are not truthy; compare explicitly, e.g. `x > 0` or `x != \"\"`");
    }
  }

  void expr(const Expr& e, const std::set<std::string>& assigned) {
    switch (e.kind) {
      case Expr::Kind::name:
        if (!assigned.count(e.text) && !reported_.count(e.text)) {
          reported_.insert(e.text);
          std::string hint;
          if (!var_types_.count(e.text)) {
            hint = nearest(e.text, /*include_vars=*/true);
            if (!hint.empty()) hint = "did you mean '" + hint + "'?";
          }
          add(Severity::error, e.pos, "variable '" + e.text + "' used before assignment", hint);
        }
        return;
      case Expr::Kind::call:
        call(e);
        break;
      case Expr::Kind::unary:
        if (e.text == "not") condition(*e.args[0]);
        break;
      case Expr::Kind::boolop:
        condition(*e.args[0]);
        condition(*e.args[1]);
        break;
      case Expr::Kind::ternary:
        condition(*e.args[1]);
        break;
      default:
        break;
    }
    for (const auto& a : e.args) expr(*a, assigned);
  }

  void call(const Expr& e) {
    int n = static_cast<int>(e.args.size());
    bool builtin = false;
    bool ok = builtin_arity_ok(e.text, n, &builtin);
    if (builtin) {
      if (!ok) add(Severity::error, e.pos, "wrong number of arguments to '" + e.text + "'");
      return;
    }
    const ConceptInfo* info = find_concept(e.text);
    if (!info) {
      std::string hint = nearest(e.text, false);
      add(Severity::error, e.pos, "unknown concept '" + e.text + "'",
          hint.empty() ? "" : "did you mean '" + hint + "'?");
      return;
    }
    if (n < info->min_args || n > info->max_args) {
      std::string want = info->min_args == info->max_args
                             ? std::to_string(info->min_args)
                             : std::to_string(info->min_args) + " or " +
                                   std::to_string(info->max_args);
      add(Severity::error, e.pos,
          "'" + info->name + "' takes " + want + " argument(s), got " + std::to_string(n));
    }
  }

  std::string nearest(const std::string& name, bool include_vars) const {
    std::vector<std::string> pool;
    for (const auto& c : concept_table()) pool.push_back(c.name);
    for (const auto& b : builtin_names()) pool.push_back(b);
    if (include_vars) {
      for (const auto& [v, t] : var_types_) pool.push_back(v);
      pool.push_back("plan");
    }
    std::string best;
    std::size_t best_d = 0;
    for (const auto& cand : pool) {
      std::size_t d = edit_distance(name, cand);
      if (best.empty() || d < best_d) {
        best = cand;
        best_d = d;
      }
    }
    std::size_t limit = std::max<std::size_t>(2, name.size() / 3);
    return best_d <= limit ? best : "";
  }

  void block(const Block& b, std::set<std::string>& assigned) {
    for (const auto& st : b) stmt(*st, assigned);
  }

  void stmt(const Stmt& st, std::set<std::string>& assigned) {
    switch (st.kind) {
      case Stmt::Kind::assign:
        expr(*st.expr, assigned);
        if (st.target == "plan") {
          add(Severity::error, st.pos, "'plan' is predefined and cannot be reassigned");
        }
        if (st.op != "=" && !assigned.count(st.target) && !reported_.count(st.target)) {
          reported_.insert(st.target);
          add(Severity::error, st.pos, "variable '" + st.target + "' used before assignment",
              "initialise it first, e.g. `" + st.target + " = 0`");
        }
        assigned.insert(st.target);
        return;
      case Stmt::Kind::ret:
        expr(*st.expr, assigned);
        return;
      case Stmt::Kind::for_in: {
        expr(*st.expr, assigned);
        std::set<std::string> inner = assigned;
        inner.insert(st.target);
        block(st.body, inner);
        return;  // the body may run zero times
      }
      case Stmt::Kind::if_chain: {
        std::optional<std::set<std::string>> common;
        for (const auto& [cond, body] : st.branches) {
          condition(*cond);
          expr(*cond, assigned);
          std::set<std::string> inner = assigned;
          block(body, inner);
          meet(common, inner, always_returns(body));
        }
        if (st.orelse) {
          std::set<std::string> inner = assigned;
          block(*st.orelse, inner);
          meet(common, inner, always_returns(*st.orelse));
        } else {
          meet(common, assigned, false);
        }
        if (common) assigned = *common;
        return;
      }
    }
  }

  // Intersects branch results; branches that always return do not flow on.
  static void meet(std::optional<std::set<std::string>>& acc, const std::set<std::string>& s,
                   bool returns) {
    if (returns) return;
    if (!acc) {
      acc = s;
      return;
    }
    std::set<std::string> out;
    std::set_intersection(acc->begin(), acc->end(), s.begin(), s.end(),
                          std::inserter(out, out.begin()));
    acc = std::move(out);
  }

  static bool always_returns_stmt(const Stmt& st) {
    if (st.kind == Stmt::Kind::ret) return true;
    if (st.kind != Stmt::Kind::if_chain || !st.orelse) return false;
    for (const auto& br : st.branches) {
      if (!always_returns(br.second)) return false;
    }
    return always_returns(*st.orelse);
  }

  static bool always_returns(const Block& b) {
    for (const auto& st : b) {
      if (always_returns_stmt(*st)) return true;
    }
    return false;
  }

  std::map<std::string, Ty> var_types_;
  std::set<std::string> reported_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<Diagnostic> check_program(const Program& program) {
  Checker c;
  return c.run(program);
}

std::vector<Diagnostic> check_syntax(std::string_view source) {
  try {
    return check_program(parse(source));
  } catch (const SyntaxError& e) {
    return {e.diag};
  }
}

}  // namespace itin::dsl
