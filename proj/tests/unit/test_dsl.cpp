#include <gtest/gtest.h>

#include <random>

#include "golden.hpp"
#include "itin/dsl.hpp"

using namespace itin;
using namespace testing_support;

namespace {

const char* kDining = R"(total = 0
for act in allactivities(plan):
    if activity_type(act) in ["breakfast", "lunch", "dinner"]:
        total += activity_cost(act)
    if activity_type(act) == "attraction":
        total += 0
return total <= 1000
)";

std::string msg_of(const std::vector<dsl::Diagnostic>& d) {
  std::string s;
  for (const auto& x : d) s += x.format("t.dsl") + "\n";
  return s;
}

}  // namespace

TEST(DslParse, DiningLoopShape) {
  dsl::Program p = dsl::parse(kDining);
  ASSERT_EQ(p.body.size(), 3u);
  EXPECT_EQ(p.body[0]->kind, dsl::Stmt::Kind::assign);
  ASSERT_EQ(p.body[1]->kind, dsl::Stmt::Kind::for_in);
  EXPECT_EQ(p.body[1]->body.size(), 2u);
  EXPECT_EQ(p.body[1]->body[0]->kind, dsl::Stmt::Kind::if_chain);
  EXPECT_EQ(p.body[2]->kind, dsl::Stmt::Kind::ret);
  EXPECT_EQ(p.body[2]->expr->kind, dsl::Expr::Kind::compare);
}

TEST(DslParse, TrivialReturn) {
  dsl::Program p = dsl::parse("return True\n");
  ASSERT_EQ(p.body.size(), 1u);
  EXPECT_EQ(p.body[0]->expr->kind, dsl::Expr::Kind::boolean);
}

TEST(DslParse, DisallowedConstructs) {
  for (const char* src : {"while True: pass\n", "def f():\n    return 1\n", "import os\n",
                          "x = plan.itinerary\nreturn x\n", "return [a for a in b]\n",
                          "return 7 % 2\n"}) {
    try {
      dsl::parse(src);
      ADD_FAILURE() << "accepted: " << src;
    } catch (const dsl::SyntaxError& e) {
      EXPECT_GE(e.diag.pos.line, 1);
    }
  }
  try {
    dsl::parse("while True: pass\n");
  } catch (const dsl::SyntaxError& e) {
    EXPECT_NE(e.diag.message.find("construct not in DSL"), std::string::npos);
    EXPECT_EQ(e.diag.pos.line, 1);
    EXPECT_EQ(e.diag.pos.col, 1);
  }
}

TEST(DslParse, ErrorPositions) {
  try {
    dsl::parse("x = 1\ny = (2 +\nreturn x\n");
    FAIL();
  } catch (const dsl::SyntaxError& e) {
    EXPECT_EQ(e.diag.pos.line, 3);
  }
  try {
    dsl::parse("x = 1\n\treturn x\n");
    FAIL();
  } catch (const dsl::SyntaxError& e) {
    EXPECT_EQ(e.diag.pos.line, 2);
  }
  EXPECT_THROW(dsl::parse("x = (1 +\n"), dsl::SyntaxError);
  EXPECT_THROW(dsl::parse("x = (1\nreturn x\n"), dsl::SyntaxError);
  try {
    dsl::parse("x = 1\n  y = 2\nreturn x\n");
    FAIL();
  } catch (const dsl::SyntaxError& e) {
    EXPECT_EQ(e.diag.pos.line, 2);
  }
}

TEST(DslCheck, ArrivalTimeProgramClean) {
  const char* src = R"(arrived = "24:00"
for act in dayactivities(plan, 2):
    if activity_type(act) in ["train", "airplane"]:
        if intercity_transport_destination(act) == target_city(plan):
            arrived = activity_end_time(act)
return arrived <= "18:00"
)";
  EXPECT_EQ(msg_of(dsl::check_syntax(src)), "");
}

TEST(DslCheck, UnknownConceptHasHint) {
  auto d = dsl::check_syntax("c = 0\nfor a in allactivities(plan):\n    c += activty_cost(a)\nreturn c < 5\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].message.find("unknown concept 'activty_cost'"), std::string::npos);
  EXPECT_NE(d[0].hint.find("activity_cost"), std::string::npos);
  EXPECT_EQ(d[0].pos.line, 3);
}

TEST(DslCheck, UseBeforeAssign) {
  auto d = dsl::check_syntax("for a in allactivities(plan):\n    count += 1\nreturn count > 0\n");
  ASSERT_FALSE(d.empty());
  EXPECT_NE(d[0].message.find("'count' used before assignment"), std::string::npos);
}

TEST(DslCheck, DefiniteAssignment) {
  // assigned on only one branch
  EXPECT_FALSE(dsl::check_syntax("if day_count(plan) > 1:\n    x = 1\nreturn x\n").empty());
  // assigned on both branches
  EXPECT_TRUE(dsl::check_syntax("if day_count(plan) > 1:\n    x = 1\nelse:\n    x = 2\nreturn x\n").empty());
  // loop bodies may not run
  EXPECT_FALSE(dsl::check_syntax("for a in allactivities(plan):\n    y = 1\nreturn y\n").empty());
  // a returning branch does not need to assign
  EXPECT_TRUE(dsl::check_syntax("if day_count(plan) > 1:\n    return False\nelse:\n    z = 3\nreturn z > 1\n").empty());
}

TEST(DslCheck, ArityAndMissingReturn) {
  EXPECT_FALSE(dsl::check_syntax("return activity_cost()\n").empty());
  EXPECT_FALSE(dsl::check_syntax("return len(1, 2)\n").empty());
  EXPECT_FALSE(dsl::check_syntax("x = 1\n").empty());
  EXPECT_FALSE(dsl::check_syntax("if True:\n    return 1\n").empty());
}

TEST(DslCheck, NonBooleanConditionFlagged) {
  auto d = dsl::check_syntax("x = 0\nif day_count(plan):\n    x = 1\nreturn x\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].message.find("not a boolean"), std::string::npos);
}

TEST(DslCheck, DiagnosticFormat) {
  dsl::Diagnostic d{dsl::Severity::error, {3, 7}, "unknown concept 'x'", "did you mean 'y'?"};
  EXPECT_EQ(d.format("q.dsl"), "q.dsl:3:7: error: unknown concept 'x' (hint: did you mean 'y'?)");
  d.hint.clear();
  d.severity = dsl::Severity::warning;
  EXPECT_EQ(d.format("q.dsl"), "q.dsl:3:7: warning: unknown concept 'x'");
}

TEST(DslEval, BudgetOnHandSummedPlan) {
  Plan p;
  p.start_city = "Alpha";
  p.target_city = "Beta";
  DayPlan d;
  for (int c : {1500, 2000, 1000}) {
    Activity a;
    a.cost = Decimal(c);
    d.activities.push_back(a);
  }
  TransportLeg leg;
  leg.cost = Decimal(300);
  d.activities[1].transports.push_back(leg);
  p.itinerary.push_back(d);
  auto prog = dsl::parse(read_text(golden_dir() / "budget.dsl"));
  EXPECT_TRUE(dsl::evaluate(prog, p, nullptr).as_bool());  // 4800
  p.itinerary[0].activities[0].cost = Decimal(1701);
  EXPECT_FALSE(dsl::evaluate(prog, p, nullptr).as_bool());  // 5001
}

TEST(DslEval, EmptyAndSentinelCases) {
  Plan empty;
  empty.itinerary.push_back(DayPlan{});
  auto count = dsl::parse(read_text(golden_dir() / "attraction_count.dsl"));
  EXPECT_EQ(dsl::evaluate(count, empty, nullptr), Value(0));
  auto ratio = dsl::parse(read_text(golden_dir() / "food_cost_ratio.dsl"));
  EXPECT_EQ(dsl::evaluate(ratio, empty, nullptr), Value(-1));
}

TEST(DslEval, RuntimeErrors) {
  Plan p;
  EXPECT_THROW(dsl::evaluate(dsl::parse("return 1 / 0\n"), p, nullptr), dsl::EvalError);
  EXPECT_THROW(dsl::evaluate(dsl::parse("if 1:\n    return 1\nreturn 2\n"), p, nullptr), dsl::EvalError);
  EXPECT_THROW(dsl::evaluate(dsl::parse("return \"a\" < 1\n"), p, nullptr), dsl::EvalError);
  EXPECT_THROW(dsl::evaluate(dsl::parse("return [1][3]\n"), p, nullptr), dsl::EvalError);
  try {
    dsl::evaluate(dsl::parse("x = 2\nreturn x + \"s\"\n"), p, nullptr);
    FAIL();
  } catch (const dsl::EvalError& e) {
    EXPECT_EQ(e.pos.line, 2);
  }
}

TEST(DslEval, OperatorsAndBuiltins) {
  Plan p;
  auto ev = [&](const std::string& s) { return dsl::evaluate(dsl::parse(s), p, nullptr); };
  EXPECT_EQ(ev("return 1 < 2 < 3\n"), Value(true));
  EXPECT_EQ(ev("return 1 < 3 < 2\n"), Value(false));
  EXPECT_EQ(ev("return 7 / 2\n"), Value(Decimal::from_units(3'500'000)));
  EXPECT_EQ(ev("return -2 * 3 + 1\n"), Value(-5));
  EXPECT_EQ(ev("return len(union({1, 2}, {2, 3}))\n"), Value(3));
  EXPECT_EQ(ev("return inter({1, 2}, {2, 3}) == {2}\n"), Value(true));
  EXPECT_EQ(ev("return diff({1, 2}, {2, 3}) == {1}\n"), Value(true));
  EXPECT_EQ(ev("return \"ot\" in \"Hotpot\"\n"), Value(true));
  EXPECT_EQ(ev("return 4 not in [1, 2]\n"), Value(true));
  EXPECT_EQ(ev("return min(3, 1, 2) + max([4, 9]) + sum([1, 1]) + abs(-1)\n"), Value(13));
  EXPECT_EQ(ev("return 1 == \"1\"\n"), Value(false));
  EXPECT_EQ(ev("return None == None\n"), Value(true));
  EXPECT_EQ(ev("x = 3\nx -= 1\nx *= 5\nx /= 2\nreturn x\n"), Value(5));
  EXPECT_EQ(ev("return 1 if False else 2\n"), Value(2));
  EXPECT_EQ(ev("return True or 1 / 0 == 1\n"), Value(true));  // short circuit
}

TEST(DslExtract, PerConstraintOutcomes) {
  Plan p = beta_witness();
  std::vector<std::string> srcs = {"return day_count(plan) == 2\n",
                                   "return people_count(plan) == 5\n",
                                   "return start_city(plan) == \"Beta\"\n"};
  auto out = dsl::extract_constraints(srcs, p, &basic_sandbox());
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0].passed);
  EXPECT_TRUE(out[1].passed);
  EXPECT_FALSE(out[2].passed);
  EXPECT_TRUE(dsl::extract_constraints(std::vector<std::string>{}, p, nullptr).empty());

  auto bad = dsl::extract_constraints(std::vector<std::string>{"return 1 / 0 > 1\n", "return 3\n"}, p, nullptr);
  EXPECT_FALSE(bad[0].passed);
  ASSERT_FALSE(bad[0].diagnostics.empty());
  EXPECT_EQ(bad[0].diagnostics[0].severity, dsl::Severity::error);
  EXPECT_FALSE(bad[1].passed);
  ASSERT_FALSE(bad[1].diagnostics.empty());
  EXPECT_EQ(bad[1].diagnostics[0].severity, dsl::Severity::warning);
}

TEST(DslManifest, RoundTrip) {
  std::vector<dsl::ManifestBlock> blocks = {{"budget", "return True\n", 2}, {"cuisine", "x = 1\nreturn x == 1\n", 4}};
  std::string text = dsl::write_manifest(blocks);
  auto back = dsl::parse_manifest(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].name, "cuisine");
  EXPECT_EQ(back[1].source, blocks[1].source);
  EXPECT_EQ(back[1].first_line, 4);
  EXPECT_THROW(dsl::parse_manifest("stray\n--- a\nreturn True\n"), ParseError);
}

TEST(DslGolden, CorpusChecksClean) {
  for (const auto& g : golden_programs()) {
    EXPECT_EQ(msg_of(dsl::check_syntax(read_text(golden_dir() / g.file))), "") << g.file;
  }
}

TEST(DslGolden, MatchesOraclesOnGeneratedPlans) {
  std::mt19937_64 rng(20240611);
  for (const auto& g : golden_programs()) {
    auto prog = dsl::parse(read_text(golden_dir() / g.file));
    for (int i = 0; i < 20; ++i) {
      Plan p = random_plan(rng, i);
      Value got = dsl::evaluate(prog, p, &basic_sandbox());
      EXPECT_EQ(got, g.oracle(p)) << g.file << " plan " << i << " got " << got.repr()
                                  << " want " << g.oracle(p).repr();
    }
  }
}

// ---------------------------------------------------------------------------
// Round-trip property over generated programs.

namespace {

struct ProgGen {
  std::mt19937_64 rng;
  int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  std::string atom() {
    switch (uni(0, 5)) {
      case 0:
        return std::to_string(uni(0, 99));
      case 1:
        return "\"s" + std::to_string(uni(0, 9)) + "\"";
      case 2:
        return uni(0, 1) ? "True" : "False";
      case 3:
        return "day_count(plan)";
      case 4:
        return "[" + std::to_string(uni(0, 5)) + ", 2]";
      default:
        return "v" + std::to_string(uni(0, 2));
    }
  }
  std::string expr(int depth) {
    if (depth == 0) return atom();
    static const char* kOps[] = {"+", "-", "*", "/", "<", "<=", "==", "!=", "and", "or", "in"};
    switch (uni(0, 4)) {
      case 0:
        return "(" + expr(depth - 1) + " " + kOps[uni(0, 10)] + " " + expr(depth - 1) + ")";
      case 1:
        return "(not " + expr(depth - 1) + ")";
      case 2:
        return "(-" + expr(depth - 1) + ")";
      case 3:
        return "(" + expr(depth - 1) + " if " + expr(depth - 1) + " else " + expr(depth - 1) + ")";
      default:
        return expr(depth - 1) + " " + kOps[uni(0, 10)] + " " + atom();
    }
  }
  std::string block(int depth, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    std::string out = pad + "v0 = " + expr(2) + "\n";
    if (depth > 0 && uni(0, 1)) {
      out += pad + "for v1 in allactivities(plan):\n" + block(depth - 1, indent + 1);
    }
    if (depth > 0 && uni(0, 1)) {
      out += pad + "if " + expr(2) + ":\n" + block(depth - 1, indent + 1);
      if (uni(0, 1)) out += pad + "elif " + expr(1) + ":\n" + block(depth - 1, indent + 1);
      if (uni(0, 1)) out += pad + "else:\n" + block(depth - 1, indent + 1);
    }
    out += pad + "v2 " + (uni(0, 1) ? "+=" : "=") + " " + expr(2) + "\n";
    return out;
  }
};

}  // namespace

TEST(DslRoundTrip, PrettyPrintReparsesToSameAst) {
  ProgGen gen{std::mt19937_64(7)};
  for (int i = 0; i < 300; ++i) {
    std::string src = gen.block(2, 0) + "return " + gen.expr(3) + "\n";
    dsl::Program a = dsl::parse(src);
    std::string printed = dsl::pretty_print(a);
    dsl::Program b = dsl::parse(printed);
    ASSERT_TRUE(dsl::same_ast(a, b)) << src << "\n---\n" << printed;
    EXPECT_EQ(dsl::pretty_print(b), printed);
  }
  for (const auto& g : golden_programs()) {
    dsl::Program a = dsl::parse(read_text(golden_dir() / g.file));
    EXPECT_TRUE(dsl::same_ast(a, dsl::parse(dsl::pretty_print(a)))) << g.file;
  }
}

TEST(DslEval, PureAcrossRuns) {
  std::mt19937_64 rng(3);
  Plan p = random_plan(rng, 2);
  for (const auto& g : golden_programs()) {
    auto prog = dsl::parse(read_text(golden_dir() / g.file));
    EXPECT_EQ(dsl::evaluate(prog, p, &basic_sandbox()), dsl::evaluate(prog, p, &basic_sandbox()));
  }
}
