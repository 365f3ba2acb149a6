// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are pinned below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enumerate.hpp"
#include "golden.hpp"
#include "itin/cli.hpp"
#include "itin/dsl.hpp"
#include "itin/evaluator.hpp"
#include "itin/milp.hpp"
#include "itin/planner.hpp"
#include "itin/querygen.hpp"
#include "milp_toys.hpp"
#include "mock_llm.hpp"
#include "support.hpp"

using namespace itin;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricSecs = 5.0;
constexpr double kPlanSecsPerQuery = 10.0;
constexpr double kMilpSecs = 10.0;
constexpr double kSizeBand = 0.20;
constexpr double kRefVariables = 36000;
constexpr double kRefConstraints = 320000;
constexpr int kEnumLimit = 200;
constexpr int kMicroPoisPerKind = 6;

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("itin_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<dsl::Program> parse_all(const std::vector<std::string>& src) {
  std::vector<dsl::Program> out;
  for (const auto& s : src) out.push_back(dsl::parse(s));
  return out;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// 1, 2: metrics

EvalReport synthetic(bool delivered, int env_passed, std::vector<bool> logical) {
  EvalReport r;
  r.delivered = delivered;
  r.logical = std::move(logical);
  r.env = EnvReport::all_failed();
  if (delivered) {
    for (int i = 0; i < env_passed; ++i) r.env.rules[static_cast<std::size_t>(i)].passed = true;
  }
  return r;
}

// Brute-force counts straight from the reports.
struct Counts {
  std::int64_t n = 0, dr = 0, env_sum = 0, env_all = 0, lp = 0, lall = 0, cond = 0, fin = 0,
               total_c = 0;
};

Counts brute(const std::vector<EvalReport>& rs) {
  Counts o;
  o.n = static_cast<std::int64_t>(rs.size());
  for (const auto& r : rs) {
    o.total_c += static_cast<std::int64_t>(r.logical.size());
    if (!r.delivered) continue;
    ++o.dr;
    int e = 0;
    for (const auto& x : r.env.rules) e += x.passed;
    o.env_sum += e;
    bool env_ok = e == 25;
    int l = 0;
    for (bool b : r.logical) l += b;
    bool lok = l == static_cast<int>(r.logical.size());
    o.lp += l;
    o.lall += lok;
    o.env_all += env_ok;
    if (env_ok) o.cond += l;
    o.fin += env_ok && lok;
  }
  return o;
}

bool frac_is(const Fraction& f, std::int64_t n, std::int64_t d) {
  return static_cast<__int128>(f.num) * d == static_cast<__int128>(n) * f.den;
}

Verdict metric_formulas() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(200);
  int exact = 0, epr_chain = 0, lpr_chain = 0, fpr_chain = 0, clpr_chain = 0;
  const int sets = 200;
  for (int trial = 0; trial < sets; ++trial) {
    std::vector<EvalReport> rs;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      int k = static_cast<int>(rng() % 5);
      std::vector<bool> l;
      for (int j = 0; j < k; ++j) l.push_back(rng() % 3 != 0);
      int env = rng() % 2 ? 25 : static_cast<int>(rng() % 26);
      rs.push_back(synthetic(rng() % 6 != 0, env, l));
    }
    Counts o = brute(rs);
    MetricSummary s = score(rs);
    bool ok = frac_is(s.dr, o.dr, o.n) && frac_is(s.epr_micro, o.env_sum, 25 * o.n) &&
              frac_is(s.epr_macro, o.env_all, o.n) && frac_is(s.lpr_macro, o.lall, o.n) &&
              frac_is(s.fpr, o.fin, o.n);
    if (o.total_c > 0) {
      ok = ok && frac_is(s.lpr_micro, o.lp, o.total_c) && frac_is(s.c_lpr, o.cond, o.total_c);
    } else {
      ok = ok && s.lpr_micro == s.lpr_macro && s.c_lpr == s.fpr;
    }
    exact += ok;
    epr_chain += s.epr_macro <= s.epr_micro;
    lpr_chain += s.lpr_macro <= s.lpr_micro;
    fpr_chain += s.fpr <= s.epr_macro && s.fpr <= s.lpr_macro;
    clpr_chain += s.c_lpr <= s.lpr_micro;
  }
  double el = secs_since(t0);
  Verdict v;
  v.pass = exact == sets && epr_chain == sets && lpr_chain == sets && fpr_chain == sets &&
           clpr_chain == sets && el < kMetricSecs;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "exact %d/%d; EPR macro<=micro %d/%d; LPR macro<=micro %d/%d; FPR<=macros %d/%d; "
                "C-LPR<=LPR_micro %d/%d; %.2fs",
                exact, sets, epr_chain, sets, lpr_chain, sets, fpr_chain, sets, clpr_chain, sets, el);
  v.detail = buf;
  return v;
}

Verdict clpr_example() {
  MetricSummary s =
      score({synthetic(true, 25, {true, true, false}), synthetic(true, 24, {true, true, true})});
  Verdict v;
  v.pass = s.c_lpr == Fraction::of(1, 3);
  v.detail = "C-LPR = " + s.c_lpr.to_string() + " (want 1/3)";
  return v;
}

// ---------------------------------------------------------------------------
// 3, 4: DSL corpus and env rules

Verdict golden_corpus() {
  std::mt19937_64 rng(20240611);
  std::vector<Plan> plans;
  for (int i = 0; i < 20; ++i) plans.push_back(random_plan(rng, i));
  int checked = 0, equal = 0, sentinels = 0;
  std::set<std::string> sentinel_files;
  std::string first_bad;
  for (const auto& g : golden_programs()) {
    auto prog = dsl::parse(read_text(golden_dir() / g.file));
    for (std::size_t i = 0; i < plans.size(); ++i) {
      ++checked;
      Value want = g.oracle(plans[i]);
      Value got = dsl::evaluate(prog, plans[i], &basic_sandbox());
      if (got == want) {
        ++equal;
      } else if (first_bad.empty()) {
        first_bad = g.file + " plan " + std::to_string(i) + " got " + got.repr() + " want " + want.repr();
      }
      if (want == Value(-1)) {
        ++sentinels;
        sentinel_files.insert(g.file);
      }
    }
  }
  // Every program whose listing has a -1 branch must have hit it.
  const std::set<std::string> need = {"transport_time.dsl", "restaurant_transport_time.dsl",
                                       "food_cost_ratio.dsl", "poi_distance.dsl"};
  bool covered = std::includes(sentinel_files.begin(), sentinel_files.end(), need.begin(), need.end());
  Verdict v;
  v.pass = equal == checked && checked == 7 * 20 && covered;
  v.detail = std::to_string(equal) + "/" + std::to_string(checked) + " equal; " +
             std::to_string(sentinels) + " sentinel results across " +
             std::to_string(sentinel_files.size()) + " programs";
  if (!first_bad.empty()) v.detail += "; first mismatch " + first_bad;
  return v;
}

Verdict env_rules_flip() {
  auto cases = env_violation_cases();
  std::set<std::string> covered;
  int exact = 0;
  std::string bad;
  bool witness_ok = validate_env(beta_witness(), basic_sandbox()).overall();
  for (const auto& c : cases) {
    EnvReport r = validate_env(c.plan, basic_sandbox());
    if (r.failed_ids() == std::vector<std::string>{c.rule}) {
      ++exact;
    } else if (bad.empty()) {
      bad = c.rule;
    }
    covered.insert(c.rule);
  }
  Verdict v;
  v.pass = witness_ok && cases.size() == 25 && covered.size() == 25 && exact == 25;
  v.detail = std::to_string(exact) + "/" + std::to_string(cases.size()) + " cases flip only their rule; " +
             std::to_string(covered.size()) + " rules covered; witness " + (witness_ok ? "clean" : "dirty");
  if (!bad.empty()) v.detail += "; first off-target " + bad;
  return v;
}

// ---------------------------------------------------------------------------
// 5, 6: planner

Verdict planner_completeness() {
  const Sandbox& sb = micro_sandbox();
  int biggest = 0;
  for (const auto& city : sb.city_list()) {
    const auto& db = sb.city(city);
    biggest = std::max({biggest, static_cast<int>(db.attractions.size()),
                        static_cast<int>(db.restaurants.size()), static_cast<int>(db.hotels.size())});
  }
  GenConfig cfg;
  cfg.max_days = 2;
  cfg.max_people = 3;
  int sampled = 0, agree = 0, overflow = 0, certified = 0, full = 0;
  double worst = 0;
  std::string bad;
  for (std::uint64_t seed = 0; certified < 50 && seed < 2000; ++seed) {
    QuerySkeleton s = sample_skeleton(sb, Difficulty::easy, seed, cfg);
    ++sampled;
    Certification c = certify(s, sb, cfg.search);
    auto dsl = skeleton_to_dsl(s);
    auto q = QueryContext::make(s.start_city, s.target_city, s.days, s.people, dsl);
    EnumResult e = enumerate_plans(q, sb, SearchConfig{}, kEnumLimit);
    overflow += e.overflow;
    bool accepted = c.query.has_value();
    if (accepted == (e.full_pass > 0) && !e.overflow) {
      ++agree;
    } else if (bad.empty()) {
      bad = "seed " + std::to_string(seed);
    }
    if (!accepted) continue;
    ++certified;
    SearchConfig run;
    run.budget_secs = kPlanSecsPerQuery;
    HeuristicRanker ranker;
    SearchOutcome o = dfs_search(q, sb, ranker, run);
    worst = std::max(worst, o.elapsed_secs);
    full += o.status == SearchStatus::full_pass && o.elapsed_secs < kPlanSecsPerQuery;
  }
  Verdict v;
  v.pass = biggest <= kMicroPoisPerKind && certified == 50 && full == 50 && agree == sampled &&
           overflow == 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d/%d full_pass (worst %.3fs); accept/reject agrees with enumeration on %d/%d "
                "skeletons; %d overflowed; max %d POIs/kind",
                full, certified, worst, agree, sampled, overflow, biggest);
  v.detail = buf;
  if (!bad.empty()) v.detail += "; first disagreement " + bad;
  return v;
}

SearchState beta_day_state(const QueryContext& q, const std::string& at, ClockTime clock) {
  SearchState s = initial_state(q);
  auto c = candidates_for(NextStep::outbound, s, q, basic_sandbox());
  s = *schedule_activity(s, c.front(), NextStep::outbound, q, basic_sandbox(), SearchConfig{});
  s.position = at;
  s.clock = clock;
  return s;
}

Verdict planner_rules() {
  const Sandbox& sb = basic_sandbox();
  SearchConfig cfg;
  auto q = QueryContext::make("Alpha", "Beta", 2, 2, {});
  int lunch = 0, minutes = 0;
  for (int m = 10 * 60 + 30; m <= 12 * 60 + 30; ++m, ++minutes) {
    lunch += next_activity_type(beta_day_state(q, "Beta Station", ClockTime(m)), q, sb, cfg) ==
             NextStep::lunch;
  }
  // After 22:00 with meals done: straight to the hotel.
  SearchState late = beta_day_state(q, "Night Noodles", ClockTime::hm(22, 30));
  late.meal_done = {true, true, true};
  bool hotel_late = next_activity_type(late, q, sb, cfg) == NextStep::accommodation;
  // Earlier, the hotel wins only once nothing nearby is open and unvisited.
  SearchState eve = beta_day_state(q, "Night Noodles", ClockTime::hm(21, 30));
  eve.meal_done = {true, true, true};
  eve.visited = {"River Walk"};
  bool hotel_none_open = next_activity_type(eve, q, sb, cfg) == NextStep::accommodation;
  eve.visited.clear();
  bool attraction_open = next_activity_type(eve, q, sb, cfg) == NextStep::attraction;

  SearchState s = beta_day_state(q, "Old Fort", ClockTime::hm(16, 45));
  Candidate fort;
  fort.name = "Old Fort";
  fort.price = Decimal(60);
  auto n = schedule_activity(s, fort, NextStep::attraction, q, sb, cfg);
  std::string span = "none";
  if (n) {
    const Activity& a = n->plan.itinerary[0].activities.back();
    span = *a.start_time + "->" + *a.end_time;
  }
  Verdict v;
  v.pass = lunch == minutes && hotel_late && hotel_none_open && attraction_open && span == "16:45->17:30";
  v.detail = "lunch " + std::to_string(lunch) + "/" + std::to_string(minutes) +
             " minutes in 10:30-12:30; accommodation after 22:00 " + (hotel_late ? "yes" : "no") +
             ", with nothing open " + (hotel_none_open ? "yes" : "no") + "; truncation " + span;
  return v;
}

// ---------------------------------------------------------------------------
// 7, 8: MILP

std::int64_t lp_rows(const std::string& lp) {
  auto from = lp.find("Subject To\n"), to = lp.find("Bounds\n");
  if (to == std::string::npos) to = lp.find("Binaries\n");
  std::istringstream in(lp.substr(from, to - from));
  std::int64_t rows = 0;
  for (std::string l; std::getline(in, l);) {
    if (l.size() > 1 && l[0] == ' ' && l[1] != ' ') ++rows;
  }
  return rows;
}

Verdict milp_sizes() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(31);
  int exact = 0;
  for (int i = 0; i < 3; ++i) {
    Toy t = random_toy(rng);
    MilpModel m = build_model(t.slice, t.params, basic_sandbox());
    SizeReport r = count_sizes(t.params);
    bool ok = static_cast<std::int64_t>(m.vars.size()) == r.total_variables &&
              static_cast<std::int64_t>(m.rows.size()) == r.total_constraints &&
              lp_rows(emit_lp(m)) == r.total_constraints;
    for (std::size_t k = 0; k < kMilpCategories; ++k) {
      ok = ok && m.count_rows(static_cast<MilpCategory>(k)) == r.by_category[k].constraints;
    }
    exact += ok;
  }
  MilpParams p;
  SizeReport r = count_sizes(p);
  Sandbox sb = downsample_sandbox(scratch("downsample"));
  auto [slice, clipped] = select_slice(sb, "Home", "Synth", p);
  MilpModel m = build_model(slice, clipped, sb);
  std::string lp = emit_lp(m);
  std::int64_t emitted = lp_rows(lp);
  double el = secs_since(t0);
  bool full_slice = clipped.totalNum() == 22 && clipped.goNum == 100 && clipped.backNum == 100;
  auto within = [](double x, double ref) { return std::abs(x - ref) <= kSizeBand * ref; };
  Verdict v;
  v.pass = exact == 3 && full_slice && r.y_variables == 22 * 22 * 3 * 24 && r.y_variables == 34848 &&
           static_cast<std::int64_t>(m.vars.size()) == r.total_variables && emitted == r.total_constraints &&
           within(static_cast<double>(r.total_variables), kRefVariables) &&
           within(static_cast<double>(r.total_constraints), kRefConstraints) && el < kMilpSecs;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%d/3 toys exact; downsample y=%lld, vars %lld (ref 36000), constraints %lld emitted "
                "%lld (ref 320000), LP %.1f MB; %.2fs",
                exact, static_cast<long long>(r.y_variables), static_cast<long long>(r.total_variables),
                static_cast<long long>(r.total_constraints), static_cast<long long>(emitted),
                static_cast<double>(lp.size()) / 1e6, el);
  v.detail = buf;
  return v;
}

Verdict milp_solve() {
  std::mt19937_64 rng(77);
  int satisfied = 0, feasible = 0;
  for (int i = 0; i < 20; ++i) {
    Toy t = random_toy(rng);
    MilpModel m = build_model(t.slice, t.params, basic_sandbox());
    MilpSolution s = micro_solve(m);
    if (!s.feasible) {
      ++satisfied;  // nothing to re-check
      continue;
    }
    ++feasible;
    satisfied += check_assignment(m, s.values);
  }
  // The stay toy solves; pinning every location off at one slot cannot.
  Toy t = hotel_station_toy();
  MilpModel base = build_model(t.slice, t.params, basic_sandbox());
  MilpSolution ok = micro_solve(base);
  bool base_ok = ok.feasible && check_assignment(base, ok.values);
  MilpModel bad = base;
  for (int i = 0; i < t.params.totalNum() + t.params.transNum; ++i) {
    bad.rows.push_back({"pin_" + std::to_string(i), MilpCategory::spatio, {{bad.u(i, 3), 1}}, Sense::le, 0});
  }
  bool contradiction = !micro_solve(bad).feasible;
  bool short_horizon = !micro_solve(build_model(hotel_station_toy(4).slice, hotel_station_toy(4).params,
                                                basic_sandbox()))
                            .feasible;
  Verdict v;
  v.pass = satisfied == 20 && feasible > 0 && base_ok && contradiction && short_horizon;
  v.detail = std::to_string(satisfied) + "/20 toys consistent (" + std::to_string(feasible) +
             " feasible, all re-satisfy); stay toy " + (base_ok ? "solved" : "unsolved") +
             "; contradictions infeasible " + std::to_string(contradiction + short_horizon) + "/2";
  return v;
}

// ---------------------------------------------------------------------------
// 9: certification

Verdict certification() {
  GenConfig small;
  small.max_days = 2;
  small.max_people = 3;
  struct Batch {
    const Sandbox* sb;
    Difficulty d;
    int count;
    std::uint64_t seed;
    GenConfig cfg;
  };
  std::vector<Batch> batches = {{&basic_sandbox(), Difficulty::easy, 15, 1, {}},
                                {&basic_sandbox(), Difficulty::medium, 15, 2, {}},
                                {&micro_sandbox(), Difficulty::easy, 10, 3, small},
                                {&micro_sandbox(), Difficulty::medium, 10, 4, small}};
  int total = 0, pass = 0;
  std::string bad;
  for (const auto& b : batches) {
    for (const auto& q : generate_batch(*b.sb, b.d, b.count, b.seed, b.cfg)) {
      ++total;
      // Round-trip through JSON so the check sees only what is emitted.
      CertifiedQuery back = certified_from_json(json::parse(certified_to_json(q).dump()));
      std::string text = serialize_plan(back.witness);
      EvalReport r = evaluate_plan(&text, parse_all(back.dsl), *b.sb);
      bool ok = r.delivered && validate_env(back.witness, *b.sb).overall() && r.env.overall() &&
                r.logical.size() == back.dsl.size() && all_true(r.logical);
      pass += ok;
      if (!ok && bad.empty()) bad = q.id;
    }
  }
  Verdict v;
  v.pass = total > 0 && pass == total;
  v.detail = std::to_string(pass) + "/" + std::to_string(total) + " witnesses re-pass env and DSL";
  if (!bad.empty()) v.detail += "; first failure " + bad;
  return v;
}

// ---------------------------------------------------------------------------
// 10, 11: CLI

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args, LlmTransport* t = nullptr, EventLog* log = nullptr) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, CliContext{&out, &err, t, log});
  r.out = out.str();
  r.err = err.str();
  return r;
}

Verdict determinism() {
  const std::string db = data_dir("basic").string();
  std::vector<std::string> outputs[2];
  std::string err;
  for (auto& out : outputs) {
    fs::path d = scratch("pipeline");
    auto p = [&](const char* f) { return (d / f).string(); };
    Run g = cli({"generate", "--db", db, "--difficulty", "medium", "--count", "20", "--seed", "2024",
                 "--out", p("bench.jsonl")});
    Run pl = cli({"plan", "--db", db, p("bench.jsonl"), "--ranker", "heuristic", "--out", p("plans.jsonl")});
    Run ev = cli({"eval", "--db", db, p("plans.jsonl"), p("bench.jsonl"), "--out", p("eval.json")});
    for (const Run* r : {&g, &pl, &ev}) {
      if (r->code != 0 && err.empty()) err = r->err;
    }
    out = {read_file(p("bench.jsonl")), read_file(p("plans.jsonl")), read_file(p("eval.json")), ev.out};
  }
  std::int64_t lines = std::count(outputs[0][0].begin(), outputs[0][0].end(), '\n');
  Verdict v;
  v.pass = err.empty() && lines == 21 && outputs[0] == outputs[1];
  int same = 0;
  for (std::size_t i = 0; i < 4; ++i) same += outputs[0][i] == outputs[1][i];
  v.detail = std::to_string(lines - 1) + " queries; " + std::to_string(same) +
             "/4 artifacts byte-identical (benchmark, plans, eval json, eval stdout)";
  if (!err.empty()) v.detail += "; error: " + err;
  return v;
}

Verdict degradation() {
  const std::string db = data_dir("basic").string();
  fs::path d = scratch("faults");
  Run g = cli({"generate", "--db", db, "--count", "6", "--seed", "5", "--max-days", "2", "--out",
               (d / "bench.jsonl").string()});
  ScriptedTransport inner(echo_reply);
  FaultyTransport faulty(inner, 3);
  EventLog log;
  Run r{1, "", "no run"};
  try {
    r = cli({"plan", "--db", db, (d / "bench.jsonl").string(), "--ranker", "llm", "--events",
             (d / "events.jsonl").string(), "--out", (d / "plans.jsonl").string()},
            &faulty, &log);
  } catch (const std::exception& e) {
    r.err = e.what();
  }
  std::string plans = read_file(d / "plans.jsonl");
  std::int64_t records = std::count(plans.begin(), plans.end(), '\n') - 1;
  Verdict v;
  v.pass = g.code == 0 && r.code == 0 && records == 6 && faulty.faults() > 0 &&
           static_cast<int>(log.count()) == faulty.faults();
  v.detail = "exit " + std::to_string(r.code) + "; " + std::to_string(records) + "/6 queries planned; " +
             std::to_string(faulty.faults()) + " faults, " + std::to_string(log.count()) + " events";
  if (r.code != 0) v.detail += "; " + r.err;
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"metric formulas", metric_formulas},
      {"C-LPR worked example", clpr_example},
      {"DSL golden corpus", golden_corpus},
      {"env rule fixtures", env_rules_flip},
      {"planner completeness", planner_completeness},
      {"planner rules", planner_rules},
      {"MILP sizes", milp_sizes},
      {"MILP micro solve", milp_solve},
      {"query certification", certification},
      {"pipeline determinism", determinism},
      {"LLM degradation", degradation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << criteria[i].name << ": "
              << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
