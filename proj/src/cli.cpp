#include "itin/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "itin/evaluator.hpp"
#include "itin/milp.hpp"

namespace itin {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Writes to --out or to the context stream.
class Output {
 public:
  Output(const std::string& path, std::ostream* fallback) {
    if (path.empty() || path == "-") {
      os_ = fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }
  void finish() {
    os_->flush();
    if (file_ && !*file_) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

std::vector<json> read_jsonl(const fs::path& path) {
  std::string text = slurp(path);
  std::vector<json> out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception&) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": not valid JSON");
    }
  }
  return out;
}

std::pair<json, std::string> split_manifest(const std::vector<json>& lines, const fs::path& path) {
  if (lines.empty()) throw UsageError("'" + path.string() + "' is empty");
  const json& head = lines.front();
  if (!head.is_object() || !head.contains("manifest") || !head.contains("manifest_hash")) {
    throw UsageError("'" + path.string() + "' has no manifest line");
  }
  std::string stated = head["manifest_hash"].get<std::string>();
  if (manifest_hash(head["manifest"]) != stated) {
    throw UsageError("'" + path.string() + "': manifest hash does not match its manifest");
  }
  return {head["manifest"], stated};
}

void write_manifest(std::ostream& os, const json& manifest) {
  os << json{{"manifest", manifest}, {"manifest_hash", manifest_hash(manifest)}}.dump() << "\n";
}

SearchConfig load_search_config(const std::string& path) {
  SearchConfig cfg;
  if (!path.empty()) cfg = parse_search_config(slurp(path), cfg);
  return cfg;
}

json config_json(const SearchConfig& c) {
  return {{"budget_secs", c.budget_secs},       {"activity_minutes", c.activity_minutes},
          {"max_branching", c.max_branching},   {"nearby_topk", c.nearby_topk},
          {"nearby_km", c.nearby_km},           {"max_nodes", c.max_nodes},
          {"budget_pruning", c.budget_pruning}, {"hotel_cutoff", c.hotel_cutoff.to_string()}};
}

// Runs fn(k) for k in [0, n) on `jobs` threads.
template <typename Fn>
void parallel_for(int n, int jobs, Fn fn) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(jobs, std::max(n, 1)); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Common {
  std::string db;
  std::string config;
  std::string out;
  int jobs = 1;
  bool timestamps = false;
};

void add_common(CLI::App* app, Common& c, bool needs_db = true) {
  auto* db = app->add_option("--db", c.db, "Sandbox data root");
  if (needs_db) db->required();
  app->add_option("--config", c.config, "Search config file (key = value)");
  app->add_option("--out", c.out, "Output path (default stdout)");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--timestamps", c.timestamps, "Record wall-clock time in the manifest");
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  Common common;
  std::string difficulty = "easy";
  int count = 10;
  std::uint64_t seed = 0;
  GenConfig gen;
  std::uint64_t max_nodes = 0;
};

int cmd_generate(const GenerateArgs& a, CliContext& ctx) {
  Difficulty diff = parse_difficulty(a.difficulty);
  if (a.count < 1) throw UsageError("--count must be >= 1");
  GenConfig gen = a.gen;
  if (!a.common.config.empty()) gen.search = parse_search_config(slurp(a.common.config), gen.search);
  if (a.max_nodes > 0) gen.search.max_nodes = a.max_nodes;
  Sandbox sb = Sandbox::load(a.common.db);
  auto batch = generate_batch(sb, diff, a.count, a.seed, gen, a.common.jobs);

  json config = {{"difficulty", a.difficulty},         {"count", a.count},
                 {"min_days", gen.min_days},           {"max_days", gen.max_days},
                 {"min_people", gen.min_people},       {"max_people", gen.max_people},
                 {"max_attempts", gen.max_attempts},   {"search", config_json(gen.search)}};
  json manifest = make_manifest("generate", {{"db", a.common.db}, {"db_hash", hash_tree(a.common.db)}},
                                config, a.common.timestamps);
  manifest["seed"] = a.seed;
  Output out(a.common.out, ctx.out);
  write_manifest(*out, manifest);
  for (const auto& q : batch) *out << certified_to_json(q).dump() << "\n";
  out.finish();
  *ctx.err << "certified " << batch.size() << " of " << a.count << " queries\n";
  return batch.empty() ? 1 : 0;
}

// --- plan ------------------------------------------------------------------

struct PlanArgs {
  Common common;
  std::string benchmark;
  std::string ranker = "heuristic";
  double budget_secs = 0;
  std::uint64_t max_nodes = 0;
  std::string transcript;
  std::string events;
  std::string prompts;
  std::string llm_url = "http://127.0.0.1:8000";
  std::string llm_model = "default";
  std::string token_env = "ITIN_LLM_TOKEN";
  double llm_timeout = 30;
};

int cmd_plan(const PlanArgs& a, CliContext& ctx) {
  if (a.ranker != "heuristic" && a.ranker != "llm" && a.ranker != "replay") {
    throw UsageError("unknown ranker '" + a.ranker + "' (heuristic, llm or replay)");
  }
  SearchConfig cfg = load_search_config(a.common.config);
  if (a.budget_secs > 0) cfg.budget_secs = a.budget_secs;
  if (a.max_nodes > 0) cfg.max_nodes = a.max_nodes;
  cfg.validate();
  Benchmark bench = read_benchmark(a.benchmark);
  Sandbox sb = Sandbox::load(a.common.db);

  std::unique_ptr<std::ofstream> events_file;
  if (!a.events.empty()) {
    events_file = std::make_unique<std::ofstream>(a.events, std::ios::binary);
    if (!*events_file) throw UsageError("cannot write '" + a.events + "'");
  }
  EventLog own_log(events_file.get());
  EventLog* log = ctx.events ? ctx.events : &own_log;

  std::unique_ptr<LlmTransport> owned;
  std::unique_ptr<std::ofstream> transcript_file;
  std::unique_ptr<RecordingTransport> recorder;
  LlmTransport* transport = nullptr;
  if (a.ranker == "replay") {
    if (a.transcript.empty()) throw UsageError("--ranker replay needs --transcript");
    owned = std::make_unique<ReplayTransport>(ReplayTransport::load(a.transcript));
    transport = owned.get();
  } else if (a.ranker == "llm") {
    if (ctx.transport) {
      transport = ctx.transport;
    } else {
      LlmEndpoint ep;
      ep.base_url = a.llm_url;
      ep.model = a.llm_model;
      ep.token_env = a.token_env;
      ep.timeout_secs = a.llm_timeout;
      owned = std::make_unique<HttpTransport>(ep);
      transport = owned.get();
    }
    if (!a.transcript.empty()) {
      transcript_file = std::make_unique<std::ofstream>(a.transcript, std::ios::binary);
      if (!*transcript_file) throw UsageError("cannot write '" + a.transcript + "'");
      recorder = std::make_unique<RecordingTransport>(*transport, *transcript_file);
      transport = recorder.get();
    }
  }
  PromptSet prompts = a.prompts.empty() ? PromptSet::defaults() : PromptSet::load(a.prompts);

  const int n = static_cast<int>(bench.queries.size());
  std::vector<SearchOutcome> outcomes(static_cast<std::size_t>(n));
  parallel_for(n, a.common.jobs, [&](int k) {
    const CertifiedQuery& q = bench.queries[static_cast<std::size_t>(k)];
    QueryContext qc = QueryContext::make(q.skeleton.start_city, q.skeleton.target_city,
                                         q.skeleton.days, q.skeleton.people, q.dsl, q.text);
    if (transport) {
      LlmRanker ranker(*transport, prompts, log);
      LlmStepAdvisor advisor(*transport, prompts, log);
      outcomes[static_cast<std::size_t>(k)] = dfs_search(qc, sb, ranker, cfg, &advisor);
    } else {
      HeuristicRanker ranker;
      outcomes[static_cast<std::size_t>(k)] = dfs_search(qc, sb, ranker, cfg);
    }
  });

  json config = {{"ranker", a.ranker}, {"search", config_json(cfg)}};
  json inputs = {{"benchmark", a.benchmark},
                 {"benchmark_hash", bench.hash},
                 {"db", a.common.db},
                 {"db_hash", hash_tree(a.common.db)}};
  if (a.ranker == "replay") inputs["transcript_hash"] = fnv1a_hex(slurp(a.transcript));
  json manifest = make_manifest("plan", inputs, config, a.common.timestamps);
  Output out(a.common.out, ctx.out);
  write_manifest(*out, manifest);
  std::map<std::string, int> tally;
  for (int k = 0; k < n; ++k) {
    const SearchOutcome& o = outcomes[static_cast<std::size_t>(k)];
    json rec = outcome_to_json(o, a.common.timestamps);
    rec["id"] = bench.queries[static_cast<std::size_t>(k)].id;
    if (o.status == SearchStatus::empty) rec["plan"] = nullptr;
    *out << rec.dump() << "\n";
    ++tally[std::string(status_name(o.status))];
  }
  out.finish();
  for (const auto& [status, count] : tally) *ctx.err << status << ": " << count << "\n";
  if (log->count() > 0) *ctx.err << "degradation events: " << log->count() << "\n";
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string plans;
  std::string benchmark;
  std::string label = "itin";
};

int cmd_eval(const EvalArgs& a, CliContext& ctx) {
  Benchmark bench = read_benchmark(a.benchmark);
  auto lines = read_jsonl(a.plans);
  auto [plan_manifest, plan_hash] = split_manifest(lines, a.plans);
  if (lines.size() < 2) throw UsageError("'" + a.plans + "' contains no plans");
  std::string bound = plan_manifest.value("inputs", json::object()).value("benchmark_hash", "");
  if (bound != bench.hash) {
    throw UsageError("plans were produced from a different benchmark (manifest mismatch)");
  }
  std::map<std::string, const json*> by_id;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!lines[i].contains("id")) throw UsageError("plan record without id");
    by_id[lines[i]["id"].get<std::string>()] = &lines[i];
  }
  Sandbox sb = Sandbox::load(a.common.db);

  const int n = static_cast<int>(bench.queries.size());
  std::vector<EvalReport> reports(static_cast<std::size_t>(n));
  parallel_for(n, a.common.jobs, [&](int k) {
    const CertifiedQuery& q = bench.queries[static_cast<std::size_t>(k)];
    std::vector<dsl::Program> progs;
    for (const auto& s : q.dsl) progs.push_back(dsl::parse(s));
    auto it = by_id.find(q.id);
    std::optional<std::string> text;
    if (it != by_id.end() && it->second->contains("plan") && !(*it->second)["plan"].is_null()) {
      text = (*it->second)["plan"].dump();
    }
    reports[static_cast<std::size_t>(k)] = evaluate_plan(text ? &*text : nullptr, progs, sb);
  });
  MetricSummary summary = score(reports);

  json inputs = {{"benchmark", a.benchmark}, {"benchmark_hash", bench.hash},
                 {"plans", a.plans},         {"plans_hash", plan_hash},
                 {"db", a.common.db},        {"db_hash", hash_tree(a.common.db)}};
  json manifest = make_manifest("eval", inputs, json::object(), a.common.timestamps);
  json per = json::array();
  for (int k = 0; k < n; ++k) {
    json r = eval_report_to_json(reports[static_cast<std::size_t>(k)]);
    r["id"] = bench.queries[static_cast<std::size_t>(k)].id;
    per.push_back(std::move(r));
  }
  json doc = {{"manifest", manifest},
              {"manifest_hash", manifest_hash(manifest)},
              {"summary", summary_to_json(summary)},
              {"reports", per}};
  *ctx.out << summary_table(summary, a.label) << summary_to_json(summary).dump() << "\n";
  if (!a.common.out.empty()) {
    Output out(a.common.out, ctx.out);
    *out << doc.dump(2) << "\n";
    out.finish();
  }
  return 0;
}

// --- milp ------------------------------------------------------------------

struct MilpArgs {
  Common common;
  std::string benchmark;
  std::string params;
};

int cmd_milp(const MilpArgs& a, CliContext& ctx) {
  MilpParams base = MilpParams::parse(a.params);
  if (a.common.out.empty()) throw UsageError("milp needs --out DIR");
  Benchmark bench = read_benchmark(a.benchmark);
  Sandbox sb = Sandbox::load(a.common.db);
  fs::create_directories(a.common.out);

  json sizes = json::array();
  for (const auto& q : bench.queries) {
    MilpParams want = base;
    want.days = q.skeleton.days;
    want.timeStep = base.steps_per_day() * q.skeleton.days;
    auto [slice, p] = select_slice(sb, q.skeleton.start_city, q.skeleton.target_city, want);
    MilpModel m = build_model(slice, p, sb, q.skeleton.people);
    fs::path file = fs::path(a.common.out) / (q.id + ".lp");
    write_lp(m, file);
    SizeReport r = count_sizes(p);
    json j = size_report_to_json(r);
    j["id"] = q.id;
    j["file"] = file.filename().string();
    j["emitted_constraints"] = static_cast<std::int64_t>(m.rows.size());
    j["emitted_variables"] = static_cast<std::int64_t>(m.vars.size());
    j["params"] = {{"hotelNum", p.hotelNum},     {"attrNum", p.attrNum}, {"restNum", p.restNum},
                   {"transNum", p.transNum},     {"stationNum", p.stationNum},
                   {"goNum", p.goNum},           {"backNum", p.backNum},
                   {"timeStep", p.timeStep},     {"days", p.days}};
    sizes.push_back(std::move(j));
    *ctx.out << q.id << ": " << m.vars.size() << " variables, " << m.rows.size()
             << " constraints\n";
  }
  // Reference sizes for the unclipped parameters, one day.
  MilpParams one = base;
  one.days = 1;
  one.timeStep = base.steps_per_day();
  json inputs = {{"benchmark", a.benchmark}, {"benchmark_hash", bench.hash},
                 {"db", a.common.db},        {"db_hash", hash_tree(a.common.db)}};
  json manifest = make_manifest("milp", inputs, {{"params", a.params}}, a.common.timestamps);
  json doc = {{"manifest", manifest},
              {"manifest_hash", manifest_hash(manifest)},
              {"reference", size_report_to_json(count_sizes(one))},
              {"queries", sizes}};
  std::ofstream f(fs::path(a.common.out) / "sizes.json", std::ios::binary);
  if (!f) throw Error("cannot write sizes.json");
  f << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

std::string manifest_hash(const json& manifest) { return fnv1a_hex(manifest.dump()); }

json make_manifest(const std::string& command, const json& inputs, const json& config,
                   bool timestamps) {
  json m = {{"command", command},
            {"inputs", inputs},
            {"config", config},
            {"versions", {{"itin", kVersion}}}};
  if (timestamps) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    m["timestamp"] = s.str();
  }
  return m;
}

std::string hash_tree(const fs::path& root) {
  if (!fs::is_directory(root)) throw UsageError("'" + root.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
  }
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& f : files) {
    acc += f.generic_string();
    acc += '\0';
    acc += fnv1a_hex(slurp(root / f));
    acc += '\n';
  }
  return fnv1a_hex(acc);
}

Benchmark read_benchmark(const fs::path& path) {
  auto lines = read_jsonl(path);
  auto [manifest, hash] = split_manifest(lines, path);
  Benchmark b{manifest, hash, {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    try {
      b.queries.push_back(certified_from_json(lines[i]));
    } catch (const Error& e) {
      throw UsageError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return b;
}

int run_cli(const std::vector<std::string>& args, CliContext ctx) {
  CLI::App app{"Itinerary planning benchmark toolkit", "itin"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample and certify benchmark queries");
  add_common(g, gen.common);
  g->add_option("--difficulty", gen.difficulty, "easy or medium");
  g->add_option("--count", gen.count, "Queries to produce");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--min-days", gen.gen.min_days);
  g->add_option("--max-days", gen.gen.max_days);
  g->add_option("--min-people", gen.gen.min_people);
  g->add_option("--max-people", gen.gen.max_people);
  g->add_option("--max-attempts", gen.gen.max_attempts);
  g->add_option("--max-nodes", gen.max_nodes, "Certification node cap");

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Run the search over a benchmark file");
  add_common(p, plan.common);
  p->add_option("benchmark", plan.benchmark, "Benchmark file")->required();
  p->add_option("--ranker", plan.ranker, "heuristic, llm or replay");
  p->add_option("--budget-secs", plan.budget_secs, "Per-query search budget");
  p->add_option("--max-nodes", plan.max_nodes, "Per-query node cap");
  p->add_option("--transcript", plan.transcript, "Replay input or recording output");
  p->add_option("--events", plan.events, "Degradation event log (JSONL)");
  p->add_option("--prompts", plan.prompts, "Directory overriding prompt templates");
  p->add_option("--llm-url", plan.llm_url, "Base URL of the chat completions server");
  p->add_option("--llm-model", plan.llm_model, "Model name sent with each request");
  p->add_option("--llm-token-env", plan.token_env, "Name of the variable holding the token");
  p->add_option("--llm-timeout", plan.llm_timeout, "Request timeout in seconds");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score plans against a benchmark");
  add_common(e, ev.common);
  e->add_option("plans", ev.plans, "Plans file")->required();
  e->add_option("benchmark", ev.benchmark, "Benchmark file")->required();
  e->add_option("--label", ev.label, "Row label in the table");

  MilpArgs mi;
  auto* m = app.add_subcommand("milp", "Write an LP model per benchmark query");
  add_common(m, mi.common);
  m->add_option("benchmark", mi.benchmark, "Benchmark file")->required();
  m->add_option("--params", mi.params, "key=value list, e.g. hotelNum=2,timeStep=24");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err, *ctx.out, *ctx.err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (g->parsed()) return cmd_generate(gen, ctx);
    if (p->parsed()) return cmd_plan(plan, ctx);
    if (e->parsed()) return cmd_eval(ev, ctx);
    if (m->parsed()) return cmd_milp(mi, ctx);
  } catch (const UsageError& err) {
    *ctx.err << "error: " << err.what() << "\n";
    return 2;
  } catch (const ConfigError& err) {
    *ctx.err << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    *ctx.err << "internal error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace itin
