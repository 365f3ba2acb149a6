#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "itin/cli.hpp"
#include "itin/evaluator.hpp"
#include "mock_llm.hpp"
#include "support.hpp"

using namespace itin;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, LlmTransport* transport = nullptr, EventLog* log = nullptr) {
  std::ostringstream out, err;
  CliContext ctx{&out, &err, transport, log};
  Run r;
  r.code = run_cli(args, ctx);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("itin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string db() const { return data_dir("basic").string(); }

  void generate(const std::string& out, int count = 6, const std::string& diff = "easy") {
    auto r = run({"generate", "--db", db(), "--difficulty", diff, "--count", std::to_string(count),
                  "--seed", "9", "--max-days", "2", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateIsReproducible) {
  generate(path("a.jsonl"));
  generate(path("b.jsonl"));
  EXPECT_EQ(read(path("a.jsonl")), read(path("b.jsonl")));
  auto lines = read(path("a.jsonl"));
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 7);
  EXPECT_EQ(lines.find("timestamp"), std::string::npos);
  Benchmark b = read_benchmark(path("a.jsonl"));
  EXPECT_EQ(b.queries.size(), 6u);
  EXPECT_EQ(b.hash, manifest_hash(b.manifest));
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"generate", "--db", db(), "--difficulty", "hard"}).code, 2);
  EXPECT_EQ(run({"generate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"plan", "--db", db(), path("missing.jsonl")}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST_F(CliTest, PlanEvalPipeline) {
  generate(path("b.jsonl"));
  auto p = run({"plan", "--db", db(), path("b.jsonl"), "--out", path("p.jsonl")});
  ASSERT_EQ(p.code, 0) << p.err;
  auto e = run({"eval", "--db", db(), path("p.jsonl"), path("b.jsonl"), "--out", path("e.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("C-LPR"), std::string::npos);
  json doc = json::parse(read(path("e.json")));
  EXPECT_EQ(doc["summary"]["FPR"]["fraction"], "1");
  EXPECT_EQ(doc["reports"].size(), 6u);
}

TEST_F(CliTest, LunchCorruptionDropsEnvMacroByOnePlan) {
  generate(path("b.jsonl"), 8);
  ASSERT_EQ(run({"plan", "--db", db(), path("b.jsonl"), "--out", path("p.jsonl")}).code, 0);
  std::istringstream in(read(path("p.jsonl")));
  std::vector<json> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(json::parse(l));
  bool changed = false;
  for (std::size_t i = 1; i < lines.size() && !changed; ++i) {
    for (auto& day : lines[i]["plan"]["itinerary"]) {
      for (auto& act : day["activities"]) {
        if (act["type"] == "lunch" && !changed) {
          act["start_time"] = "15:00";
          changed = true;
        }
      }
    }
  }
  ASSERT_TRUE(changed);
  {
    std::ofstream f(path("bad.jsonl"));
    for (const auto& l : lines) f << l.dump() << "\n";
  }
  auto good = run({"eval", "--db", db(), path("p.jsonl"), path("b.jsonl"), "--out", path("g.json")});
  auto bad = run({"eval", "--db", db(), path("bad.jsonl"), path("b.jsonl"), "--out", path("x.json")});
  ASSERT_EQ(good.code, 0);
  ASSERT_EQ(bad.code, 0) << bad.err;
  json g = json::parse(read(path("g.json")));
  json x = json::parse(read(path("x.json")));
  EXPECT_EQ(g["summary"]["EPR_macro"]["fraction"], "1");
  EXPECT_EQ(x["summary"]["EPR_macro"]["fraction"], "7/8");
}

TEST_F(CliTest, EvalRefusesMismatchAndEmpty) {
  generate(path("b.jsonl"));
  generate(path("c.jsonl"), 3);
  ASSERT_EQ(run({"plan", "--db", db(), path("b.jsonl"), "--out", path("p.jsonl")}).code, 0);
  auto r = run({"eval", "--db", db(), path("p.jsonl"), path("c.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mismatch"), std::string::npos);
  { std::ofstream f(path("empty.jsonl")); }
  EXPECT_EQ(run({"eval", "--db", db(), path("empty.jsonl"), path("b.jsonl")}).code, 2);
  // Manifest only, no plans.
  {
    std::ofstream f(path("head.jsonl"));
    std::string all = read(path("p.jsonl"));
    f << all.substr(0, all.find('\n') + 1);
  }
  EXPECT_EQ(run({"eval", "--db", db(), path("head.jsonl"), path("b.jsonl")}).code, 2);
}

TEST_F(CliTest, PipelineIsByteDeterministic) {
  auto body = [&](const std::string& f) {
    std::string s = read(path(f));
    return s.substr(s.find('\n') + 1);
  };
  std::string evals[2];
  for (int i = 0; i < 2; ++i) {
    std::string tag = std::to_string(i);
    generate(path("b" + tag));
    auto p = run({"plan", "--db", db(), path("b" + tag), "--jobs", "2", "--out", path("p" + tag)});
    ASSERT_EQ(p.code, 0) << p.err;
    evals[i] = run({"eval", "--db", db(), path("p" + tag), path("b" + tag)}).out;
  }
  EXPECT_EQ(read(path("b0")), read(path("b1")));
  // Plan manifests name their input path; the records must match exactly.
  EXPECT_EQ(body("p0"), body("p1"));
  EXPECT_EQ(evals[0], evals[1]);
}

TEST_F(CliTest, ReplayReproducesRecordedRun) {
  generate(path("b.jsonl"), 3);
  ScriptedTransport mock(echo_reply);
  auto rec = run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "llm", "--transcript",
                  path("t.jsonl"), "--out", path("p1.jsonl")},
                 &mock);
  ASSERT_EQ(rec.code, 0) << rec.err;
  auto rep = run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "replay", "--transcript",
                  path("t.jsonl"), "--out", path("p2.jsonl")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  auto body = [&](const std::string& f) {
    std::string s = read(path(f));
    return s.substr(s.find('\n') + 1);
  };
  EXPECT_EQ(body("p1.jsonl"), body("p2.jsonl"));
  auto again = run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "replay", "--transcript",
                    path("t.jsonl"), "--out", path("p3.jsonl")});
  EXPECT_EQ(read(path("p2.jsonl")), read(path("p3.jsonl")));
  EXPECT_EQ(run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "replay"}).code, 2);
  EXPECT_EQ(run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "oracle"}).code, 2);
}

TEST_F(CliTest, FaultyEndpointDegradesPerFault) {
  generate(path("b.jsonl"), 4);
  ScriptedTransport inner(echo_reply);
  FaultyTransport faulty(inner, 3);
  EventLog log;
  auto r = run({"plan", "--db", db(), path("b.jsonl"), "--ranker", "llm", "--events",
                path("ev.jsonl"), "--out", path("p.jsonl")},
               &faulty, &log);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(faulty.faults(), 0);
  EXPECT_EQ(static_cast<int>(log.count()), faulty.faults());
  auto lines = read(path("p.jsonl"));
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 5);
}

TEST_F(CliTest, MilpFilesMatchSizes) {
  generate(path("b.jsonl"), 2);
  auto r = run({"milp", "--db", db(), path("b.jsonl"), "--out", path("lp"), "--params",
                "attrNum=2,restNum=2,goNum=2,backNum=2,timeStep=12"});
  ASSERT_EQ(r.code, 0) << r.err;
  json sizes = json::parse(read(path("lp/sizes.json")));
  ASSERT_EQ(sizes["queries"].size(), 2u);
  for (const auto& q : sizes["queries"]) {
    EXPECT_EQ(q["emitted_constraints"], q["total_constraints"]);
    EXPECT_EQ(q["emitted_variables"], q["total_variables"]);
    std::string lp = read(path("lp/" + q["file"].get<std::string>()));
    auto from = lp.find("Subject To\n"), to = lp.find("Bounds\n");
    std::istringstream in(lp.substr(from, to - from));
    std::int64_t rows = 0;
    for (std::string l; std::getline(in, l);) {
      if (l.size() > 1 && l[0] == ' ' && l[1] != ' ') ++rows;
    }
    EXPECT_EQ(rows, q["total_constraints"].get<std::int64_t>());
  }
  EXPECT_EQ(run({"milp", "--db", db(), path("b.jsonl"), "--out", path("lp"), "--params",
                 "timeStep=-1"})
                .code,
            2);
}
