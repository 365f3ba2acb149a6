#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "itin/json.hpp"
#include "itin/llm.hpp"
#include "itin/querygen.hpp"

namespace itin {

inline constexpr const char* kVersion = "0.1.0";

/// Streams and injectable collaborators for one CLI invocation.
struct CliContext {
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
  /// Used instead of an HTTP endpoint for `--ranker llm` when set.
  LlmTransport* transport = nullptr;
  /// Replaces the `--events` log when set.
  EventLog* events = nullptr;
};

/// Exit code: 0 success, 1 internal error, 2 usage error.
int run_cli(const std::vector<std::string>& args, CliContext ctx = {});
int run_cli(int argc, char** argv);

/// Output files start with `{"manifest": {...}, "manifest_hash": "..."}`.
json make_manifest(const std::string& command, const json& inputs, const json& config,
                   bool timestamps);
std::string manifest_hash(const json& manifest);
/// Content hash of every file under `root` (relative path + bytes).
std::string hash_tree(const std::filesystem::path& root);

struct Benchmark {
  json manifest;
  std::string hash;
  std::vector<CertifiedQuery> queries;
};

/// Throws UsageError for a missing/empty file or a missing manifest line.
Benchmark read_benchmark(const std::filesystem::path& path);

}  // namespace itin
