#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "itin/common.hpp"
#include "itin/dsl.hpp"
#include "itin/json.hpp"
#include "itin/planner.hpp"

namespace itin {

/// A request could not be completed (network, HTTP status, replay miss).
struct TransportError : Error {
  using Error::Error;
};

struct LlmEndpoint {
  std::string base_url = "http://127.0.0.1:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "default";
  std::string token_env = "ITIN_LLM_TOKEN";  // name of the variable, never its value
  double timeout_secs = 30;
  int max_retries = 2;
  int backoff_ms = 250;  // doubled after each failed attempt
};

/// Single-turn completion. Implementations must be safe to call from
/// several search threads at once. Throws TransportError.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Chat-completion request over HTTP with exponential backoff.
class HttpTransport : public LlmTransport {
 public:
  explicit HttpTransport(LlmEndpoint endpoint);
  std::string complete(const std::string& prompt) override;
  const LlmEndpoint& endpoint() const { return endpoint_; }

 private:
  LlmEndpoint endpoint_;
};

/// Canned replies keyed by the FNV-1a hash of the prompt. Transcript lines
/// are `{"hash": "...", "reply": "..."}`; a miss throws TransportError.
class ReplayTransport : public LlmTransport {
 public:
  static ReplayTransport load(const std::filesystem::path& transcript);
  static ReplayTransport parse(std::string_view jsonl);
  void add(const std::string& prompt, std::string reply);
  std::string complete(const std::string& prompt) override;
  std::size_t size() const { return replies_.size(); }

 private:
  std::map<std::string, std::string> replies_;
};

/// Forwards to `inner` and appends every exchange to a transcript.
class RecordingTransport : public LlmTransport {
 public:
  RecordingTransport(LlmTransport& inner, std::ostream& transcript) : inner_(inner), out_(transcript) {}
  std::string complete(const std::string& prompt) override;

 private:
  LlmTransport& inner_;
  std::ostream& out_;
  std::mutex mu_;
};

/// Line-delimited structured log of fallbacks to deterministic behaviour.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::ostream* sink) : sink_(sink) {}
  void degradation(std::string_view op, std::string_view reason);
  std::size_t count() const;
  std::vector<json> events() const;

 private:
  mutable std::mutex mu_;
  std::ostream* sink_ = nullptr;
  std::vector<json> events_;
};

/// Prompt templates with `{name}` placeholders.
class PromptSet {
 public:
  /// Compiled-in defaults (also shipped under prompts/).
  static PromptSet defaults();
  /// Defaults overridden by `<dir>/<name>.txt` where present.
  static PromptSet load(const std::filesystem::path& dir);
  const std::string& get(const std::string& name) const;
  std::vector<std::string> names() const;
  void set(const std::string& name, std::string text) { templates_[name] = std::move(text); }

 private:
  std::map<std::string, std::string> templates_;
};

/// Replaces every `{key}`; throws ConfigError naming an unfilled placeholder.
std::string render_prompt(const std::string& tmpl, const std::map<std::string, std::string>& values);

/// Names from the first `<Prefix>NameList:` line, or nullopt when absent.
std::optional<std::vector<std::string>> parse_name_list(const std::string& reply);
/// Value of the first `Type:` line, trimmed; nullopt when absent.
std::optional<std::string> parse_type_line(const std::string& reply);

/// Puts the reply's names first, drops unknown names and appends the rest in
/// input order. The result is always a permutation of `candidates`.
std::vector<Candidate> order_by_names(const std::vector<Candidate>& candidates,
                                      const std::vector<std::string>& names);

/// Text summary of a partially built plan for prompts.
std::string describe_state(const SearchState& state);

/// One ranking request. Falls back to the heuristic order and logs an event
/// on transport failure or an unparseable reply.
std::vector<Candidate> llm_rank(NextStep step, const std::vector<Candidate>& candidates,
                                const SearchState& state, const QueryContext& query,
                                LlmTransport& transport, const PromptSet& prompts, EventLog* log);

/// Suggested next step, or nullopt (invalid suggestion or failure).
std::optional<NextStep> next_type_hint(const SearchState& state, const QueryContext& query,
                                       LlmTransport& transport, const PromptSet& prompts,
                                       EventLog* log);

class LlmRanker : public Ranker {
 public:
  LlmRanker(LlmTransport& transport, const PromptSet& prompts, EventLog* log)
      : transport_(transport), prompts_(prompts), log_(log) {}
  std::vector<Candidate> rank(NextStep step, std::vector<Candidate> candidates,
                              const SearchState& state, const QueryContext& query) override;

 private:
  LlmTransport& transport_;
  const PromptSet& prompts_;
  EventLog* log_;
};

class LlmStepAdvisor : public StepAdvisor {
 public:
  LlmStepAdvisor(LlmTransport& transport, const PromptSet& prompts, EventLog* log)
      : transport_(transport), prompts_(prompts), log_(log) {}
  std::optional<NextStep> suggest(const SearchState& state, const QueryContext& query,
                                  NextStep cascade) override;

 private:
  LlmTransport& transport_;
  const PromptSet& prompts_;
  EventLog* log_;
};

struct TranslationRound {
  std::string source;
  std::vector<dsl::Diagnostic> diagnostics;
};

struct TranslationSession {
  std::string query;
  std::vector<TranslationRound> rounds;
  int max_rounds = 5;
  std::string error;  // set when the endpoint failed

  bool clean() const { return !rounds.empty() && rounds.back().diagnostics.empty(); }
  const std::string& source() const;
};

/// Code inside the first fenced block, or the whole reply when unfenced.
std::string extract_code(const std::string& reply);

/// Translate-check-retry loop; stops at the first clean round.
TranslationSession nl2dsl(const std::string& query_text, LlmTransport& transport,
                          const PromptSet& prompts, int max_rounds = 5, EventLog* log = nullptr);

}  // namespace itin
