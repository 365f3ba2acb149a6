#include <algorithm>
#include <fstream>
#include <sstream>

#include "itin/concepts.hpp"
#include "itin/llm.hpp"

namespace itin {

namespace {

bool is_key_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string user_requirements(const QueryContext& q) {
  if (!q.text.empty()) return q.text;
  std::ostringstream out;
  out << "From " << q.start_city << " to " << q.target_city << ", " << q.days << " day(s), "
      << q.people << " traveller(s).";
  for (const auto& p : q.constraints) out << "\nRequirement:\n" << dsl::pretty_print(p);
  return out.str();
}

std::map<std::string, std::string> common_values(const SearchState& s, const QueryContext& q) {
  return {{"user_requirements", user_requirements(q)},
          {"past_cost", s.cost.to_string()},
          {"days", std::to_string(q.days)}};
}

std::string candidate_table(const std::vector<Candidate>& cs, bool beds) {
  std::ostringstream out;
  for (const auto& c : cs) {
    out << c.name << " | " << c.category << " | " << c.price.to_string();
    if (beds) out << " | " << c.numbed;
    out << "\n";
  }
  return out.str();
}

std::string strip_quotes(std::string s) {
  s = trim(s);
  while (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string concept_listing() {
  std::ostringstream out;
  for (const auto& c : concept_table()) {
    out << c.name << " (" << c.min_args;
    if (c.max_args != c.min_args) out << "-" << c.max_args;
    out << " args)\n";
  }
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------

ReplayTransport ReplayTransport::parse(std::string_view jsonl) {
  ReplayTransport t;
  int lineno = 0;
  for (const auto& line : lines_of(std::string(jsonl))) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("transcript line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("hash") || !j.contains("reply") || !j["hash"].is_string() ||
        !j["reply"].is_string()) {
      throw SchemaError("transcript line " + std::to_string(lineno) +
                        ": expected {\"hash\": string, \"reply\": string}");
    }
    t.replies_[j["hash"].get<std::string>()] = j["reply"].get<std::string>();
  }
  return t;
}

ReplayTransport ReplayTransport::load(const std::filesystem::path& transcript) {
  std::ifstream in(transcript);
  if (!in) throw LoadError("cannot read transcript " + transcript.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ReplayTransport::add(const std::string& prompt, std::string reply) {
  replies_[fnv1a_hex(prompt)] = std::move(reply);
}

std::string ReplayTransport::complete(const std::string& prompt) {
  auto it = replies_.find(fnv1a_hex(prompt));
  if (it == replies_.end()) throw TransportError("no recorded reply for prompt " + fnv1a_hex(prompt));
  return it->second;
}

std::string RecordingTransport::complete(const std::string& prompt) {
  std::string reply = inner_.complete(prompt);
  json j = json::object();
  j["hash"] = fnv1a_hex(prompt);
  j["reply"] = reply;
  std::lock_guard<std::mutex> lock(mu_);
  out_ << j.dump() << "\n";
  return reply;
}

void EventLog::degradation(std::string_view op, std::string_view reason) {
  std::lock_guard<std::mutex> lock(mu_);
  json j = json::object();
  j["event"] = "degradation";
  j["seq"] = events_.size() + 1;
  j["op"] = std::string(op);
  j["reason"] = std::string(reason);
  if (sink_) *sink_ << j.dump() << "\n";
  events_.push_back(std::move(j));
}

std::size_t EventLog::count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_.size();
}

std::vector<json> EventLog::events() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet p = defaults();
  for (const auto& name : p.names()) {
    auto file = dir / (name + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file);
    if (!in) throw LoadError("cannot read prompt " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    p.set(name, ss.str());
  }
  return p;
}

const std::string& PromptSet::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw NotFoundError("no prompt template '" + name + "'");
  return it->second;
}

std::vector<std::string> PromptSet::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

std::string render_prompt(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_key_char(tmpl[j])) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        std::string key = tmpl.substr(i + 1, j - i - 1);
        auto it = values.find(key);
        if (it == values.end()) throw ConfigError("prompt placeholder {" + key + "} has no value");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::optional<std::vector<std::string>> parse_name_list(const std::string& reply) {
  for (const auto& raw : lines_of(reply)) {
    std::string line = trim(raw);
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string head = line.substr(0, colon);
    if (head.size() < 8 || head.compare(head.size() - 8, 8, "NameList") != 0) continue;
    if (!std::all_of(head.begin(), head.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
      continue;
    }
    std::string body = trim(line.substr(colon + 1));
    if (!body.empty() && body.front() == '[') body.erase(body.begin());
    if (!body.empty() && body.back() == ']') body.pop_back();
    std::vector<std::string> names;
    std::string item;
    std::istringstream in(body);
    while (std::getline(in, item, ',')) {
      std::string n = strip_quotes(item);
      if (!n.empty()) names.push_back(n);
    }
    return names;
  }
  return std::nullopt;
}

std::optional<std::string> parse_type_line(const std::string& reply) {
  for (const auto& raw : lines_of(reply)) {
    std::string line = trim(raw);
    if (line.rfind("Type:", 0) == 0) return strip_quotes(line.substr(5));
  }
  return std::nullopt;
}

std::vector<Candidate> order_by_names(const std::vector<Candidate>& candidates,
                                      const std::vector<std::string>& names) {
  std::vector<Candidate> picked;
  for (const auto& n : names) {
    Candidate c;
    c.name = n;
    picked.push_back(std::move(c));
  }
  return repair_permutation(candidates, picked);
}

std::string describe_state(const SearchState& s) {
  std::ostringstream out;
  for (const auto& day : s.plan.itinerary) {
    for (const auto& a : day.activities) {
      out << "day " << day.day << " " << a.start_time.value_or("?") << "-"
          << a.end_time.value_or("?") << " " << activity_type_name(a.type) << " ";
      if (is_intercity(a.type)) {
        out << a.start.value_or("") << " -> " << a.end.value_or("");
      } else {
        out << a.pos_or_empty();
      }
      out << "\n";
    }
  }
  std::string text = out.str();
  return text.empty() ? "(nothing yet)\n" : text;
}

std::vector<Candidate> llm_rank(NextStep step, const std::vector<Candidate>& candidates,
                                const SearchState& state, const QueryContext& query,
                                LlmTransport& transport, const PromptSet& prompts, EventLog* log) {
  HeuristicRanker fallback;
  std::string tmpl;
  auto values = common_values(state, query);
  if (is_meal_step(step)) {
    tmpl = "rank_restaurants";
    values["restaurant_info"] = candidate_table(candidates, false);
  } else if (step == NextStep::attraction) {
    tmpl = "rank_attractions";
    values["attraction_info"] = candidate_table(candidates, false);
  } else if (step == NextStep::accommodation) {
    tmpl = "rank_hotels";
    values["hotel_info"] = candidate_table(candidates, true);
  } else {
    return fallback.rank(step, candidates, state, query);  // routes are ranked by rules
  }
  std::string reply;
  try {
    reply = transport.complete(render_prompt(prompts.get(tmpl), values));
  } catch (const TransportError& e) {
    if (log) log->degradation("llm_rank", std::string("transport: ") + e.what());
    return fallback.rank(step, candidates, state, query);
  }
  auto names = parse_name_list(reply);
  if (!names) {
    if (log) log->degradation("llm_rank", "reply has no name list");
    return fallback.rank(step, candidates, state, query);
  }
  return order_by_names(candidates, *names);
}

std::optional<NextStep> next_type_hint(const SearchState& state, const QueryContext& query,
                                       LlmTransport& transport, const PromptSet& prompts,
                                       EventLog* log) {
  auto values = common_values(state, query);
  values["day"] = std::to_string(state.day + 1);
  values["clock"] = state.clock.to_string();
  values["position"] = state.position.empty() ? "the start" : state.position;
  values["current_plan"] = describe_state(state);
  values["options"] = "attraction, breakfast, lunch, dinner, accommodation, inbound";
  std::string reply;
  try {
    reply = transport.complete(render_prompt(prompts.get("next_type"), values));
  } catch (const TransportError& e) {
    if (log) log->degradation("next_type_hint", std::string("transport: ") + e.what());
    return std::nullopt;
  }
  auto type = parse_type_line(reply);
  if (!type) {
    if (log) log->degradation("next_type_hint", "reply has no Type line");
    return std::nullopt;
  }
  // A well-formed but unknown answer is simply not a usable hint.
  return parse_step(to_lower(*type));
}

std::vector<Candidate> LlmRanker::rank(NextStep step, std::vector<Candidate> candidates,
                                       const SearchState& state, const QueryContext& query) {
  return llm_rank(step, candidates, state, query, transport_, prompts_, log_);
}

std::optional<NextStep> LlmStepAdvisor::suggest(const SearchState& state, const QueryContext& query,
                                                NextStep cascade) {
  // Trip boundaries are decided by the rules; asking would only cost a call.
  if (cascade == NextStep::outbound || cascade == NextStep::finish) return std::nullopt;
  return next_type_hint(state, query, transport_, prompts_, log_);
}

const std::string& TranslationSession::source() const {
  static const std::string empty;
  return rounds.empty() ? empty : rounds.back().source;
}

std::string extract_code(const std::string& reply) {
  auto open = reply.find("```");
  if (open == std::string::npos) return reply;
  auto body = reply.find('\n', open);
  if (body == std::string::npos) return "";
  auto close = reply.find("```", body + 1);
  std::string code = reply.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
  return code;
}

namespace {

std::vector<dsl::Diagnostic> check_manifest(const std::string& source) {
  std::vector<dsl::Diagnostic> out;
  auto blocks = dsl::parse_manifest(source);
  if (blocks.empty()) {
    out.push_back({dsl::Severity::error, {1, 1}, "no program found", "start each program with `--- name`"});
    return out;
  }
  for (const auto& b : blocks) {
    for (auto d : dsl::check_syntax(b.source)) {
      d.pos.line += b.first_line - 1;
      d.message = b.name + ": " + d.message;
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace

TranslationSession nl2dsl(const std::string& query_text, LlmTransport& transport,
                          const PromptSet& prompts, int max_rounds, EventLog* log) {
  TranslationSession s;
  s.query = query_text;
  s.max_rounds = max_rounds;
  std::string feedback;
  for (int round = 0; round < max_rounds; ++round) {
    std::map<std::string, std::string> values = {
        {"concepts", concept_listing()}, {"user_requirements", query_text}, {"feedback", feedback}};
    std::string reply;
    try {
      reply = transport.complete(render_prompt(prompts.get("nl2dsl"), values));
    } catch (const TransportError& e) {
      s.error = e.what();
      if (log) log->degradation("nl2dsl", std::string("transport: ") + e.what());
      return s;
    }
    TranslationRound r;
    r.source = extract_code(reply);
    r.diagnostics = check_manifest(r.source);
    bool clean = r.diagnostics.empty();
    std::ostringstream fb;
    if (!clean) {
      fb << "\nYour previous answer:\n```\n" << r.source << "```\nThe checker reported:\n";
      for (const auto& d : r.diagnostics) fb << d.format("program") << "\n";
      fb << "Fix every problem and answer again.\n";
    }
    feedback = fb.str();
    s.rounds.push_back(std::move(r));
    if (clean) break;
  }
  return s;
}

}  // namespace itin
