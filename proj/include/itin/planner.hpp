#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "itin/dsl.hpp"
#include "itin/json.hpp"
#include "itin/plan.hpp"
#include "itin/sandbox.hpp"

namespace itin {

/// Spending bound recognised from a constraint of the shape
/// `total = 0; for a in allactivities(plan): total += <cost terms>; return total <= N`.
struct BudgetBound {
  Decimal limit;
  bool strict = false;            // `<` rather than `<=`
  bool activity_costs = false;    // sums activity_cost
  bool transport_costs = false;   // sums innercity_transport_cost
};

/// Values a query's constraints compare concept results against. Used to
/// steer candidate order and transport choice, never to decide acceptance.
struct Requirements {
  std::set<std::string> cuisines;
  std::set<std::string> attraction_types;
  std::set<std::string> hotel_features;
  std::set<std::string> positions;
  std::optional<TransportMode> innercity_mode;
  std::optional<RouteKind> intercity_kind;
  std::optional<int> room_type;
  std::optional<int> room_count;
  bool mentions_cost = false;
  std::optional<BudgetBound> budget;
};

Requirements derive_requirements(const std::vector<dsl::Program>& constraints);

struct QueryContext {
  std::string start_city;
  std::string target_city;
  int days = 1;
  int people = 1;
  std::vector<dsl::Program> constraints;
  std::string text;  // natural-language request, optional
  Requirements req;

  /// Parses the sources and derives requirements. Throws dsl::SyntaxError.
  static QueryContext make(std::string start, std::string target, int days, int people,
                           const std::vector<std::string>& sources, std::string text = "");
};

enum class MealSlot { breakfast = 0, lunch = 1, dinner = 2 };

struct SearchState {
  Plan plan;
  int day = 0;  // index into plan.itinerary
  ClockTime clock;
  std::string position;
  std::array<bool, 3> meal_done{};
  std::array<bool, 3> meal_skipped{};
  bool attractions_blocked = false;
  std::set<std::string> visited;  // attractions and restaurants
  std::optional<std::string> hotel;
  bool finished = false;
  Decimal cost;            // activity costs plus leg costs
  Decimal activity_cost;   // activity costs only
  Decimal transport_cost;  // leg costs only

  std::size_t activity_count() const;
  friend bool operator==(const SearchState&, const SearchState&) = default;
};

struct SearchConfig {
  double budget_secs = 300;
  int activity_minutes = 90;
  std::array<ClockTime, 3> trigger_open = {ClockTime::hm(6, 30), ClockTime::hm(10, 30),
                                           ClockTime::hm(17, 0)};
  std::array<ClockTime, 3> trigger_close = {ClockTime::hm(8, 30), ClockTime::hm(12, 30),
                                            ClockTime::hm(19, 0)};
  ClockTime hotel_cutoff = ClockTime::hm(22, 0);
  ClockTime day_start = ClockTime::hm(8, 0);
  int return_margin_minutes = 30;  // transfer allowance before the last departure
  int max_branching = 10;
  int nearby_topk = 10;
  double nearby_km = 10;
  std::uint64_t max_nodes = 0;  // 0 = unlimited
  bool budget_pruning = true;
  /// Receives (node, action, clock) per expansion when set.
  std::function<void(std::uint64_t, const std::string&, ClockTime)> trace;

  /// Throws ConfigError.
  void validate() const;
};

/// Applies `key = value` overrides (same syntax as fares.cfg).
SearchConfig parse_search_config(std::string_view text, SearchConfig base = {});

enum class NextStep { outbound, attraction, breakfast, lunch, dinner, accommodation, inbound, finish };

std::string_view step_name(NextStep step);
std::optional<NextStep> parse_step(std::string_view text);
bool is_meal_step(NextStep step);

struct Candidate {
  std::string name;      // POI name or route id
  Decimal price;
  std::string category;  // cuisine, attraction type, hotel feature or route kind
  int numbed = 0;
  const IntercityRoute* route = nullptr;
};

/// Orders candidates for one expansion. Must return a permutation; the
/// planner repairs anything else (drops unknowns, appends missing).
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::vector<Candidate> rank(NextStep step, std::vector<Candidate> candidates,
                                      const SearchState& state, const QueryContext& query) = 0;
};

/// Required-term matches first, then price ascending when the query talks
/// about cost; stable otherwise.
class HeuristicRanker : public Ranker {
 public:
  std::vector<Candidate> rank(NextStep step, std::vector<Candidate> candidates,
                              const SearchState& state, const QueryContext& query) override;
};

/// Optional override of the rule cascade. Returning nullopt, or a step that
/// is not allowed in the state, keeps the cascade's choice.
class StepAdvisor {
 public:
  virtual ~StepAdvisor() = default;
  virtual std::optional<NextStep> suggest(const SearchState& state, const QueryContext& query,
                                          NextStep cascade) = 0;
};

SearchState initial_state(const QueryContext& query);
NextStep next_activity_type(const SearchState& state, const QueryContext& query,
                            const Sandbox& sandbox, const SearchConfig& cfg);
/// Whether the advisor may replace `cascade` with `hint` in this state.
bool step_allowed(const SearchState& state, const QueryContext& query, NextStep cascade, NextStep hint);
/// Unranked candidates in database order (routes by departure, then id).
std::vector<Candidate> candidates_for(NextStep step, const SearchState& state,
                                      const QueryContext& query, const Sandbox& sandbox);
/// Child state, or nullopt when the candidate cannot be scheduled.
std::optional<SearchState> schedule_activity(const SearchState& state, const Candidate& candidate,
                                             NextStep step, const QueryContext& query,
                                             const Sandbox& sandbox, const SearchConfig& cfg);
/// Meals and attractions can be skipped when nothing is feasible.
bool can_skip(NextStep step);
SearchState skip_step(const SearchState& state, NextStep step);

/// Transport mode for a move of `distance_km`.
TransportMode choose_mode(const QueryContext& query, Decimal distance_km);

/// True when the monotone budget bound already fails for the state.
bool violates_budget(const SearchState& state, const Requirements& req);

enum class SearchStatus { full_pass, env_only_best, partial, empty };
std::string_view status_name(SearchStatus s);

struct SearchOutcome {
  SearchStatus status = SearchStatus::empty;
  Plan plan;
  std::uint64_t nodes = 0;
  double elapsed_secs = 0;
  int constraints_passed = 0;
  int complete_plans = 0;  // complete plans validated
  bool exhausted = false;  // whole tree explored before any limit hit
};

/// Throws ConfigError for a non-positive budget.
SearchOutcome dfs_search(const QueryContext& query, const Sandbox& sandbox, Ranker& ranker,
                         const SearchConfig& cfg, StepAdvisor* advisor = nullptr);

/// Reorders `ranked` into a permutation of `original` (by name).
std::vector<Candidate> repair_permutation(const std::vector<Candidate>& original,
                                          const std::vector<Candidate>& ranked);

json outcome_to_json(const SearchOutcome& o, bool with_timing);

}  // namespace itin
