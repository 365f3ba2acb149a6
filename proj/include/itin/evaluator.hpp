#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "itin/common.hpp"
#include "itin/dsl.hpp"
#include "itin/json.hpp"
#include "itin/plan.hpp"
#include "itin/sandbox.hpp"

namespace itin {

struct InputError : Error {
  using Error::Error;
};
struct UndefinedMetricError : Error {
  using Error::Error;
};

/// Exact non-negative rational, always reduced.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction of(std::int64_t n, std::int64_t d);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b);
  friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
};

struct RuleInfo {
  std::string_view id;
  std::string_view category;
  std::string_view description;
};

/// The 25 environment rules in report order.
const std::vector<RuleInfo>& env_rules();
std::size_t env_rule_count();
/// Position of a rule id in `env_rules()`; throws KeyError.
std::size_t env_rule_index(std::string_view id);

struct RuleOutcome {
  std::string id;
  bool passed = true;
  std::vector<std::string> details;  // one line per violation
};

struct EnvReport {
  std::vector<RuleOutcome> rules;  // always env_rule_count() entries
  bool overall() const;
  const RuleOutcome& rule(std::string_view id) const;
  std::vector<std::string> failed_ids() const;
  /// All rules false; used for undelivered plans.
  static EnvReport all_failed();
};

EnvReport validate_env(const Plan& plan, const Sandbox& sandbox);

struct EvalReport {
  bool delivered = false;
  EnvReport env = EnvReport::all_failed();
  std::vector<bool> logical;
  std::map<std::string, Decimal> preference_values;
  std::string error;  // parse/schema message when not delivered
};

/// Full per-plan evaluation. `plan_text` is null when no plan was delivered.
EvalReport evaluate_plan(const std::string* plan_text, const std::vector<dsl::Program>& constraints,
                         const Sandbox& sandbox);
EvalReport evaluate_plan(const Plan& plan, const std::vector<dsl::Program>& constraints,
                         const Sandbox& sandbox);

struct MetricSummary {
  Fraction dr, epr_micro, epr_macro, lpr_micro, lpr_macro, c_lpr, fpr;
};

/// Throws UndefinedMetricError on an empty set.
MetricSummary score(const std::vector<EvalReport>& reports);

/// Runs the program and returns its number; -1 sentinels pass through.
/// Non-numeric results throw dsl::EvalError.
Decimal preference_value(const Plan& plan, const dsl::Program& program, const Sandbox* sandbox);

enum class Direction { maximize, minimize };

/// Average rank per method (1 = best, ties share the mean rank, -1 is
/// always ranked worst). Throws InputError when query counts differ.
std::map<std::string, Fraction> preference_ranking(
    const std::map<std::string, std::vector<Decimal>>& values_by_method, Direction direction);

/// Mean over preferences of the per-preference average ranks.
std::map<std::string, Fraction> aggregate_ranking(
    const std::vector<std::map<std::string, Fraction>>& per_preference);

json env_report_to_json(const EnvReport& r);
json eval_report_to_json(const EvalReport& r);
json summary_to_json(const MetricSummary& s);
/// Aligned text table with the seven metric columns, values in percent.
std::string summary_table(const MetricSummary& s, std::string_view label);

}  // namespace itin
