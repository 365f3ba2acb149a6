#pragma once

// Exhaustive enumeration over the planner's own expansion primitives, with
// no ranking, no branching cap and no pruning.

#include "itin/evaluator.hpp"
#include "itin/planner.hpp"

namespace testing_support {

using namespace itin;

struct EnumResult {
  int plans = 0;         // complete plans reached
  int full_pass = 0;     // of which pass env and every constraint
  bool overflow = false; // stopped at the plan limit
  std::optional<Plan> first_full;
};

inline void enumerate_from(const SearchState& s, const QueryContext& q, const Sandbox& sb,
                           const SearchConfig& cfg, int limit, EnumResult& out) {
  if (out.overflow) return;
  NextStep step = next_activity_type(s, q, sb, cfg);
  if (step == NextStep::finish) {
    if (++out.plans > limit) {
      out.overflow = true;
      return;
    }
    EvalReport r = evaluate_plan(s.plan, q.constraints, sb);
    bool ok = r.env.overall() && std::all_of(r.logical.begin(), r.logical.end(), [](bool b) { return b; });
    if (ok) {
      ++out.full_pass;
      if (!out.first_full) out.first_full = s.plan;
    }
    return;
  }
  bool any = false;
  for (const auto& c : candidates_for(step, s, q, sb)) {
    auto child = schedule_activity(s, c, step, q, sb, cfg);
    if (!child) continue;
    any = true;
    enumerate_from(*child, q, sb, cfg, limit, out);
  }
  if (!any && can_skip(step)) enumerate_from(skip_step(s, step), q, sb, cfg, limit, out);
}

inline EnumResult enumerate_plans(const QueryContext& q, const Sandbox& sb,
                                  const SearchConfig& cfg = {}, int limit = 200) {
  EnumResult out;
  enumerate_from(initial_state(q), q, sb, cfg, limit, out);
  return out;
}

}  // namespace testing_support
