#include "itin/planner.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "itin/concepts.hpp"
#include "itin/evaluator.hpp"

namespace itin {

namespace {

using dsl::Expr;
using dsl::Stmt;

// ---------------------------------------------------------------------------
// Requirement extraction

using ConceptSet = std::set<std::string>;

class RequirementScan {
 public:
  explicit RequirementScan(Requirements& out) : out_(out) {}

  void program(const dsl::Program& p) {
    vars_.clear();
    // Two passes so variables assigned later in the text still resolve.
    for (int pass = 0; pass < 2; ++pass) collect_vars(p.body);
    walk(p.body);
    if (auto b = recognise_budget(p)) {
      if (!out_.budget || b->limit < out_.budget->limit) out_.budget = b;
    }
  }

 private:
  void collect_vars(const dsl::Block& b) {
    for (const auto& st : b) {
      if (st->kind == Stmt::Kind::assign || st->kind == Stmt::Kind::for_in) {
        ConceptSet cs = concepts_in(*st->expr);
        vars_[st->target].insert(cs.begin(), cs.end());
      }
      collect_vars(st->body);
      for (const auto& br : st->branches) collect_vars(br.second);
      if (st->orelse) collect_vars(*st->orelse);
    }
  }

  ConceptSet concepts_in(const Expr& e) const {
    ConceptSet out;
    if (e.kind == Expr::Kind::call) {
      if (auto c = resolve_concept(e.text)) out.insert(*c);
    } else if (e.kind == Expr::Kind::name) {
      if (auto it = vars_.find(e.text); it != vars_.end()) out = it->second;
    }
    for (const auto& a : e.args) {
      ConceptSet sub = concepts_in(*a);
      out.insert(sub.begin(), sub.end());
    }
    return out;
  }

  static void literals_in(const Expr& e, std::vector<const Expr*>& out) {
    switch (e.kind) {
      case Expr::Kind::text:
      case Expr::Kind::number:
        out.push_back(&e);
        return;
      case Expr::Kind::list:
      case Expr::Kind::set:
        for (const auto& a : e.args) literals_in(*a, out);
        return;
      default:
        return;
    }
  }

  void walk(const dsl::Block& b) {
    for (const auto& st : b) {
      if (st->expr) expr(*st->expr);
      walk(st->body);
      for (const auto& br : st->branches) {
        expr(*br.first);
        walk(br.second);
      }
      if (st->orelse) walk(*st->orelse);
    }
  }

  void expr(const Expr& e) {
    if (e.kind == Expr::Kind::compare) {
      for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
        relate(*e.args[i], *e.args[i + 1]);
        relate(*e.args[i + 1], *e.args[i]);
      }
    }
    for (const auto& a : e.args) expr(*a);
  }

  void relate(const Expr& side, const Expr& other) {
    ConceptSet cs = concepts_in(side);
    if (cs.empty()) return;
    std::vector<const Expr*> lits;
    literals_in(other, lits);
    if (cs.count("activity_cost") || cs.count("innercity_transport_cost")) out_.mentions_cost = true;
    for (const Expr* lit : lits) {
      for (const auto& c : cs) apply(c, *lit);
    }
  }

  void apply(const std::string& concept_name, const Expr& lit) {
    if (lit.kind == Expr::Kind::text) {
      const std::string& v = lit.text;
      if (concept_name == "restaurant_type") {
        out_.cuisines.insert(v);
      } else if (concept_name == "attraction_type") {
        out_.attraction_types.insert(v);
      } else if (concept_name == "accommodation_type") {
        out_.hotel_features.insert(v);
      } else if (concept_name == "activity_position") {
        out_.positions.insert(v);
      } else if (concept_name == "innercity_transport_type") {
        if (auto m = parse_mode(v)) out_.innercity_mode = m;
      } else if (concept_name == "intercity_transport_type") {
        if (auto k = parse_route_kind(v)) out_.intercity_kind = k;
      }
    } else if (lit.number.is_integer()) {
      int n = static_cast<int>(lit.number.floor());
      if (concept_name == "room_type" && n > 0) out_.room_type = n;
      if (concept_name == "room_count" && n > 0) out_.room_count = n;
    }
  }

  // Exact shape only: `v = 0`, unconditional `v += terms` in a loop over
  // allactivities(plan), `return v <= N`. Anything else yields no bound,
  // since pruning on a looser quantity could reject valid plans.
  std::optional<BudgetBound> recognise_budget(const dsl::Program& p) const {
    const auto& body = p.body;
    if (body.empty() || body.back()->kind != Stmt::Kind::ret) return std::nullopt;
    const Expr& r = *body.back()->expr;
    if (r.kind != Expr::Kind::compare || r.ops.size() != 1) return std::nullopt;
    if (r.ops[0] != "<=" && r.ops[0] != "<") return std::nullopt;
    if (r.args[0]->kind != Expr::Kind::name || r.args[1]->kind != Expr::Kind::number) {
      return std::nullopt;
    }
    const std::string var = r.args[0]->text;
    BudgetBound b;
    b.limit = r.args[1]->number;
    b.strict = r.ops[0] == "<";
    bool init = false;
    for (std::size_t i = 0; i + 1 < body.size(); ++i) {
      const Stmt& st = *body[i];
      if (st.kind == Stmt::Kind::assign && st.target == var) {
        if (st.op != "=" || st.expr->kind != Expr::Kind::number || st.expr->number != Decimal(0) ||
            init) {
          return std::nullopt;
        }
        init = true;
      } else if (st.kind == Stmt::Kind::for_in) {
        if (!init || !is_all_activities(*st.expr)) {
          if (mentions(st.body, var)) return std::nullopt;
          continue;
        }
        for (const auto& inner : st.body) {
          if (inner->kind == Stmt::Kind::assign && inner->target == st.target) return std::nullopt;
          if (inner->kind != Stmt::Kind::assign || inner->target != var) {
            if (mentions_block_stmt(*inner, var)) return std::nullopt;
            continue;
          }
          if (inner->op != "+=" || !cost_terms(*inner->expr, st.target, b)) return std::nullopt;
        }
      } else if (mentions_block_stmt(st, var)) {
        return std::nullopt;
      }
    }
    if (!init || (!b.activity_costs && !b.transport_costs)) return std::nullopt;
    return b;
  }

  static bool is_all_activities(const Expr& e) {
    return e.kind == Expr::Kind::call && resolve_concept(e.text) == "allactivities" &&
           e.args.size() == 1 && e.args[0]->kind == Expr::Kind::name && e.args[0]->text == "plan";
  }

  static bool cost_terms(const Expr& e, const std::string& loop_var, BudgetBound& b) {
    if (e.kind == Expr::Kind::binary && e.text == "+") {
      return cost_terms(*e.args[0], loop_var, b) && cost_terms(*e.args[1], loop_var, b);
    }
    if (e.kind != Expr::Kind::call || e.args.size() != 1) return false;
    auto c = resolve_concept(e.text);
    const Expr& arg = *e.args[0];
    if (c == "activity_cost" && arg.kind == Expr::Kind::name && arg.text == loop_var) {
      if (b.activity_costs) return false;  // counted twice
      b.activity_costs = true;
      return true;
    }
    if (c == "innercity_transport_cost" && arg.kind == Expr::Kind::call &&
        resolve_concept(arg.text) == "activity_transports" && arg.args.size() == 1 &&
        arg.args[0]->kind == Expr::Kind::name && arg.args[0]->text == loop_var) {
      if (b.transport_costs) return false;
      b.transport_costs = true;
      return true;
    }
    return false;
  }

  static bool mentions_expr(const Expr& e, const std::string& var) {
    if (e.kind == Expr::Kind::name && e.text == var) return true;
    return std::any_of(e.args.begin(), e.args.end(),
                       [&](const dsl::ExprPtr& a) { return mentions_expr(*a, var); });
  }

  static bool mentions_block_stmt(const Stmt& st, const std::string& var) {
    if (st.kind == Stmt::Kind::assign && st.target == var) return true;
    if (st.kind == Stmt::Kind::for_in && st.target == var) return true;
    if (st.expr && mentions_expr(*st.expr, var)) return true;
    if (mentions(st.body, var)) return true;
    for (const auto& br : st.branches) {
      if (mentions_expr(*br.first, var) || mentions(br.second, var)) return true;
    }
    return st.orelse && mentions(*st.orelse, var);
  }

  static bool mentions(const dsl::Block& b, const std::string& var) {
    return std::any_of(b.begin(), b.end(),
                       [&](const dsl::StmtPtr& s) { return mentions_block_stmt(*s, var); });
  }

  Requirements& out_;
  std::map<std::string, ConceptSet> vars_;
};

// ---------------------------------------------------------------------------
// Scheduling helpers

constexpr std::array<ClockTime, 3> kMealOpen = {ClockTime::hm(6, 0), ClockTime::hm(11, 0),
                                                ClockTime::hm(17, 0)};
constexpr std::array<ClockTime, 3> kMealClose = {ClockTime::hm(9, 0), ClockTime::hm(14, 0),
                                                 ClockTime::hm(20, 0)};
constexpr ClockTime kMidnight = ClockTime::hm(24, 0);

MealSlot slot_of(NextStep s) {
  switch (s) {
    case NextStep::breakfast:
      return MealSlot::breakfast;
    case NextStep::lunch:
      return MealSlot::lunch;
    default:
      return MealSlot::dinner;
  }
}

NextStep step_of(MealSlot m) {
  switch (m) {
    case MealSlot::breakfast:
      return NextStep::breakfast;
    case MealSlot::lunch:
      return NextStep::lunch;
    case MealSlot::dinner:
      return NextStep::dinner;
  }
  return NextStep::dinner;
}

ActivityType activity_of(NextStep s) {
  switch (s) {
    case NextStep::breakfast:
      return ActivityType::breakfast;
    case NextStep::lunch:
      return ActivityType::lunch;
    case NextStep::dinner:
      return ActivityType::dinner;
    case NextStep::accommodation:
      return ActivityType::accommodation;
    default:
      return ActivityType::attraction;
  }
}

std::size_t idx(MealSlot m) { return static_cast<std::size_t>(m); }

bool meal_pending(const SearchState& s, MealSlot m) {
  return !s.meal_done[idx(m)] && !s.meal_skipped[idx(m)];
}

bool final_day(const SearchState& s, const QueryContext& q) { return s.day + 1 >= q.days; }

std::vector<RouteKind> route_kinds() { return {RouteKind::train, RouteKind::airplane}; }

std::vector<IntercityRoute> routes_between(const Sandbox& sb, const std::string& from,
                                           const std::string& to, ClockTime earliest) {
  std::vector<IntercityRoute> out;
  if (!sb.has_city(from) || !sb.has_city(to)) return out;
  for (RouteKind k : route_kinds()) {
    auto part = sb.intercity_select(from, to, k, earliest);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const IntercityRoute& a, const IntercityRoute& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.id < b.id;
  });
  return out;
}

bool attraction_available(const SearchState& s, const QueryContext& q, const Sandbox& sb,
                          const SearchConfig& cfg) {
  if (s.attractions_blocked) return false;
  const CityDatabase& db = sb.city(q.target_city);
  if (!db.has_position(s.position)) return false;
  for (const auto& hit :
       nearby(db, TableKind::attractions, db.coordinates(s.position), cfg.nearby_topk, cfg.nearby_km)) {
    const std::string& name = hit.record.name();
    if (!s.visited.count(name) && is_open(db, TableKind::attractions, name, s.clock)) return true;
  }
  return false;
}

// A later meal of today whose trigger window has not opened yet.
std::optional<MealSlot> upcoming_meal(const SearchState& s, const SearchConfig& cfg,
                                      ClockTime must_start_before) {
  for (MealSlot m : {MealSlot::breakfast, MealSlot::lunch, MealSlot::dinner}) {
    if (!meal_pending(s, m)) continue;
    if (cfg.trigger_open[idx(m)] > s.clock && cfg.trigger_open[idx(m)] < must_start_before) {
      return m;
    }
  }
  return std::nullopt;
}

std::optional<MealSlot> triggered_meal(const SearchState& s, const SearchConfig& cfg) {
  for (MealSlot m : {MealSlot::breakfast, MealSlot::lunch, MealSlot::dinner}) {
    if (!meal_pending(s, m)) continue;
    if (cfg.trigger_open[idx(m)] <= s.clock && s.clock <= cfg.trigger_close[idx(m)]) return m;
  }
  return std::nullopt;
}

std::optional<ClockTime> latest_return(const SearchState& s, const QueryContext& q,
                                       const Sandbox& sb) {
  auto routes = routes_between(sb, q.target_city, q.start_city, s.clock);
  if (routes.empty()) return std::nullopt;
  ClockTime best = routes.front().begin;
  for (const auto& r : routes) best = std::max(best, r.begin);
  return best;
}

struct Move {
  std::vector<TransportLeg> legs;
  ClockTime arrival;
  Decimal cost;
};

std::optional<Move> move_to(const SearchState& s, const std::string& dest, const QueryContext& q,
                            const Sandbox& sb) {
  Move m;
  m.arrival = s.clock;
  if (dest == s.position) return m;
  const CityDatabase& db = sb.city(q.target_city);
  if (!db.has_position(s.position) || !db.has_position(dest)) return std::nullopt;
  TransportMode mode = choose_mode(q, position_distance(db, s.position, dest));
  TransportOption opt = goto_poi(db, sb.fares, s.position, dest, s.clock, mode, q.people);
  m.legs = std::move(opt.legs);
  m.arrival = s.clock + opt.minutes;
  for (const auto& l : m.legs) m.cost += l.cost;
  return m;
}

DayPlan& today(SearchState& s) { return s.plan.itinerary.at(static_cast<std::size_t>(s.day)); }

void push(SearchState& s, Activity a, Decimal transport) {
  Decimal act = a.cost.value_or(Decimal(0));
  s.activity_cost += act;
  s.transport_cost += transport;
  s.cost += act + transport;
  today(s).activities.push_back(std::move(a));
}

Candidate route_candidate(const IntercityRoute& r) {
  Candidate c;
  c.name = r.id;
  c.price = r.cost;
  c.category = std::string(route_kind_name(r.kind));
  c.route = &r;
  return c;
}

std::optional<SearchState> schedule_intercity(const SearchState& s, const IntercityRoute& r,
                                              bool outbound, const QueryContext& q,
                                              const Sandbox& sb) {
  Activity a;
  a.type = r.kind == RouteKind::train ? ActivityType::train : ActivityType::airplane;
  a.start = r.from;
  a.end = r.to;
  a.start_time = r.begin.to_string();
  a.end_time = r.end.to_string();
  a.price = r.cost;
  a.cost = r.cost * Decimal(q.people);
  a.tickets = q.people;
  if (r.kind == RouteKind::train) {
    a.train_id = r.id;
  } else {
    a.flight_id = r.id;
  }
  SearchState n = s;
  Decimal transport;
  if (!outbound) {
    auto m = move_to(s, r.from, q, sb);
    if (!m || m->arrival > r.begin) return std::nullopt;
    a.transports = std::move(m->legs);
    transport = m->cost;
    n.finished = true;
  } else if (r.begin < s.clock) {
    return std::nullopt;
  }
  push(n, std::move(a), transport);
  n.clock = r.end;
  n.position = r.to;
  return n;
}

void next_day(SearchState& n, const SearchConfig& cfg) {
  ++n.day;
  n.plan.itinerary.push_back(DayPlan{n.day + 1, {}, json::object()});
  n.clock = cfg.day_start;
  n.meal_done = {};
  n.meal_skipped = {};
  n.attractions_blocked = false;
}

}  // namespace

// ---------------------------------------------------------------------------

Requirements derive_requirements(const std::vector<dsl::Program>& constraints) {
  Requirements r;
  RequirementScan scan(r);
  for (const auto& p : constraints) scan.program(p);
  if (r.budget) r.mentions_cost = true;
  return r;
}

QueryContext QueryContext::make(std::string start, std::string target, int days, int people,
                                const std::vector<std::string>& sources, std::string text) {
  QueryContext q;
  q.start_city = std::move(start);
  q.target_city = std::move(target);
  q.days = days;
  q.people = people;
  q.text = std::move(text);
  for (const auto& src : sources) q.constraints.push_back(dsl::parse(src));
  q.req = derive_requirements(q.constraints);
  return q;
}

std::size_t SearchState::activity_count() const {
  std::size_t n = 0;
  for (const auto& d : plan.itinerary) n += d.activities.size();
  return n;
}

void SearchConfig::validate() const {
  if (!(budget_secs > 0)) throw ConfigError("search budget must be positive");
  if (activity_minutes <= 0) throw ConfigError("activity duration must be positive");
  if (max_branching <= 0) throw ConfigError("max branching must be positive");
  if (nearby_topk <= 0 || !(nearby_km > 0)) throw ConfigError("nearby radius must be positive");
  for (std::size_t i = 0; i < 3; ++i) {
    if (trigger_close[i] < trigger_open[i]) throw ConfigError("meal trigger window is inverted");
  }
}

SearchConfig parse_search_config(std::string_view text, SearchConfig cfg) {
  auto number = [](const std::string& key, const std::string& v) {
    try {
      return Decimal::parse(v);
    } catch (const std::invalid_argument&) {
      throw ConfigError("search config: bad value '" + v + "' for " + key);
    }
  };
  auto clock = [](const std::string& key, const std::string& v) {
    auto t = ClockTime::try_parse(v);
    if (!t) throw ConfigError("search config: bad time '" + v + "' for " + key);
    return *t;
  };
  static const char* kMeals[] = {"breakfast", "lunch", "dinner"};
  for (const auto& [key, value] : parse_key_values(text, "search config")) {
    bool meal_key = false;
    for (std::size_t i = 0; i < 3; ++i) {
      if (key == std::string(kMeals[i]) + "_trigger_open") {
        cfg.trigger_open[i] = clock(key, value);
        meal_key = true;
      } else if (key == std::string(kMeals[i]) + "_trigger_close") {
        cfg.trigger_close[i] = clock(key, value);
        meal_key = true;
      }
    }
    if (meal_key) continue;
    if (key == "budget_secs") {
      cfg.budget_secs = number(key, value).to_double();
    } else if (key == "activity_minutes") {
      cfg.activity_minutes = static_cast<int>(number(key, value).floor());
    } else if (key == "hotel_cutoff") {
      cfg.hotel_cutoff = clock(key, value);
    } else if (key == "day_start") {
      cfg.day_start = clock(key, value);
    } else if (key == "return_margin_minutes") {
      cfg.return_margin_minutes = static_cast<int>(number(key, value).floor());
    } else if (key == "max_branching") {
      cfg.max_branching = static_cast<int>(number(key, value).floor());
    } else if (key == "nearby_topk") {
      cfg.nearby_topk = static_cast<int>(number(key, value).floor());
    } else if (key == "nearby_km") {
      cfg.nearby_km = number(key, value).to_double();
    } else if (key == "max_nodes") {
      cfg.max_nodes = static_cast<std::uint64_t>(number(key, value).floor());
    } else if (key == "budget_pruning") {
      if (value != "true" && value != "false") throw ConfigError("budget_pruning must be true or false");
      cfg.budget_pruning = value == "true";
    } else {
      throw ConfigError("search config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string_view step_name(NextStep step) {
  switch (step) {
    case NextStep::outbound:
      return "outbound";
    case NextStep::attraction:
      return "attraction";
    case NextStep::breakfast:
      return "breakfast";
    case NextStep::lunch:
      return "lunch";
    case NextStep::dinner:
      return "dinner";
    case NextStep::accommodation:
      return "accommodation";
    case NextStep::inbound:
      return "inbound";
    case NextStep::finish:
      return "finish";
  }
  return "";
}

std::optional<NextStep> parse_step(std::string_view text) {
  for (NextStep s : {NextStep::outbound, NextStep::attraction, NextStep::breakfast, NextStep::lunch,
                     NextStep::dinner, NextStep::accommodation, NextStep::inbound, NextStep::finish}) {
    if (step_name(s) == text) return s;
  }
  return std::nullopt;
}

bool is_meal_step(NextStep step) {
  return step == NextStep::breakfast || step == NextStep::lunch || step == NextStep::dinner;
}

std::vector<Candidate> HeuristicRanker::rank(NextStep step, std::vector<Candidate> c,
                                             const SearchState&, const QueryContext& q) {
  const Requirements& r = q.req;
  auto matches = [&](const Candidate& x) {
    if (r.positions.count(x.name)) return true;
    switch (step) {
      case NextStep::breakfast:
      case NextStep::lunch:
      case NextStep::dinner:
        return r.cuisines.count(x.category) > 0;
      case NextStep::attraction:
        return r.attraction_types.count(x.category) > 0;
      case NextStep::accommodation:
        return r.hotel_features.count(x.category) > 0 || (r.room_type && x.numbed == *r.room_type);
      case NextStep::outbound:
      case NextStep::inbound:
        return r.intercity_kind && x.route && x.route->kind == *r.intercity_kind;
      case NextStep::finish:
        return false;
    }
    return false;
  };
  bool by_price = r.mentions_cost;
  std::stable_sort(c.begin(), c.end(), [&](const Candidate& a, const Candidate& b) {
    bool ma = matches(a), mb = matches(b);
    if (ma != mb) return ma;
    return by_price && a.price < b.price;
  });
  return c;
}

SearchState initial_state(const QueryContext& q) {
  SearchState s;
  s.plan.people_number = q.people;
  s.plan.start_city = q.start_city;
  s.plan.target_city = q.target_city;
  s.plan.itinerary.push_back(DayPlan{1, {}, json::object()});
  s.clock = ClockTime(0);
  return s;
}

NextStep next_activity_type(const SearchState& s, const QueryContext& q, const Sandbox& sb,
                            const SearchConfig& cfg) {
  if (s.finished) return NextStep::finish;
  if (s.activity_count() == 0) return NextStep::outbound;
  if (final_day(s, q)) {
    auto latest = latest_return(s, q, sb);
    if (!latest) return NextStep::inbound;
    ClockTime last_start = *latest + -(cfg.activity_minutes + cfg.return_margin_minutes);
    if (s.clock > last_start) return NextStep::inbound;
    if (auto m = triggered_meal(s, cfg)) return step_of(*m);
    if (attraction_available(s, q, sb, cfg)) return NextStep::attraction;
    if (auto m = upcoming_meal(s, cfg, last_start)) return step_of(*m);
    return NextStep::inbound;
  }
  if (auto m = triggered_meal(s, cfg)) return step_of(*m);
  if (s.clock >= cfg.hotel_cutoff) return NextStep::accommodation;
  if (attraction_available(s, q, sb, cfg)) return NextStep::attraction;
  if (auto m = upcoming_meal(s, cfg, cfg.hotel_cutoff)) return step_of(*m);
  return NextStep::accommodation;
}

bool step_allowed(const SearchState& s, const QueryContext& q, NextStep cascade, NextStep hint) {
  if (hint == cascade) return true;
  // Trip boundaries stay with the rules.
  if (cascade == NextStep::outbound || cascade == NextStep::finish) return false;
  switch (hint) {
    case NextStep::breakfast:
    case NextStep::lunch:
    case NextStep::dinner:
      return meal_pending(s, slot_of(hint));
    case NextStep::attraction:
      return !s.attractions_blocked;
    case NextStep::accommodation:
      return !final_day(s, q);
    case NextStep::inbound:
      return final_day(s, q);
    default:
      return false;
  }
}

std::vector<Candidate> candidates_for(NextStep step, const SearchState& s, const QueryContext& q,
                                      const Sandbox& sb) {
  std::vector<Candidate> out;
  switch (step) {
    case NextStep::outbound:
    case NextStep::inbound: {
      bool outbound = step == NextStep::outbound;
      const std::string& from = outbound ? q.start_city : q.target_city;
      const std::string& to = outbound ? q.target_city : q.start_city;
      if (!sb.has_city(from) || !sb.has_city(to)) return out;
      for (auto& r : routes_between(sb, from, to, outbound ? ClockTime(0) : s.clock)) {
        // Point at the stored route so candidates stay valid after return.
        const IntercityRoute* stored = sb.find_route(r.id);
        if (stored) out.push_back(route_candidate(*stored));
      }
      return out;
    }
    case NextStep::finish:
      return out;
    default:
      break;
  }
  if (!sb.has_city(q.target_city)) return out;
  const CityDatabase& db = sb.city(q.target_city);
  if (step == NextStep::accommodation) {
    const Table& t = db.hotels;
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (s.hotel && *s.hotel != t.name(r)) continue;
      Candidate c;
      c.name = t.name(r);
      c.price = t.number(r, t.column_index("price"));
      c.category = t.text(r, t.column_index("featurehoteltype"));
      c.numbed = static_cast<int>(t.number(r, t.column_index("numbed")).floor());
      out.push_back(std::move(c));
    }
    return out;
  }
  bool meal = is_meal_step(step);
  const Table& t = meal ? db.restaurants : db.attractions;
  std::size_t cat = t.column_index(meal ? "cuisinetype" : "type");
  std::size_t price = t.column_index("price");
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (s.visited.count(t.name(r))) continue;
    // Meals may wait for the window to open, so only attractions need to
    // be open right now.
    if (!meal && !is_open(db, TableKind::attractions, t.name(r), s.clock)) continue;
    Candidate c;
    c.name = t.name(r);
    c.price = t.number(r, price);
    c.category = t.text(r, cat);
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<SearchState> schedule_activity(const SearchState& s, const Candidate& c,
                                             NextStep step, const QueryContext& q,
                                             const Sandbox& sb, const SearchConfig& cfg) {
  if (s.finished) return std::nullopt;
  if (step == NextStep::outbound || step == NextStep::inbound) {
    const IntercityRoute* r = c.route ? c.route : sb.find_route(c.name);
    if (!r) return std::nullopt;
    return schedule_intercity(s, *r, step == NextStep::outbound, q, sb);
  }
  if (step == NextStep::finish || !sb.has_city(q.target_city)) return std::nullopt;
  const CityDatabase& db = sb.city(q.target_city);
  auto m = move_to(s, c.name, q, sb);
  if (!m) return std::nullopt;
  SearchState n = s;
  Activity a;
  a.type = activity_of(step);
  a.position = c.name;
  a.transports = std::move(m->legs);

  if (step == NextStep::accommodation) {
    const Table& t = db.hotels;
    auto row = t.find(c.name);
    if (!row || m->arrival >= kMidnight) return std::nullopt;
    int beds = static_cast<int>(t.number(*row, t.column_index("numbed")).floor());
    if (beds <= 0) return std::nullopt;
    int rooms = q.req.room_count ? *q.req.room_count : (q.people + beds - 1) / beds;
    a.start_time = m->arrival.to_string();
    a.end_time = kMidnight.to_string();
    a.price = t.number(*row, t.column_index("price"));
    a.rooms = rooms;
    a.room_type = beds;
    a.cost = *a.price * Decimal(rooms);
    push(n, std::move(a), m->cost);
    n.hotel = c.name;
    n.position = c.name;
    next_day(n, cfg);
    return n;
  }

  bool meal = is_meal_step(step);
  TableKind kind = meal ? TableKind::restaurants : TableKind::attractions;
  const Table& t = db.table(kind);
  auto row = t.find(c.name);
  if (!row) return std::nullopt;
  ClockTime open = t.time(*row, t.column_index("opentime"));
  ClockTime close = t.time(*row, t.column_index("endtime"));
  ClockTime start = m->arrival;
  if (meal) {
    MealSlot slot = slot_of(step);
    start = std::max(start, kMealOpen[idx(slot)]);
    if (start > kMealClose[idx(slot)]) return std::nullopt;
    start = std::max(start, open);
    if (start > kMealClose[idx(slot)]) return std::nullopt;
  } else if (start < open) {
    return std::nullopt;
  }
  if (start >= close) return std::nullopt;
  ClockTime end = std::min(start + cfg.activity_minutes, close);
  if (end > kMidnight) return std::nullopt;
  a.start_time = start.to_string();
  a.end_time = end.to_string();
  a.price = t.number(*row, t.column_index("price"));
  a.tickets = q.people;
  a.cost = *a.price * Decimal(q.people);
  push(n, std::move(a), m->cost);
  n.visited.insert(c.name);
  n.position = c.name;
  n.clock = end;
  if (meal) n.meal_done[idx(slot_of(step))] = true;
  return n;
}

bool can_skip(NextStep step) { return is_meal_step(step) || step == NextStep::attraction; }

SearchState skip_step(const SearchState& s, NextStep step) {
  SearchState n = s;
  if (is_meal_step(step)) {
    n.meal_skipped[idx(slot_of(step))] = true;
  } else if (step == NextStep::attraction) {
    n.attractions_blocked = true;
  }
  return n;
}

TransportMode choose_mode(const QueryContext& q, Decimal distance_km) {
  if (q.req.innercity_mode) return *q.req.innercity_mode;
  return distance_km < Decimal(1) ? TransportMode::walk : TransportMode::metro;
}

bool violates_budget(const SearchState& s, const Requirements& req) {
  if (!req.budget) return false;
  const BudgetBound& b = *req.budget;
  Decimal spent;
  if (b.activity_costs) spent += s.activity_cost;
  if (b.transport_costs) spent += s.transport_cost;
  return b.strict ? spent >= b.limit : spent > b.limit;
}

std::string_view status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::full_pass:
      return "full_pass";
    case SearchStatus::env_only_best:
      return "env_only_best";
    case SearchStatus::partial:
      return "partial";
    case SearchStatus::empty:
      return "empty";
  }
  return "";
}

std::vector<Candidate> repair_permutation(const std::vector<Candidate>& original,
                                          const std::vector<Candidate>& ranked) {
  std::vector<bool> used(original.size(), false);
  std::vector<Candidate> out;
  for (const auto& r : ranked) {
    for (std::size_t i = 0; i < original.size(); ++i) {
      if (!used[i] && original[i].name == r.name) {
        used[i] = true;
        out.push_back(original[i]);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (!used[i]) out.push_back(original[i]);
  }
  return out;
}

namespace {

class Search {
 public:
  Search(const QueryContext& q, const Sandbox& sb, Ranker& ranker, const SearchConfig& cfg,
         StepAdvisor* advisor)
      : q_(q), sb_(sb), ranker_(ranker), cfg_(cfg), advisor_(advisor) {}

  SearchOutcome run() {
    start_ = std::chrono::steady_clock::now();
    SearchState root = initial_state(q_);
    bool done = expand(root);
    SearchOutcome o;
    o.nodes = nodes_;
    o.complete_plans = complete_;
    o.exhausted = !stopped_;
    o.elapsed_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (done) {
      o.status = SearchStatus::full_pass;
      o.plan = found_;
      o.constraints_passed = static_cast<int>(q_.constraints.size());
    } else if (best_env_) {
      o.status = SearchStatus::env_only_best;
      o.plan = *best_env_;
      o.constraints_passed = best_env_passed_;
    } else if (partial_) {
      o.status = SearchStatus::partial;
      o.plan = *partial_;
    } else {
      o.status = SearchStatus::empty;
      o.plan = root.plan;
    }
    return o;
  }

 private:
  bool out_of_budget() {
    if (cfg_.max_nodes && nodes_ >= cfg_.max_nodes) return true;
    auto spent = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return spent >= cfg_.budget_secs;
  }

  // Returns true once a full pass has been found.
  bool expand(const SearchState& s) {
    if (stopped_) return false;
    if (out_of_budget()) {
      stopped_ = true;
      return false;
    }
    ++nodes_;
    NextStep step = next_activity_type(s, q_, sb_, cfg_);
    if (advisor_ && step != NextStep::finish) {
      if (auto hint = advisor_->suggest(s, q_, step); hint && step_allowed(s, q_, step, *hint)) {
        step = *hint;
      }
    }
    if (cfg_.trace) cfg_.trace(nodes_, std::string(step_name(step)), s.clock);
    if (step == NextStep::finish) return complete(s);
    note_partial(s);

    std::vector<Candidate> raw = candidates_for(step, s, q_, sb_);
    std::vector<Candidate> feasible;
    std::vector<SearchState> children;
    for (const auto& c : raw) {
      auto child = schedule_activity(s, c, step, q_, sb_, cfg_);
      if (!child) continue;
      if (cfg_.budget_pruning && violates_budget(*child, q_.req)) continue;
      feasible.push_back(c);
      children.push_back(std::move(*child));
    }
    if (feasible.empty()) {
      if (!can_skip(step)) return false;
      return expand(skip_step(s, step));
    }
    std::vector<Candidate> order = repair_permutation(feasible, ranker_.rank(step, feasible, s, q_));
    std::size_t limit = std::min(order.size(), static_cast<std::size_t>(cfg_.max_branching));
    for (std::size_t i = 0; i < limit; ++i) {
      std::size_t k = 0;
      while (feasible[k].name != order[i].name) ++k;
      if (expand(children[k])) return true;
      if (stopped_) return false;
    }
    return false;
  }

  bool complete(const SearchState& s) {
    ++complete_;
    EvalReport r = evaluate_plan(s.plan, q_.constraints, sb_);
    int passed = static_cast<int>(std::count(r.logical.begin(), r.logical.end(), true));
    if (r.env.overall()) {
      if (passed == static_cast<int>(r.logical.size())) {
        found_ = s.plan;
        return true;
      }
      if (!best_env_ || passed > best_env_passed_) {
        best_env_ = s.plan;
        best_env_passed_ = passed;
      }
    } else {
      note_partial(s);
    }
    return false;
  }

  void note_partial(const SearchState& s) {
    std::size_t n = s.activity_count();
    if (n > partial_size_) {
      partial_size_ = n;
      partial_ = s.plan;
    }
  }

  const QueryContext& q_;
  const Sandbox& sb_;
  Ranker& ranker_;
  const SearchConfig& cfg_;
  StepAdvisor* advisor_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  int complete_ = 0;
  bool stopped_ = false;
  Plan found_;
  std::optional<Plan> best_env_;
  int best_env_passed_ = -1;
  std::optional<Plan> partial_;
  std::size_t partial_size_ = 0;
};

}  // namespace

SearchOutcome dfs_search(const QueryContext& query, const Sandbox& sandbox, Ranker& ranker,
                         const SearchConfig& cfg, StepAdvisor* advisor) {
  cfg.validate();
  if (query.days < 1) throw ConfigError("a trip needs at least one day");
  if (query.people < 1) throw ConfigError("a trip needs at least one traveller");
  Search s(query, sandbox, ranker, cfg, advisor);
  return s.run();
}

json outcome_to_json(const SearchOutcome& o, bool with_timing) {
  json j = json::object();
  j["status"] = std::string(status_name(o.status));
  j["nodes"] = o.nodes;
  j["complete_plans"] = o.complete_plans;
  j["constraints_passed"] = o.constraints_passed;
  j["exhausted"] = o.exhausted;
  if (with_timing) j["elapsed_secs"] = o.elapsed_secs;
  j["plan"] = plan_to_json(o.plan);
  return j;
}

}  // namespace itin
