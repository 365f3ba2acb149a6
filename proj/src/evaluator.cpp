#include "itin/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "itin/concepts.hpp"

namespace itin {

// ---------------------------------------------------------------------------
// Fraction

Fraction Fraction::of(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("fraction with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return Fraction{n / g, d / g};
}

std::string Fraction::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

bool operator<(const Fraction& a, const Fraction& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

namespace {

Fraction add(Fraction a, Fraction b) {
  std::int64_t g = std::gcd(a.den, b.den);
  return Fraction::of(a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den);
}

// ---------------------------------------------------------------------------
// Rule table

constexpr const char* kCross = "Cross-city Transportation";
constexpr const char* kInner = "Inner-city Transportation";
constexpr const char* kAttr = "Attractions";
constexpr const char* kRest = "Restaurants";
constexpr const char* kAcc = "Accommodation";
constexpr const char* kTime = "Time";
constexpr const char* kSpace = "Space";

const std::vector<RuleInfo> kRules = {
    {"env.intercity.present", kCross,
     "first and last activities are intercity legs start->target and target->start"},
    {"env.intercity.available", kCross, "every TrainID/FlightID exists with matching endpoints"},
    {"env.intercity.info", kCross, "price and departure/arrival times match the timetable"},
    {"env.intercity.cost", kCross, "cost = price x tickets"},
    {"env.innercity.available", kInner,
     "legs use walk/taxi (1 leg) or walk-metro-walk (3 legs) and connect the positions"},
    {"env.innercity.info", kInner, "leg times, distances and prices match the fare model"},
    {"env.innercity.cost", kInner, "cost = price x tickets; taxi cars = ceil(people/4)"},
    {"env.attractions.available", kAttr, "attraction exists in the target city"},
    {"env.attractions.open_hours", kAttr, "visit lies within opening hours"},
    {"env.attractions.price", kAttr, "price matches the database"},
    {"env.attractions.cost", kAttr, "cost = price x tickets"},
    {"env.attractions.no_repeat", kAttr, "no attraction is visited twice"},
    {"env.restaurants.available", kRest, "restaurant exists in the target city"},
    {"env.restaurants.open_hours", kRest, "meal lies within opening hours"},
    {"env.restaurants.price", kRest, "price matches the database"},
    {"env.restaurants.cost", kRest, "cost = price x tickets"},
    {"env.restaurants.no_repeat", kRest, "no restaurant is used twice"},
    {"env.restaurants.meal_window", kRest,
     "meals start in 06:00-09:00, 11:00-14:00 or 17:00-20:00"},
    {"env.accommodation.available", kAcc, "hotel exists in the target city"},
    {"env.accommodation.price_room_type", kAcc, "price and room type match the database"},
    {"env.accommodation.cost", kAcc, "cost = price x rooms"},
    {"env.accommodation.required", kAcc, "every night of a multi-day trip has a hotel"},
    {"env.time.duration", kTime, "every activity has valid times with end after start"},
    {"env.time.order", kTime, "activities and their legs are chronological within a day"},
    {"env.space.transport", kSpace, "a change of position is covered by transports"},
};

// ---------------------------------------------------------------------------
// Validation helpers

struct Step {
  int day;  // 1-based index into the itinerary
  int index;
  const Activity* act;
};

std::string where(const Step& s) {
  return "day " + std::to_string(s.day) + " activity " + std::to_string(s.index + 1) + " (" +
         std::string(activity_type_name(s.act->type)) + ")";
}

// Position a traveller must reach to begin the activity, and the one they
// are at after it.
std::string entry_of(const Activity& a) {
  if (is_intercity(a.type)) return a.start.value_or("");
  return a.pos_or_empty();
}
std::string exit_of(const Activity& a) {
  if (is_intercity(a.type)) return a.end.value_or("");
  return a.pos_or_empty();
}

std::optional<ClockTime> parse_time(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return ClockTime::try_parse(*s);
}

bool legs_well_formed(const std::vector<TransportLeg>& legs) {
  if (legs.size() == 1) return legs[0].mode == "walk" || legs[0].mode == "taxi";
  if (legs.size() == 3) {
    return legs[0].mode == "walk" && legs[1].mode == "metro" && legs[2].mode == "walk";
  }
  return false;
}

const std::string& id_of(const Activity& a) {
  static const std::string empty;
  const auto& id = a.type == ActivityType::train ? a.train_id : a.flight_id;
  return id ? *id : empty;
}

class Validator {
 public:
  Validator(const Plan& plan, const Sandbox& sb) : plan_(plan), sb_(sb) {
    for (std::size_t d = 0; d < plan.itinerary.size(); ++d) {
      const auto& acts = plan.itinerary[d].activities;
      for (std::size_t i = 0; i < acts.size(); ++i) {
        steps_.push_back({static_cast<int>(d + 1), static_cast<int>(i), &acts[i]});
      }
    }
    if (sb.has_city(plan.target_city)) db_ = &sb.city(plan.target_city);
    report_.rules.reserve(kRules.size());
    for (const auto& r : kRules) report_.rules.push_back({std::string(r.id), true, {}});
  }

  EnvReport run() {
    intercity();
    innercity();
    poi_rules(ActivityType::attraction, "env.attractions", TableKind::attractions);
    poi_rules(ActivityType::lunch, "env.restaurants", TableKind::restaurants);
    meal_window();
    accommodation();
    time_rules();
    space();
    return std::move(report_);
  }

 private:
  void fail(std::string_view id, std::string detail) {
    auto& r = report_.rules[env_rule_index(id)];
    r.passed = false;
    r.details.push_back(std::move(detail));
  }

  bool wants(const Activity& a, ActivityType kind) const {
    if (kind == ActivityType::lunch) return is_meal(a.type);
    return a.type == kind;
  }

  static bool cost_matches(const Activity& a, const std::optional<int>& units) {
    return a.price && a.cost && units && *units >= 1 && *a.cost == *a.price * Decimal(*units);
  }

  void intercity() {
    if (steps_.empty()) {
      fail("env.intercity.present", "plan has no activities");
    } else {
      check_endpoint(steps_.front(), plan_.start_city, plan_.target_city, "first");
      check_endpoint(steps_.back(), plan_.target_city, plan_.start_city, "last");
    }
    for (const auto& s : steps_) {
      const Activity& a = *s.act;
      if (!is_intercity(a.type)) continue;
      RouteKind kind = a.type == ActivityType::train ? RouteKind::train : RouteKind::airplane;
      const IntercityRoute* route = sb_.find_route(id_of(a));
      if (!route || route->kind != kind) {
        fail("env.intercity.available", where(s) + ": unknown route '" + id_of(a) + "'");
      } else {
        if (a.start.value_or("") != route->from || a.end.value_or("") != route->to) {
          fail("env.intercity.available", where(s) + ": route " + route->id + " runs " +
                                              route->from + " -> " + route->to);
        }
        if (!a.price || *a.price != route->cost) {
          fail("env.intercity.info", where(s) + ": price differs from " + route->cost.to_string());
        }
        auto st = parse_time(a.start_time);
        auto et = parse_time(a.end_time);
        if ((st && *st != route->begin) || (et && *et != route->end)) {
          fail("env.intercity.info", where(s) + ": timetable is " + route->begin.to_string() +
                                         "-" + route->end.to_string());
        }
      }
      if (!cost_matches(a, a.tickets)) {
        fail("env.intercity.cost", where(s) + ": cost is not price x tickets");
      }
    }
  }

  void check_endpoint(const Step& s, const std::string& from, const std::string& to,
                      const char* which) {
    const Activity& a = *s.act;
    if (!is_intercity(a.type)) {
      fail("env.intercity.present", std::string(which) + " activity is not intercity transport");
      return;
    }
    std::string c1 = sb_.city_of_station(a.start.value_or(""));
    std::string c2 = sb_.city_of_station(a.end.value_or(""));
    if ((!c1.empty() && c1 != from) || (!c2.empty() && c2 != to)) {
      fail("env.intercity.present",
           std::string(which) + " intercity leg must run " + from + " -> " + to);
    }
  }

  void innercity() {
    int cars_needed = (std::max(plan_.people_number, 1) + sb_.fares.taxi_capacity - 1) /
                      sb_.fares.taxi_capacity;
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      const Step& s = steps_[k];
      const auto& legs = s.act->transports;
      if (legs.empty()) continue;

      for (std::size_t i = 0; i < legs.size(); ++i) {
        const auto& leg = legs[i];
        std::string tag = where(s) + " leg " + std::to_string(i + 1);
        if (leg.mode == "taxi") {
          if (!leg.cars || *leg.cars != cars_needed || leg.cost != leg.price * Decimal(*leg.cars)) {
            fail("env.innercity.cost",
                 tag + ": taxi needs " + std::to_string(cars_needed) + " car(s) at price each");
          }
        } else if (leg.mode == "walk" || leg.mode == "metro") {
          if (!leg.tickets || *leg.tickets < 1 || leg.cost != leg.price * Decimal(*leg.tickets)) {
            fail("env.innercity.cost", tag + ": cost is not price x tickets");
          }
        }
      }

      if (k == 0) {
        fail("env.innercity.available", where(s) + ": transport before the first activity");
        continue;
      }
      std::string from = exit_of(*steps_[k - 1].act);
      std::string to = entry_of(*s.act);
      bool ok = legs_well_formed(legs) && legs.front().start == from && legs.back().end == to;
      for (std::size_t i = 0; ok && i + 1 < legs.size(); ++i) ok = legs[i].end == legs[i + 1].start;
      if (!ok) {
        fail("env.innercity.available",
             where(s) + ": legs do not form a valid route " + from + " -> " + to);
        continue;
      }

      auto t0 = ClockTime::try_parse(legs.front().start_time);
      if (!db_ || !t0 || !db_->has_position(from) || !db_->has_position(to)) continue;
      TransportMode mode = legs.size() == 3 ? TransportMode::metro : *parse_mode(legs[0].mode);
      auto expect = goto_poi(*db_, sb_.fares, from, to, *t0, mode, plan_.people_number).legs;
      for (std::size_t i = 0; i < legs.size(); ++i) {
        const auto& got = legs[i];
        const auto& want = expect[i];
        if (got.start != want.start || got.end != want.end || got.distance != want.distance ||
            got.price != want.price || got.start_time != want.start_time ||
            got.end_time != want.end_time) {
          fail("env.innercity.info", where(s) + " leg " + std::to_string(i + 1) +
                                         ": expected " + want.start_time + "-" + want.end_time +
                                         " " + want.distance.to_string() + " km price " +
                                         want.price.to_string());
        }
      }
    }
  }

  void poi_rules(ActivityType kind, const std::string& prefix, TableKind table) {
    std::set<std::string> seen;
    for (const auto& s : steps_) {
      const Activity& a = *s.act;
      if (!wants(a, kind)) continue;
      const std::string& name = a.pos_or_empty();
      if (!seen.insert(name).second) {
        fail(prefix + ".no_repeat", where(s) + ": '" + name + "' already visited");
      }
      if (!cost_matches(a, a.tickets)) fail(prefix + ".cost", where(s) + ": cost is not price x tickets");

      std::optional<std::size_t> row;
      if (db_) row = db_->table(table).find(name);
      if (!row) {
        fail(prefix + ".available", where(s) + ": '" + name + "' not in " +
                                        std::string(table_name(table)) + " of " +
                                        plan_.target_city);
        continue;
      }
      const Table& t = db_->table(table);
      Decimal price = t.number(*row, t.column_index("price"));
      if (!a.price || *a.price != price) {
        fail(prefix + ".price", where(s) + ": price should be " + price.to_string());
      }
      auto st = parse_time(a.start_time);
      auto et = parse_time(a.end_time);
      if (st && et) {
        ClockTime open = t.time(*row, t.column_index("opentime"));
        ClockTime close = t.time(*row, t.column_index("endtime"));
        if (*st < open || *et > close) {
          fail(prefix + ".open_hours",
               where(s) + ": open " + open.to_string() + "-" + close.to_string());
        }
      }
    }
  }

  void meal_window() {
    for (const auto& s : steps_) {
      const Activity& a = *s.act;
      if (!is_meal(a.type)) continue;
      auto st = parse_time(a.start_time);
      if (!st) continue;
      ClockTime lo, hi;
      switch (a.type) {
        case ActivityType::breakfast:
          lo = ClockTime::hm(6, 0), hi = ClockTime::hm(9, 0);
          break;
        case ActivityType::lunch:
          lo = ClockTime::hm(11, 0), hi = ClockTime::hm(14, 0);
          break;
        default:
          lo = ClockTime::hm(17, 0), hi = ClockTime::hm(20, 0);
      }
      if (*st < lo || *st > hi) {
        fail("env.restaurants.meal_window",
             where(s) + ": must start in " + lo.to_string() + "-" + hi.to_string());
      }
    }
  }

  void accommodation() {
    for (const auto& s : steps_) {
      const Activity& a = *s.act;
      if (a.type != ActivityType::accommodation) continue;
      if (!cost_matches(a, a.rooms)) fail("env.accommodation.cost", where(s) + ": cost is not price x rooms");
      std::optional<std::size_t> row;
      if (db_) row = db_->hotels.find(a.pos_or_empty());
      if (!row) {
        fail("env.accommodation.available",
             where(s) + ": '" + a.pos_or_empty() + "' not in hotels of " + plan_.target_city);
        continue;
      }
      const Table& t = db_->hotels;
      Decimal price = t.number(*row, t.column_index("price"));
      Decimal beds = t.number(*row, t.column_index("numbed"));
      if (!a.price || *a.price != price || !a.room_type || Decimal(*a.room_type) != beds) {
        fail("env.accommodation.price_room_type", where(s) + ": expected price " +
                                                      price.to_string() + ", room type " +
                                                      beds.to_string());
      }
    }
    const auto& days = plan_.itinerary;
    for (std::size_t d = 0; d + 1 < days.size(); ++d) {
      bool has = std::any_of(days[d].activities.begin(), days[d].activities.end(),
                             [](const Activity& a) { return a.type == ActivityType::accommodation; });
      if (!has) fail("env.accommodation.required", "day " + std::to_string(d + 1) + " has no hotel");
    }
  }

  void time_rules() {
    for (const auto& s : steps_) {
      auto st = parse_time(s.act->start_time);
      auto et = parse_time(s.act->end_time);
      if (!st || !et || *et <= *st) {
        fail("env.time.duration", where(s) + ": needs valid start_time < end_time");
      }
    }
    for (std::size_t k = 1; k < steps_.size(); ++k) {
      const Step& prev = steps_[k - 1];
      const Step& cur = steps_[k];
      if (prev.day != cur.day) continue;
      auto prev_end = parse_time(prev.act->end_time);
      auto cur_start = parse_time(cur.act->start_time);
      if (!prev_end || !cur_start) continue;
      std::vector<ClockTime> marks = {*prev_end};
      bool parsed = true;
      for (const auto& leg : cur.act->transports) {
        auto a = ClockTime::try_parse(leg.start_time);
        auto b = ClockTime::try_parse(leg.end_time);
        if (!a || !b) {
          parsed = false;
          break;
        }
        marks.push_back(*a);
        marks.push_back(*b);
      }
      if (!parsed) continue;
      marks.push_back(*cur_start);
      if (!std::is_sorted(marks.begin(), marks.end())) {
        fail("env.time.order", where(cur) + ": starts before the previous activity and its "
                                            "transport have finished");
      }
    }
  }

  void space() {
    for (std::size_t k = 1; k < steps_.size(); ++k) {
      const Step& cur = steps_[k];
      std::string from = exit_of(*steps_[k - 1].act);
      std::string to = entry_of(*cur.act);
      if (from != to && cur.act->transports.empty()) {
        fail("env.space.transport", where(cur) + ": no transport from " + from + " to " + to);
      }
    }
  }

  const Plan& plan_;
  const Sandbox& sb_;
  const CityDatabase* db_ = nullptr;
  std::vector<Step> steps_;
  EnvReport report_;
};

json fraction_json(const Fraction& f) {
  json j;
  j["fraction"] = f.to_string();
  j["value"] = f.to_double();
  return j;
}

}  // namespace

const std::vector<RuleInfo>& env_rules() { return kRules; }
std::size_t env_rule_count() { return kRules.size(); }

std::size_t env_rule_index(std::string_view id) {
  for (std::size_t i = 0; i < kRules.size(); ++i) {
    if (kRules[i].id == id) return i;
  }
  throw KeyError("unknown environment rule '" + std::string(id) + "'");
}

bool EnvReport::overall() const {
  return std::all_of(rules.begin(), rules.end(), [](const RuleOutcome& r) { return r.passed; });
}

const RuleOutcome& EnvReport::rule(std::string_view id) const { return rules.at(env_rule_index(id)); }

std::vector<std::string> EnvReport::failed_ids() const {
  std::vector<std::string> out;
  for (const auto& r : rules) {
    if (!r.passed) out.push_back(r.id);
  }
  return out;
}

EnvReport EnvReport::all_failed() {
  EnvReport r;
  for (const auto& info : kRules) r.rules.push_back({std::string(info.id), false, {}});
  return r;
}

EnvReport validate_env(const Plan& plan, const Sandbox& sandbox) {
  return Validator(plan, sandbox).run();
}

EvalReport evaluate_plan(const Plan& plan, const std::vector<dsl::Program>& constraints,
                         const Sandbox& sandbox) {
  EvalReport r;
  r.delivered = true;
  r.env = validate_env(plan, sandbox);
  for (const auto& o : dsl::extract_constraints(constraints, plan, &sandbox)) {
    r.logical.push_back(o.passed);
  }
  return r;
}

EvalReport evaluate_plan(const std::string* plan_text, const std::vector<dsl::Program>& constraints,
                         const Sandbox& sandbox) {
  EvalReport r;
  r.logical.assign(constraints.size(), false);
  if (!plan_text) {
    r.error = "no plan delivered";
    return r;
  }
  try {
    Plan plan = parse_plan(*plan_text);
    return evaluate_plan(plan, constraints, sandbox);
  } catch (const ParseError& e) {
    r.error = e.what();
  } catch (const SchemaError& e) {
    r.error = e.what();
  }
  return r;
}

MetricSummary score(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw UndefinedMetricError("metrics are undefined for an empty plan set");
  const std::int64_t n = static_cast<std::int64_t>(reports.size());
  const std::int64_t env_n = static_cast<std::int64_t>(env_rule_count());
  std::int64_t delivered = 0, env_pass_sum = 0, env_all = 0, total_c = 0, logic_pass = 0,
               logic_all = 0, cond_pass = 0, final_pass = 0;
  for (const auto& r : reports) {
    total_c += static_cast<std::int64_t>(r.logical.size());
    if (!r.delivered) continue;
    ++delivered;
    std::int64_t passed_rules = 0;
    for (const auto& o : r.env.rules) passed_rules += o.passed ? 1 : 0;
    env_pass_sum += passed_rules;
    bool env_ok = r.env.rules.size() == env_rule_count() && passed_rules == env_n;
    std::int64_t lp = std::count(r.logical.begin(), r.logical.end(), true);
    bool logic_ok = lp == static_cast<std::int64_t>(r.logical.size());
    logic_pass += lp;
    logic_all += logic_ok ? 1 : 0;
    env_all += env_ok ? 1 : 0;
    if (env_ok) cond_pass += lp;
    final_pass += env_ok && logic_ok ? 1 : 0;
  }
  MetricSummary s;
  s.dr = Fraction::of(delivered, n);
  s.epr_micro = Fraction::of(env_pass_sum, n * env_n);
  s.epr_macro = Fraction::of(env_all, n);
  s.lpr_macro = Fraction::of(logic_all, n);
  s.fpr = Fraction::of(final_pass, n);
  if (total_c == 0) {
    // No logical constraints anywhere: every delivered plan passes vacuously.
    s.lpr_micro = s.lpr_macro;
    s.c_lpr = s.fpr;
  } else {
    s.lpr_micro = Fraction::of(logic_pass, total_c);
    s.c_lpr = Fraction::of(cond_pass, total_c);
  }
  return s;
}

Decimal preference_value(const Plan& plan, const dsl::Program& program, const Sandbox* sandbox) {
  Value v = dsl::evaluate(program, plan, sandbox);
  if (!v.is(Value::Kind::number)) {
    throw dsl::EvalError(dsl::Pos{}, std::string("preference returned ") +
                                         std::string(kind_name(v.kind())) + ", not a number");
  }
  return v.as_number();
}

std::map<std::string, Fraction> preference_ranking(
    const std::map<std::string, std::vector<Decimal>>& values_by_method, Direction direction) {
  if (values_by_method.empty()) throw InputError("no methods to rank");
  std::size_t queries = values_by_method.begin()->second.size();
  for (const auto& [m, v] : values_by_method) {
    if (v.size() != queries) {
      throw InputError("method '" + m + "' scored " + std::to_string(v.size()) +
                       " queries, expected " + std::to_string(queries));
    }
  }
  if (queries == 0) throw InputError("no queries to rank");

  const Decimal sentinel(-1);
  // true when a is strictly better than b
  auto better = [&](Decimal a, Decimal b) {
    if (a == sentinel || b == sentinel) return b == sentinel && a != sentinel;
    return direction == Direction::maximize ? a > b : a < b;
  };

  std::vector<std::string> names;
  for (const auto& [m, v] : values_by_method) names.push_back(m);
  std::map<std::string, std::int64_t> twice_rank_sum;
  for (std::size_t q = 0; q < queries; ++q) {
    for (const auto& m : names) {
      Decimal x = values_by_method.at(m)[q];
      std::int64_t above = 0, tied = 0;
      for (const auto& o : names) {
        Decimal y = values_by_method.at(o)[q];
        if (better(y, x)) {
          ++above;
        } else if (!better(x, y)) {
          ++tied;  // includes m itself
        }
      }
      // Tie group occupies ranks above+1 .. above+tied; mean doubled.
      twice_rank_sum[m] += 2 * above + tied + 1;
    }
  }
  std::map<std::string, Fraction> out;
  for (const auto& m : names) {
    out[m] = Fraction::of(twice_rank_sum[m], 2 * static_cast<std::int64_t>(queries));
  }
  return out;
}

std::map<std::string, Fraction> aggregate_ranking(
    const std::vector<std::map<std::string, Fraction>>& per_preference) {
  if (per_preference.empty()) throw InputError("no preferences to aggregate");
  std::map<std::string, Fraction> sum;
  for (const auto& pref : per_preference) {
    if (pref.size() != per_preference.front().size()) {
      throw InputError("preferences rank different method sets");
    }
    for (const auto& [m, f] : pref) {
      if (!per_preference.front().count(m)) throw InputError("method '" + m + "' missing");
      sum[m] = add(sum.count(m) ? sum[m] : Fraction{}, f);
    }
  }
  std::map<std::string, Fraction> out;
  auto k = static_cast<std::int64_t>(per_preference.size());
  for (const auto& [m, f] : sum) out[m] = Fraction::of(f.num, f.den * k);
  return out;
}

json env_report_to_json(const EnvReport& r) {
  json j;
  j["overall"] = r.overall();
  json rules = json::array();
  for (std::size_t i = 0; i < r.rules.size(); ++i) {
    json e;
    e["id"] = r.rules[i].id;
    e["category"] = i < kRules.size() ? std::string(kRules[i].category) : "";
    e["passed"] = r.rules[i].passed;
    e["details"] = r.rules[i].details;
    rules.push_back(std::move(e));
  }
  j["rules"] = std::move(rules);
  return j;
}

json eval_report_to_json(const EvalReport& r) {
  json j;
  j["delivered"] = r.delivered;
  j["error"] = r.error;
  j["env"] = env_report_to_json(r.env);
  j["logical"] = r.logical;
  json prefs = json::object();
  for (const auto& [k, v] : r.preference_values) prefs[k] = decimal_to_json(v);
  j["preference_values"] = std::move(prefs);
  return j;
}

json summary_to_json(const MetricSummary& s) {
  json j;
  j["DR"] = fraction_json(s.dr);
  j["EPR_micro"] = fraction_json(s.epr_micro);
  j["EPR_macro"] = fraction_json(s.epr_macro);
  j["LPR_micro"] = fraction_json(s.lpr_micro);
  j["LPR_macro"] = fraction_json(s.lpr_macro);
  j["C_LPR"] = fraction_json(s.c_lpr);
  j["FPR"] = fraction_json(s.fpr);
  return j;
}

std::string summary_table(const MetricSummary& s, std::string_view label) {
  const std::vector<std::string> heads = {"DR",       "EPR Mic.", "EPR Mac.", "LPR Mic.",
                                          "LPR Mac.", "C-LPR",    "FPR"};
  const std::vector<Fraction> vals = {s.dr,        s.epr_micro, s.epr_macro, s.lpr_micro,
                                      s.lpr_macro, s.c_lpr,     s.fpr};
  std::size_t w0 = std::max<std::size_t>(label.size(), 6);
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w0)) << "Method";
  for (const auto& h : heads) out << "  " << std::right << std::setw(8) << h;
  out << "\n" << std::left << std::setw(static_cast<int>(w0)) << label;
  for (const auto& v : vals) {
    out << "  " << std::right << std::setw(8) << std::fixed << std::setprecision(1)
        << v.to_double() * 100.0;
  }
  out << "\n";
  return out.str();
}

}  // namespace itin
