#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "itin/evaluator.hpp"
#include "itin/plan.hpp"
#include "itin/sandbox.hpp"

namespace testing_support {

using namespace itin;

inline std::filesystem::path data_dir(const std::string& name) {
  return std::filesystem::path(ITIN_SOURCE_DIR) / "tests" / "data" / name;
}

inline const Sandbox& basic_sandbox() {
  static const Sandbox sb = Sandbox::load(data_dir("basic"));
  return sb;
}
inline const Sandbox& micro_sandbox() {
  static const Sandbox sb = Sandbox::load(data_dir("micro"));
  return sb;
}
inline const Sandbox& tiny_sandbox() {
  static const Sandbox sb = Sandbox::load(data_dir("tiny"));
  return sb;
}

/// Builds plans whose transports, prices and costs are taken from the
/// sandbox, so a plan is env-valid as long as the chosen times are.
class PlanBuilder {
 public:
  PlanBuilder(const Sandbox& sb, std::string start, std::string target, int people)
      : sb_(sb), db_(sb.city(target)) {
    plan_.start_city = std::move(start);
    plan_.target_city = std::move(target);
    plan_.people_number = people;
  }

  PlanBuilder& next_day() {
    plan_.itinerary.push_back(DayPlan{static_cast<int>(plan_.itinerary.size()) + 1, {}, json::object()});
    clock_ = ClockTime(0);
    return *this;
  }

  /// Intercity leg by route id. `depart` is when the transfer to the
  /// station leaves (defaults to the end of the previous activity).
  PlanBuilder& intercity(const std::string& id, const std::string& depart = "") {
    const IntercityRoute* r = sb_.find_route(id);
    if (!r) throw std::invalid_argument("no route " + id);
    Activity a;
    a.type = r->kind == RouteKind::train ? ActivityType::train : ActivityType::airplane;
    (r->kind == RouteKind::train ? a.train_id : a.flight_id) = r->id;
    a.start = r->from;
    a.end = r->to;
    a.start_time = r->begin.to_string();
    a.end_time = r->end.to_string();
    a.price = r->cost;
    a.tickets = plan_.people_number;
    a.cost = r->cost * Decimal(plan_.people_number);
    a.transports = legs_to(r->from, depart, r->begin, std::nullopt);
    push(std::move(a), r->to, r->end);
    return *this;
  }

  PlanBuilder& visit(ActivityType type, const std::string& poi, const std::string& start,
                     const std::string& end, const std::string& depart = "",
                     std::optional<TransportMode> mode = std::nullopt) {
    Activity a;
    a.type = type;
    a.position = poi;
    a.start_time = start;
    a.end_time = end;
    ClockTime st = ClockTime::parse(start);
    a.transports = legs_to(poi, depart, st, mode);
    TableKind kind = type == ActivityType::attraction      ? TableKind::attractions
                     : type == ActivityType::accommodation ? TableKind::hotels
                                                           : TableKind::restaurants;
    const Table& t = db_.table(kind);
    auto row = t.find(poi);
    if (!row) throw std::invalid_argument("no POI " + poi);
    Decimal price = t.number(*row, t.column_index("price"));
    a.price = price;
    if (kind == TableKind::hotels) {
      int beds = static_cast<int>(t.number(*row, t.column_index("numbed")).floor());
      a.room_type = beds;
      a.rooms = (plan_.people_number + beds - 1) / beds;
      a.cost = price * Decimal(*a.rooms);
    } else {
      a.tickets = plan_.people_number;
      a.cost = price * Decimal(plan_.people_number);
    }
    push(std::move(a), poi, ClockTime::parse(end));
    return *this;
  }

  Plan build() const { return plan_; }

 private:
  std::vector<TransportLeg> legs_to(const std::string& to, const std::string& depart,
                                    ClockTime must_arrive, std::optional<TransportMode> mode) {
    if (pos_.empty() || pos_ == to) return {};
    ClockTime leave = depart.empty() ? clock_ : ClockTime::parse(depart);
    if (leave < clock_) throw std::invalid_argument("departure before previous activity ends");
    Decimal d = position_distance(db_, pos_, to);
    TransportMode m = mode ? *mode : (d < Decimal(1) ? TransportMode::walk : TransportMode::metro);
    auto opt = goto_poi(db_, sb_.fares, pos_, to, leave, m, plan_.people_number);
    if (leave + opt.minutes > must_arrive) {
      throw std::invalid_argument("cannot reach " + to + " by " + must_arrive.to_string());
    }
    return opt.legs;
  }

  void push(Activity a, const std::string& pos, ClockTime end) {
    if (plan_.itinerary.empty()) next_day();
    plan_.itinerary.back().activities.push_back(std::move(a));
    pos_ = pos;
    clock_ = end;
  }

  const Sandbox& sb_;
  const CityDatabase& db_;
  Plan plan_;
  std::string pos_;
  ClockTime clock_;
};

/// Knobs for the two-day Alpha -> Beta witness; the defaults give a plan
/// that passes every environment rule.
struct WitnessOptions {
  std::string return_route = "G104";
  std::string day2_afternoon = "Sky Garden";
  std::string day2_lunch = "Harbor Grill";
};

/// Five travellers, so taxi legs need two cars and the hotel three rooms.
inline Plan beta_witness(const WitnessOptions& o = {}) {
  using T = ActivityType;
  PlanBuilder b(basic_sandbox(), "Alpha", "Beta", 5);
  b.intercity("G101")
      .visit(T::attraction, "Old Fort", "10:30", "12:00")
      .visit(T::lunch, "Red Pot", "12:30", "13:30", "", TransportMode::taxi)
      .visit(T::attraction, "Beta Museum", "14:00", "17:00")
      .visit(T::dinner, "Lotus Kitchen", "19:00", "20:00", "17:10")
      .visit(T::accommodation, "Beta Plaza", "21:00", "24:00", "20:40")
      .next_day()
      .visit(T::breakfast, "Morning Congee", "08:00", "08:45", "07:45")
      .visit(T::attraction, "River Walk", "09:30", "11:00", "09:00")
      .visit(T::lunch, o.day2_lunch, "12:00", "13:00")
      .visit(T::attraction, o.day2_afternoon, "13:30", "15:00")
      .visit(T::dinner, "Night Noodles", "17:00", "17:30")
      .intercity(o.return_route, "17:40");
  return b.build();
}

inline Activity& act(Plan& p, int day, int index) {
  return p.itinerary.at(static_cast<std::size_t>(day - 1)).activities.at(static_cast<std::size_t>(index));
}

struct EnvCase {
  std::string rule;
  std::string what;
  Plan plan;
};

inline void rename_position(Plan& p, int day, int index, const std::string& name) {
  Activity& a = act(p, day, index);
  a.position = name;
  a.transports.back().end = name;
  // the following activity departs from the renamed place
  Activity* next = nullptr;
  auto& acts = p.itinerary.at(static_cast<std::size_t>(day - 1)).activities;
  if (static_cast<std::size_t>(index + 1) < acts.size()) {
    next = &acts[static_cast<std::size_t>(index + 1)];
  } else if (static_cast<std::size_t>(day) < p.itinerary.size()) {
    next = &p.itinerary[static_cast<std::size_t>(day)].activities.front();
  }
  if (next && !next->transports.empty()) next->transports.front().start = name;
}

/// One single-violation variant of the witness per environment rule.
inline std::vector<EnvCase> env_violation_cases() {
  std::vector<EnvCase> out;
  auto add = [&](std::string rule, std::string what, const std::function<void(Plan&)>& edit) {
    Plan p = beta_witness();
    edit(p);
    out.push_back({std::move(rule), std::move(what), std::move(p)});
  };
  auto add_plan = [&](std::string rule, std::string what, Plan p) {
    out.push_back({std::move(rule), std::move(what), std::move(p)});
  };

  // Day 1: 0 G101, 1 Old Fort, 2 Red Pot (taxi), 3 Beta Museum, 4 Lotus Kitchen, 5 Beta Plaza.
  // Day 2: 0 Morning Congee, 1 River Walk, 2 Harbor Grill, 3 Sky Garden, 4 Night Noodles, 5 G104.
  WitnessOptions gamma;
  gamma.return_route = "D301";
  add_plan("env.intercity.present", "return leg goes to a third city", beta_witness(gamma));
  add("env.intercity.available", "unknown train id", [](Plan& p) { act(p, 2, 5).train_id = "G999"; });
  add("env.intercity.info", "departure one minute off the timetable",
      [](Plan& p) { act(p, 1, 0).start_time = "07:59"; });
  add("env.intercity.cost", "ticket cost off by one",
      [](Plan& p) { act(p, 1, 0).cost = *act(p, 1, 0).cost + Decimal(1); });
  add("env.innercity.available", "leg chain does not reach the POI",
      [](Plan& p) { act(p, 1, 1).transports.back().end = "Nowhere"; });
  add("env.innercity.info", "leg distance altered", [](Plan& p) {
    auto& leg = act(p, 1, 3).transports.front();
    leg.distance = leg.distance + Decimal::from_units(100'000);
  });
  add("env.innercity.cost", "taxi for five with one car", [](Plan& p) {
    auto& leg = act(p, 1, 2).transports.front();
    leg.cars = 1;
    leg.cost = leg.price;
  });
  add("env.attractions.available", "attraction missing from the city",
      [](Plan& p) { rename_position(p, 1, 3, "Ghost Hall"); });
  add("env.attractions.open_hours", "visit runs past closing",
      [](Plan& p) { act(p, 1, 3).end_time = "17:05"; });
  add("env.attractions.price", "ticket price altered", [](Plan& p) {
    act(p, 1, 3).price = Decimal(41);
    act(p, 1, 3).cost = Decimal(41 * 5);
  });
  add("env.attractions.cost", "attraction cost off by one",
      [](Plan& p) { act(p, 1, 3).cost = *act(p, 1, 3).cost + Decimal(1); });
  WitnessOptions repeat_attr;
  repeat_attr.day2_afternoon = "Beta Museum";
  add_plan("env.attractions.no_repeat", "same attraction on both days", beta_witness(repeat_attr));
  add("env.restaurants.available", "restaurant missing from the city",
      [](Plan& p) { rename_position(p, 2, 2, "Ghost Diner"); });
  add("env.restaurants.open_hours", "dinner runs past closing",
      [](Plan& p) { act(p, 1, 4).end_time = "20:35"; });
  add("env.restaurants.price", "meal price altered", [](Plan& p) {
    act(p, 1, 2).price = Decimal(91);
    act(p, 1, 2).cost = Decimal(91 * 5);
  });
  add("env.restaurants.cost", "meal cost off by one",
      [](Plan& p) { act(p, 1, 2).cost = *act(p, 1, 2).cost + Decimal(1); });
  WitnessOptions repeat_rest;
  repeat_rest.day2_lunch = "Red Pot";
  add_plan("env.restaurants.no_repeat", "same restaurant twice", beta_witness(repeat_rest));
  add("env.restaurants.meal_window", "dinner starts at 16:50",
      [](Plan& p) { act(p, 2, 4).start_time = "16:50"; });
  add("env.accommodation.available", "hotel missing from the city",
      [](Plan& p) { rename_position(p, 1, 5, "Ghost Inn"); });
  add("env.accommodation.price_room_type", "room type altered",
      [](Plan& p) { act(p, 1, 5).room_type = 1; });
  add("env.accommodation.cost", "hotel cost off by one",
      [](Plan& p) { act(p, 1, 5).cost = *act(p, 1, 5).cost + Decimal(1); });
  add("env.accommodation.required", "night one has no hotel", [](Plan& p) {
    Activity hotel = act(p, 1, 5);
    hotel.start_time = "00:00";
    hotel.end_time = "07:00";
    p.itinerary[0].activities.pop_back();
    auto& d2 = p.itinerary[1].activities;
    d2.insert(d2.begin(), hotel);
  });
  add("env.time.duration", "visit with zero length",
      [](Plan& p) { act(p, 1, 3).end_time = "14:00"; });
  add("env.time.order", "visit starts before its transfer arrives",
      [](Plan& p) { act(p, 1, 3).start_time = "13:20"; });
  add("env.space.transport", "position change without legs",
      [](Plan& p) { act(p, 2, 3).transports.clear(); });
  return out;
}

/// Random plan over the Beta tables. Not env-valid; used to exercise the
/// concept functions and DSL programs. Every fifth plan is degenerate
/// (no activities, or no legs and zero costs) to reach the -1 branches.
inline Plan random_plan(std::mt19937_64& rng, int serial) {
  const CityDatabase& db = basic_sandbox().city("Beta");
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto money = [&] { return Decimal::from_units(static_cast<std::int64_t>(uni(0, 50000)) * 10'000); };
  auto pick = [&](const Table& t) { return t.name(static_cast<std::size_t>(uni(0, static_cast<int>(t.size()) - 1))); };
  auto clock = [&](int lo, int hi) { return ClockTime(uni(lo, hi)); };

  Plan p;
  p.people_number = uni(1, 6);
  p.start_city = "Alpha";
  p.target_city = "Beta";
  int mode = serial % 5;
  int days = mode == 0 ? 1 : uni(1, 3);
  for (int d = 0; d < days; ++d) {
    DayPlan day;
    day.day = d + 1;
    int n = mode == 0 ? 0 : uni(1, 6);
    for (int i = 0; i < n; ++i) {
      Activity a;
      a.type = static_cast<ActivityType>(uni(0, 6));
      switch (a.type) {
        case ActivityType::attraction:
          a.position = pick(db.attractions);
          break;
        case ActivityType::accommodation:
          a.position = pick(db.hotels);
          a.rooms = uni(1, 3);
          break;
        case ActivityType::train:
        case ActivityType::airplane:
          a.start = "Alpha Station";
          a.end = "Beta Station";
          break;
        default:
          a.position = pick(db.restaurants);
      }
      ClockTime st = clock(360, 1200);
      a.start_time = st.to_string();
      a.end_time = (st + uni(0, 180)).to_string();
      if (mode == 1) {
        a.cost = Decimal(0);
      } else if (uni(0, 9) > 0) {
        a.cost = money();
      }
      if (mode != 1 && uni(0, 2) > 0) {
        static const char* kModes[] = {"walk", "taxi", "metro"};
        int legs = uni(0, 1) ? 1 : 3;
        ClockTime t = clock(300, 1100);
        for (int k = 0; k < legs; ++k) {
          TransportLeg leg;
          leg.mode = legs == 3 ? (k == 1 ? "metro" : "walk") : kModes[uni(0, 1)];
          leg.start_time = t.to_string();
          t = t + uni(0, 40);
          leg.end_time = t.to_string();
          leg.cost = money();
          leg.distance = Decimal::from_units(static_cast<std::int64_t>(uni(0, 9000)) * 1000);
          a.transports.push_back(leg);
        }
      }
      day.activities.push_back(std::move(a));
    }
    p.itinerary.push_back(std::move(day));
  }
  return p;
}

}  // namespace testing_support
