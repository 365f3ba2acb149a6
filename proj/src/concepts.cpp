#include "itin/concepts.hpp"

#include <functional>
#include <map>

namespace itin {

namespace {

using Args = std::vector<Value>;
using Impl = std::function<Value(const Args&, const Sandbox*)>;

struct Entry {
  ConceptInfo info;
  Impl impl;
};

[[noreturn]] void type_fail(std::string_view fn, std::size_t index, std::string_view want,
                            const Value& got) {
  throw ConceptTypeError(std::string(fn) + ": argument " + std::to_string(index + 1) +
                         " must be " + std::string(want) + ", got " +
                         std::string(kind_name(got.kind())));
}

const Plan& plan_arg(std::string_view fn, const Args& a, std::size_t i) {
  if (!a[i].is(Value::Kind::plan)) type_fail(fn, i, "a plan", a[i]);
  return *a[i].as_plan();
}

const Activity& activity_arg(std::string_view fn, const Args& a, std::size_t i) {
  if (!a[i].is(Value::Kind::activity)) type_fail(fn, i, "an activity", a[i]);
  return *a[i].as_activity();
}

const std::string& text_arg(std::string_view fn, const Args& a, std::size_t i) {
  if (!a[i].is(Value::Kind::text)) type_fail(fn, i, "text", a[i]);
  return a[i].as_text();
}

std::vector<TransportLeg> legs_arg(std::string_view fn, const Args& a, std::size_t i) {
  if (!a[i].is(Value::Kind::list)) type_fail(fn, i, "a transport list", a[i]);
  std::vector<TransportLeg> legs;
  for (const auto& v : a[i].items()) {
    if (!v.is(Value::Kind::leg)) type_fail(fn, i, "a transport list", v);
    legs.push_back(*v.as_leg());
  }
  return legs;
}

// Leg records are read through pointers so the list keeps identity.
const TransportLeg* leg_at(std::string_view fn, const Args& a, std::size_t i, long index) {
  if (!a[i].is(Value::Kind::list)) type_fail(fn, i, "a transport list", a[i]);
  const auto& items = a[i].items();
  long n = static_cast<long>(items.size());
  if (index < 0) index += n;
  if (index < 0 || index >= n) return nullptr;
  const Value& v = items[static_cast<std::size_t>(index)];
  if (!v.is(Value::Kind::leg)) type_fail(fn, i, "a transport list", v);
  return v.as_leg();
}

std::optional<std::string_view> mode_arg(std::string_view fn, const Args& a, std::size_t i) {
  if (i >= a.size() || a[i].is(Value::Kind::none)) return std::nullopt;
  return text_arg(fn, a, i);
}

const Sandbox& need_sandbox(std::string_view fn, const Sandbox* sb) {
  if (!sb) throw StateError(std::string(fn) + " needs a loaded sandbox");
  return *sb;
}

Value activity_list(const Plan& p) {
  ValueList out;
  for (const auto& day : p.itinerary) {
    for (const auto& act : day.activities) out.emplace_back(&act);
  }
  return Value::list(std::move(out));
}

std::string lookup_text(const Sandbox& sb, TableKind kind, const Activity& a,
                        std::string_view city, std::string_view column) {
  if (!a.position || !sb.has_city(city)) return "";
  const Table& t = sb.city(city).table(kind);
  auto row = t.find(*a.position);
  if (!row) return "";
  return t.text(*row, t.column_index(column));
}

Value opt_text(const std::optional<std::string>& s) { return Value(s ? *s : std::string()); }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    auto add = [&](std::string name, int lo, int hi, Impl f) {
      e.push_back({{std::move(name), lo, hi}, std::move(f)});
    };
    add("day_count", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(static_cast<int>(plan_arg("day_count", a, 0).itinerary.size()));
    });
    add("people_count", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(plan_arg("people_count", a, 0).people_number);
    });
    add("start_city", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(plan_arg("start_city", a, 0).start_city);
    });
    add("target_city", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(plan_arg("target_city", a, 0).target_city);
    });
    add("allactivities", 1, 1, [](const Args& a, const Sandbox*) {
      return activity_list(plan_arg("allactivities", a, 0));
    });
    add("allactivities_count", 1, 1, [](const Args& a, const Sandbox*) {
      int n = 0;
      for (const auto& d : plan_arg("allactivities_count", a, 0).itinerary) {
        n += static_cast<int>(d.activities.size());
      }
      return Value(n);
    });
    add("dayactivities", 2, 2, [](const Args& a, const Sandbox*) {
      const Plan& p = plan_arg("dayactivities", a, 0);
      if (!a[1].is(Value::Kind::number)) type_fail("dayactivities", 1, "a day number", a[1]);
      Decimal day = a[1].as_number();
      ValueList out;
      if (day.is_integer() && day >= Decimal(1) &&
          day <= Decimal(static_cast<std::int64_t>(p.itinerary.size()))) {
        for (const auto& act : p.itinerary[static_cast<std::size_t>(day.floor() - 1)].activities) {
          out.emplace_back(&act);
        }
      }
      return Value::list(std::move(out));
    });
    add("activity_cost", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_arg("activity_cost", a, 0).cost.value_or(Decimal(0)));
    });
    add("activity_position", 1, 1, [](const Args& a, const Sandbox*) {
      return opt_text(activity_arg("activity_position", a, 0).position);
    });
    add("activity_price", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_arg("activity_price", a, 0).price.value_or(Decimal(0)));
    });
    add("activity_type", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(std::string(activity_type_name(activity_arg("activity_type", a, 0).type)));
    });
    add("activity_tickets", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_arg("activity_tickets", a, 0).tickets.value_or(0));
    });
    add("activity_transports", 1, 1, [](const Args& a, const Sandbox*) {
      ValueList out;
      for (const auto& leg : activity_arg("activity_transports", a, 0).transports) {
        out.emplace_back(&leg);
      }
      return Value::list(std::move(out));
    });
    add("activity_start_time", 1, 1, [](const Args& a, const Sandbox*) {
      return opt_text(activity_arg("activity_start_time", a, 0).start_time);
    });
    add("activity_end_time", 1, 1, [](const Args& a, const Sandbox*) {
      return opt_text(activity_arg("activity_end_time", a, 0).end_time);
    });
    add("activity_time", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_time(activity_arg("activity_time", a, 0)));
    });
    add("poi_recommend_time", 2, 2, [](const Args& a, const Sandbox* sb) {
      const Sandbox& s = need_sandbox("poi_recommend_time", sb);
      const std::string& city = text_arg("poi_recommend_time", a, 0);
      const std::string& poi = text_arg("poi_recommend_time", a, 1);
      const Table& t = s.city(city).attractions;
      auto row = t.find(poi);
      if (!row) throw NotFoundError("no attraction named '" + poi + "' in " + city);
      return Value(t.number(*row, t.column_index("recommendmintime")) * Decimal(60));
    });
    add("poi_distance", 3, 3, [](const Args& a, const Sandbox* sb) {
      return Value(poi_distance(need_sandbox("poi_distance", sb), text_arg("poi_distance", a, 0),
                                text_arg("poi_distance", a, 1), text_arg("poi_distance", a, 2)));
    });
    add("innercity_transport_cost", 1, 2, [](const Args& a, const Sandbox*) {
      auto legs = legs_arg("innercity_transport_cost", a, 0);
      return Value(transport_cost(legs, mode_arg("innercity_transport_cost", a, 1)));
    });
    add("innercity_transport_price", 1, 1, [](const Args& a, const Sandbox*) {
      Decimal sum;
      for (const auto& leg : legs_arg("innercity_transport_price", a, 0)) sum += leg.price;
      return Value(sum);
    });
    add("innercity_transport_distance", 1, 2, [](const Args& a, const Sandbox*) {
      auto legs = legs_arg("innercity_transport_distance", a, 0);
      auto mode = mode_arg("innercity_transport_distance", a, 1);
      Decimal sum;
      for (const auto& leg : legs) {
        if (!mode || leg.mode == *mode) sum += leg.distance;
      }
      return Value(sum);
    });
    add("innercity_transport_time", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(transport_time(legs_arg("innercity_transport_time", a, 0)));
    });
    add("metro_tickets", 1, 1, [](const Args& a, const Sandbox*) {
      const TransportLeg* leg = leg_at("metro_tickets", a, 0, 1);
      return Value(leg && leg->tickets ? *leg->tickets : 0);
    });
    add("taxi_cars", 1, 1, [](const Args& a, const Sandbox*) {
      const TransportLeg* leg = leg_at("taxi_cars", a, 0, 0);
      return Value(leg && leg->cars ? *leg->cars : 0);
    });
    add("room_count", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_arg("room_count", a, 0).rooms.value_or(0));
    });
    add("room_type", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(activity_arg("room_type", a, 0).room_type.value_or(0));
    });
    add("restaurant_type", 2, 2, [](const Args& a, const Sandbox* sb) {
      return Value(restaurant_type(need_sandbox("restaurant_type", sb),
                                   activity_arg("restaurant_type", a, 0),
                                   text_arg("restaurant_type", a, 1)));
    });
    add("attraction_type", 2, 2, [](const Args& a, const Sandbox* sb) {
      return Value(attraction_type(need_sandbox("attraction_type", sb),
                                   activity_arg("attraction_type", a, 0),
                                   text_arg("attraction_type", a, 1)));
    });
    add("accommodation_type", 2, 2, [](const Args& a, const Sandbox* sb) {
      return Value(accommodation_type(need_sandbox("accommodation_type", sb),
                                      activity_arg("accommodation_type", a, 0),
                                      text_arg("accommodation_type", a, 1)));
    });
    add("innercity_transport_type", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(innercity_transport_type(legs_arg("innercity_transport_type", a, 0)));
    });
    add("intercity_transport_type", 1, 1, [](const Args& a, const Sandbox*) {
      return Value(
          std::string(activity_type_name(activity_arg("intercity_transport_type", a, 0).type)));
    });
    add("innercity_transport_start_time", 1, 1, [](const Args& a, const Sandbox*) {
      const TransportLeg* leg = leg_at("innercity_transport_start_time", a, 0, 0);
      return Value(leg ? leg->start_time : std::string());
    });
    add("innercity_transport_end_time", 1, 1, [](const Args& a, const Sandbox*) {
      const TransportLeg* leg = leg_at("innercity_transport_end_time", a, 0, -1);
      return Value(leg ? leg->end_time : std::string());
    });
    add("intercity_transport_origin", 1, 1, [](const Args& a, const Sandbox* sb) {
      const Activity& act = activity_arg("intercity_transport_origin", a, 0);
      if (!act.start) return Value(std::string());
      return Value(city_in(need_sandbox("intercity_transport_origin", sb), *act.start));
    });
    add("intercity_transport_destination", 1, 1, [](const Args& a, const Sandbox* sb) {
      const Activity& act = activity_arg("intercity_transport_destination", a, 0);
      if (!act.end) return Value(std::string());
      return Value(city_in(need_sandbox("intercity_transport_destination", sb), *act.end));
    });
    return e;
  }();
  return table;
}

const std::map<std::string, std::string, std::less<>>& aliases() {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"all_activities", "allactivities"},
      {"intercity_transport_end_time", "innercity_transport_end_time"},
  };
  return m;
}

const Entry* find_entry(std::string_view name) {
  auto canonical = resolve_concept(name);
  if (!canonical) return nullptr;
  for (const auto& e : entries()) {
    if (e.info.name == *canonical) return &e;
  }
  return nullptr;
}

}  // namespace

const std::vector<ConceptInfo>& concept_table() {
  static const std::vector<ConceptInfo> infos = [] {
    std::vector<ConceptInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

std::optional<std::string> resolve_concept(std::string_view name) {
  if (auto it = aliases().find(name); it != aliases().end()) return it->second;
  for (const auto& e : entries()) {
    if (e.info.name == name) return e.info.name;
  }
  return std::nullopt;
}

const ConceptInfo* find_concept(std::string_view name) {
  const Entry* e = find_entry(name);
  return e ? &e->info : nullptr;
}

Value call_concept(std::string_view name, const std::vector<Value>& args, const Sandbox* sandbox) {
  const Entry* e = find_entry(name);
  if (!e) throw NameError("unknown concept '" + std::string(name) + "'");
  int n = static_cast<int>(args.size());
  if (n < e->info.min_args || n > e->info.max_args) {
    std::string want = e->info.min_args == e->info.max_args
                           ? std::to_string(e->info.min_args)
                           : std::to_string(e->info.min_args) + "-" +
                                 std::to_string(e->info.max_args);
    throw ArityError(e->info.name + " takes " + want + " argument(s), got " + std::to_string(n));
  }
  return e->impl(args, sandbox);
}

int activity_time(const Activity& a) {
  if (!a.start_time || !a.end_time) return -1;
  auto st = ClockTime::try_parse(*a.start_time);
  auto ed = ClockTime::try_parse(*a.end_time);
  if (!st || !ed) return -1;
  return *ed - *st;
}

int transport_time(const std::vector<TransportLeg>& legs) {
  if (legs.empty()) return 0;
  auto st = ClockTime::try_parse(legs.front().start_time);
  auto ed = ClockTime::try_parse(legs.back().end_time);
  if (!st || !ed) return 0;
  return *ed - *st;
}

Decimal transport_cost(const std::vector<TransportLeg>& legs,
                       std::optional<std::string_view> mode) {
  Decimal sum;
  for (const auto& leg : legs) {
    if (!mode || leg.mode == *mode) sum += leg.cost;
  }
  return sum;
}

Decimal poi_distance(const Sandbox& sb, std::string_view city, std::string_view poi1,
                     std::string_view poi2) {
  return position_distance(sb.city(city), poi1, poi2);
}

std::string restaurant_type(const Sandbox& sb, const Activity& a, std::string_view city) {
  return lookup_text(sb, TableKind::restaurants, a, city, "cuisinetype");
}

std::string attraction_type(const Sandbox& sb, const Activity& a, std::string_view city) {
  return lookup_text(sb, TableKind::attractions, a, city, "type");
}

std::string accommodation_type(const Sandbox& sb, const Activity& a, std::string_view city) {
  return lookup_text(sb, TableKind::hotels, a, city, "featurehoteltype");
}

std::string innercity_transport_type(const std::vector<TransportLeg>& legs) {
  if (legs.size() == 3) return legs[1].mode;
  if (legs.size() == 1) return legs[0].mode;
  return "";
}

std::string city_in(const Sandbox& sb, std::string_view location) {
  for (const auto& city : sb.city_list()) {
    if (location.find(city) != std::string_view::npos) return city;
  }
  return "";
}

}  // namespace itin
