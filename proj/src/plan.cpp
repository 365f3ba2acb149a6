#include "itin/plan.hpp"

#include <cmath>

#include "itin/common.hpp"

namespace itin {

namespace {

constexpr ActivityType kAllTypes[] = {
    ActivityType::attraction, ActivityType::breakfast,     ActivityType::lunch,
    ActivityType::dinner,     ActivityType::accommodation, ActivityType::train,
    ActivityType::airplane,
};

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_fail(path, "expected a string");
  return v.get<std::string>();
}

Decimal get_decimal(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Decimal(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return Decimal(static_cast<std::int64_t>(v.get<std::uint64_t>()));
  if (v.is_number_float()) return Decimal::from_double(v.get<double>());
  schema_fail(path, "expected a number");
}

int get_int(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<int>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<int>(d);
  }
  schema_fail(path, "expected an integer");
}

TransportLeg leg_from_json(const json& v, const std::string& path) {
  if (!v.is_object()) schema_fail(path, "expected an object");
  TransportLeg leg;
  if (auto m = member(v, "mode")) leg.mode = get_string(*m, path + ".mode");
  if (auto m = member(v, "start")) leg.start = get_string(*m, path + ".start");
  if (auto m = member(v, "end")) leg.end = get_string(*m, path + ".end");
  if (auto m = member(v, "start_time")) leg.start_time = get_string(*m, path + ".start_time");
  if (auto m = member(v, "end_time")) leg.end_time = get_string(*m, path + ".end_time");
  if (auto m = member(v, "distance")) leg.distance = get_decimal(*m, path + ".distance");
  if (auto m = member(v, "price")) leg.price = get_decimal(*m, path + ".price");
  if (auto m = member(v, "cost")) leg.cost = get_decimal(*m, path + ".cost");
  if (auto m = member(v, "tickets")) leg.tickets = get_int(*m, path + ".tickets");
  if (auto m = member(v, "cars")) leg.cars = get_int(*m, path + ".cars");
  return leg;
}

Activity activity_from_json(const json& v, const std::string& path) {
  if (!v.is_object()) schema_fail(path, "expected an object");
  Activity a;
  const json* type = member(v, "type");
  if (!type) schema_fail(path, "missing mandatory field 'type'");
  std::string t = get_string(*type, path + ".type");
  auto parsed = parse_activity_type(t);
  if (!parsed) schema_fail(path + ".type", "unknown activity type '" + t + "'");
  a.type = *parsed;
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string& key = it.key();
    std::string p = path + "." + key;
    const json& val = it.value();
    if (key == "type") {
      continue;
    } else if (key == "position") {
      a.position = get_string(val, p);
    } else if (key == "start_time") {
      a.start_time = get_string(val, p);
    } else if (key == "end_time") {
      a.end_time = get_string(val, p);
    } else if (key == "price") {
      a.price = get_decimal(val, p);
    } else if (key == "cost") {
      a.cost = get_decimal(val, p);
    } else if (key == "tickets") {
      a.tickets = get_int(val, p);
    } else if (key == "rooms") {
      a.rooms = get_int(val, p);
    } else if (key == "room_type") {
      a.room_type = get_int(val, p);
    } else if (key == "transports") {
      if (!val.is_array()) schema_fail(p, "expected an array");
      for (std::size_t i = 0; i < val.size(); ++i) {
        a.transports.push_back(leg_from_json(val[i], p + "[" + std::to_string(i) + "]"));
      }
    } else if (key == "start") {
      a.start = get_string(val, p);
    } else if (key == "end") {
      a.end = get_string(val, p);
    } else if (key == "TrainID") {
      a.train_id = get_string(val, p);
    } else if (key == "FlightID") {
      a.flight_id = get_string(val, p);
    } else {
      a.extras[key] = val;
    }
  }
  return a;
}

}  // namespace

std::string_view activity_type_name(ActivityType type) {
  switch (type) {
    case ActivityType::attraction:
      return "attraction";
    case ActivityType::breakfast:
      return "breakfast";
    case ActivityType::lunch:
      return "lunch";
    case ActivityType::dinner:
      return "dinner";
    case ActivityType::accommodation:
      return "accommodation";
    case ActivityType::train:
      return "train";
    case ActivityType::airplane:
      return "airplane";
  }
  return "";
}

std::optional<ActivityType> parse_activity_type(std::string_view text) {
  for (ActivityType t : kAllTypes) {
    if (activity_type_name(t) == text) return t;
  }
  return std::nullopt;
}

bool is_meal(ActivityType type) {
  return type == ActivityType::breakfast || type == ActivityType::lunch ||
         type == ActivityType::dinner;
}

bool is_intercity(ActivityType type) {
  return type == ActivityType::train || type == ActivityType::airplane;
}

const std::string& Activity::pos_or_empty() const {
  static const std::string empty;
  return position ? *position : empty;
}

Plan plan_from_json(const json& doc) {
  if (!doc.is_object()) schema_fail("$", "plan must be an object");
  Plan plan;
  const json* people = member(doc, "people_number");
  const json* start = member(doc, "start_city");
  const json* target = member(doc, "target_city");
  const json* itinerary = member(doc, "itinerary");
  if (!people) schema_fail("$", "missing mandatory field 'people_number'");
  if (!start) schema_fail("$", "missing mandatory field 'start_city'");
  if (!target) schema_fail("$", "missing mandatory field 'target_city'");
  if (!itinerary) schema_fail("$", "missing mandatory field 'itinerary'");
  plan.people_number = get_int(*people, "$.people_number");
  if (plan.people_number < 1) schema_fail("$.people_number", "must be at least 1");
  plan.start_city = get_string(*start, "$.start_city");
  plan.target_city = get_string(*target, "$.target_city");
  if (!itinerary->is_array()) schema_fail("$.itinerary", "expected an array");
  for (std::size_t d = 0; d < itinerary->size(); ++d) {
    std::string path = "$.itinerary[" + std::to_string(d) + "]";
    const json& day = (*itinerary)[d];
    if (!day.is_object()) schema_fail(path, "expected an object");
    DayPlan dp;
    dp.day = static_cast<int>(d) + 1;
    const json* acts = member(day, "activities");
    if (!acts) schema_fail(path, "missing mandatory field 'activities'");
    if (!acts->is_array()) schema_fail(path + ".activities", "expected an array");
    for (auto it = day.begin(); it != day.end(); ++it) {
      if (it.key() == "day") {
        dp.day = get_int(it.value(), path + ".day");
      } else if (it.key() != "activities") {
        dp.extras[it.key()] = it.value();
      }
    }
    for (std::size_t i = 0; i < acts->size(); ++i) {
      dp.activities.push_back(
          activity_from_json((*acts)[i], path + ".activities[" + std::to_string(i) + "]"));
    }
    plan.itinerary.push_back(std::move(dp));
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "people_number" && k != "start_city" && k != "target_city" && k != "itinerary") {
      plan.extras[k] = it.value();
    }
  }
  return plan;
}

Plan parse_plan(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan document: ") + e.what());
  }
  return plan_from_json(doc);
}

json decimal_to_json(Decimal d) {
  if (d.is_integer()) return json(d.floor());
  return json(d.to_double());
}

json leg_to_json(const TransportLeg& leg) {
  json j = json::object();
  j["mode"] = leg.mode;
  j["start"] = leg.start;
  j["end"] = leg.end;
  j["start_time"] = leg.start_time;
  j["end_time"] = leg.end_time;
  j["distance"] = decimal_to_json(leg.distance);
  j["price"] = decimal_to_json(leg.price);
  j["cost"] = decimal_to_json(leg.cost);
  if (leg.tickets) j["tickets"] = *leg.tickets;
  if (leg.cars) j["cars"] = *leg.cars;
  return j;
}

json plan_to_json(const Plan& plan) {
  json doc = json::object();
  doc["people_number"] = plan.people_number;
  doc["start_city"] = plan.start_city;
  doc["target_city"] = plan.target_city;
  json days = json::array();
  for (const auto& dp : plan.itinerary) {
    json day = json::object();
    day["day"] = dp.day;
    json acts = json::array();
    for (const auto& a : dp.activities) {
      json j = json::object();
      j["type"] = std::string(activity_type_name(a.type));
      if (a.position) j["position"] = *a.position;
      if (a.start) j["start"] = *a.start;
      if (a.end) j["end"] = *a.end;
      if (a.train_id) j["TrainID"] = *a.train_id;
      if (a.flight_id) j["FlightID"] = *a.flight_id;
      if (a.start_time) j["start_time"] = *a.start_time;
      if (a.end_time) j["end_time"] = *a.end_time;
      if (a.price) j["price"] = decimal_to_json(*a.price);
      if (a.cost) j["cost"] = decimal_to_json(*a.cost);
      if (a.tickets) j["tickets"] = *a.tickets;
      if (a.rooms) j["rooms"] = *a.rooms;
      if (a.room_type) j["room_type"] = *a.room_type;
      json legs = json::array();
      for (const auto& leg : a.transports) legs.push_back(leg_to_json(leg));
      j["transports"] = std::move(legs);
      for (auto it = a.extras.begin(); it != a.extras.end(); ++it) j[it.key()] = it.value();
      acts.push_back(std::move(j));
    }
    day["activities"] = std::move(acts);
    for (auto it = dp.extras.begin(); it != dp.extras.end(); ++it) day[it.key()] = it.value();
    days.push_back(std::move(day));
  }
  doc["itinerary"] = std::move(days);
  for (auto it = plan.extras.begin(); it != plan.extras.end(); ++it) doc[it.key()] = it.value();
  return doc;
}

std::string serialize_plan(const Plan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

}  // namespace itin
