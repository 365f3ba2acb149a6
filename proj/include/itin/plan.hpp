#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itin/decimal.hpp"
#include "itin/transport.hpp"
#include "itin/json.hpp"

namespace itin {

enum class ActivityType { attraction, breakfast, lunch, dinner, accommodation, train, airplane };

std::string_view activity_type_name(ActivityType type);
std::optional<ActivityType> parse_activity_type(std::string_view text);
bool is_meal(ActivityType type);
bool is_intercity(ActivityType type);

/// One scheduled activity. Optional fields stay unset when the source
/// document omits them so concept functions can apply their defaults.
struct Activity {
  ActivityType type = ActivityType::attraction;
  std::optional<std::string> position;
  std::optional<std::string> start_time;
  std::optional<std::string> end_time;
  std::optional<Decimal> price;
  std::optional<Decimal> cost;
  std::optional<int> tickets;
  std::optional<int> rooms;
  std::optional<int> room_type;
  std::vector<TransportLeg> transports;
  // Intercity activities only.
  std::optional<std::string> start;
  std::optional<std::string> end;
  std::optional<std::string> train_id;
  std::optional<std::string> flight_id;
  /// Members of the source object this model does not know about.
  json extras = json::object();

  const std::string& pos_or_empty() const;
  friend bool operator==(const Activity&, const Activity&) = default;
};

struct DayPlan {
  int day = 1;
  std::vector<Activity> activities;
  json extras = json::object();
  friend bool operator==(const DayPlan&, const DayPlan&) = default;
};

struct Plan {
  int people_number = 1;
  std::string start_city;
  std::string target_city;
  std::vector<DayPlan> itinerary;
  json extras = json::object();
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Throws ParseError (malformed text, path in message) or SchemaError
/// (missing/ill-typed mandatory field, unknown activity type).
Plan parse_plan(std::string_view document);
Plan plan_from_json(const json& doc);

json plan_to_json(const Plan& plan);
/// Canonical form: fixed key order, two-space indentation, trailing newline.
std::string serialize_plan(const Plan& plan);

json leg_to_json(const TransportLeg& leg);
json decimal_to_json(Decimal d);

}  // namespace itin
