#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itin/common.hpp"
#include "itin/sandbox.hpp"
#include "itin/value.hpp"

namespace itin {

struct NameError : Error {
  using Error::Error;
};
struct ArityError : Error {
  using Error::Error;
};
/// An argument of the wrong runtime kind.
struct ConceptTypeError : Error {
  using Error::Error;
};

struct ConceptInfo {
  std::string name;
  int min_args;
  int max_args;
};

/// The 35 concept functions, in table order.
const std::vector<ConceptInfo>& concept_table();
/// Canonical name for `name`, resolving aliases such as `all_activities`.
std::optional<std::string> resolve_concept(std::string_view name);
const ConceptInfo* find_concept(std::string_view name);

/// Evaluates a concept. `sandbox` may be null for concepts that do not touch
/// the database; database-backed concepts then throw StateError.
Value call_concept(std::string_view name, const std::vector<Value>& args, const Sandbox* sandbox);

// Direct C++ entry points used by the planner and tests.
int activity_time(const Activity& a);
int transport_time(const std::vector<TransportLeg>& legs);
Decimal transport_cost(const std::vector<TransportLeg>& legs, std::optional<std::string_view> mode);
Decimal poi_distance(const Sandbox& sb, std::string_view city, std::string_view poi1,
                     std::string_view poi2);
std::string restaurant_type(const Sandbox& sb, const Activity& a, std::string_view city);
std::string attraction_type(const Sandbox& sb, const Activity& a, std::string_view city);
std::string accommodation_type(const Sandbox& sb, const Activity& a, std::string_view city);
std::string innercity_transport_type(const std::vector<TransportLeg>& legs);
std::string city_in(const Sandbox& sb, std::string_view location);

}  // namespace itin
