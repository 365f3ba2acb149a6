#pragma once

#include <optional>
#include <string>
#include <vector>

#include "itin/decimal.hpp"

namespace itin {

/// One inner-city transport leg, as stored in plans and produced by `goto`.
///
/// Times are kept as the raw "HH:MM" text so a plan document round-trips
/// exactly even when a field is malformed; validators parse on demand.
struct TransportLeg {
  std::string mode;  // "walk", "metro" or "taxi" in well-formed plans
  std::string start;
  std::string end;
  std::string start_time;
  std::string end_time;
  Decimal distance;  // km, 3 fractional digits
  Decimal price;     // per ticket or per car
  Decimal cost;
  std::optional<int> tickets;
  std::optional<int> cars;

  friend bool operator==(const TransportLeg&, const TransportLeg&) = default;
};

}  // namespace itin
