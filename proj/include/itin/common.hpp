#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace itin {

// Error taxonomy. Each module throws the most specific subclass; the CLI maps
// UsageError to exit code 2 and everything else to 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LoadError : Error {
  using Error::Error;
};
struct IntegrityError : Error {
  using Error::Error;
};
struct KeyError : Error {
  using Error::Error;
};
struct NotFoundError : Error {
  using Error::Error;
};
struct StateError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct UsageError : Error {
  using Error::Error;
};

/// Wall-clock time of day in whole minutes since midnight. 24:00 (1440) is
/// accepted as an end-of-day marker; later values only exist transiently
/// inside the planner and are never serialized into valid plans.
class ClockTime {
 public:
  constexpr ClockTime() = default;
  constexpr explicit ClockTime(int minutes) : minutes_(minutes) {}
  constexpr static ClockTime hm(int h, int m) { return ClockTime(h * 60 + m); }

  /// Parses "H:MM" or "HH:MM". Returns nullopt on malformed text.
  static std::optional<ClockTime> try_parse(std::string_view text);
  /// Throws ParseError on malformed text.
  static ClockTime parse(std::string_view text);

  constexpr int minutes() const { return minutes_; }
  std::string to_string() const;

  friend constexpr ClockTime operator+(ClockTime t, int minutes) {
    return ClockTime(t.minutes_ + minutes);
  }
  friend constexpr int operator-(ClockTime a, ClockTime b) {
    return a.minutes_ - b.minutes_;
  }
  friend constexpr auto operator<=>(ClockTime, ClockTime) = default;
  friend constexpr bool operator==(ClockTime, ClockTime) = default;

 private:
  int minutes_ = 0;
};

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits. Used for manifest and
/// transcript keys where a stable, platform-independent digest is needed.
std::string fnv1a_hex(std::string_view data);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// `key = value` lines; `#` starts a comment. Throws ConfigError naming
/// `what` and the line for lines without `=`.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text,
                                                                  std::string_view what);

}  // namespace itin
