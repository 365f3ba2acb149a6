#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace itin {

/// Fixed-point decimal with six fractional digits.
///
/// All currency, distance and DSL arithmetic runs through this type so that
/// results are identical across platforms. Products and quotients are rounded
/// half away from zero back to six digits.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Decimal() = default;
  constexpr Decimal(int value) : units_(static_cast<std::int64_t>(value) * kScale) {}
  constexpr Decimal(std::int64_t value) : units_(value * kScale) {}

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  /// Rounds to the nearest representable value.
  static Decimal from_double(double value);
  /// Parses "12", "-3.5", "0.125". Throws std::invalid_argument on bad input.
  static Decimal parse(std::string_view text);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / kScale; }
  /// Shortest decimal rendering: trailing zeros and a bare point removed.
  std::string to_string() const;

  bool is_integer() const { return units_ % kScale == 0; }
  std::int64_t ceil() const;
  std::int64_t floor() const;
  /// Rounds to `digits` fractional digits (0..6), half away from zero.
  Decimal rounded(int digits) const;

  Decimal operator-() const { return from_units(-units_); }
  Decimal& operator+=(Decimal rhs) {
    units_ += rhs.units_;
    return *this;
  }
  Decimal& operator-=(Decimal rhs) {
    units_ -= rhs.units_;
    return *this;
  }
  friend Decimal operator+(Decimal a, Decimal b) { return a += b; }
  friend Decimal operator-(Decimal a, Decimal b) { return a -= b; }
  friend Decimal operator*(Decimal a, Decimal b);
  /// Throws std::domain_error when `b` is zero.
  friend Decimal operator/(Decimal a, Decimal b);

  friend constexpr auto operator<=>(Decimal, Decimal) = default;
  friend constexpr bool operator==(Decimal, Decimal) = default;

 private:
  std::int64_t units_ = 0;
};

}  // namespace itin
