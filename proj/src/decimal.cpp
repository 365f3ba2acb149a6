#include "itin/decimal.hpp"

#include <cmath>
#include <stdexcept>

namespace itin {

namespace {

std::int64_t div_round(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 q = num / den;
  __int128 r = num % den;
  if (r < 0) r = -r;
  if (2 * r >= den) q += (num < 0) ? -1 : 1;
  return static_cast<std::int64_t>(q);
}

}  // namespace

Decimal Decimal::from_double(double value) {
  return from_units(static_cast<std::int64_t>(std::llround(value * kScale)));
}

Decimal Decimal::parse(std::string_view text) {
  auto fail = [&]() -> Decimal {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  while (i < text.size() && text[i] == ' ') ++i;
  std::size_t end = text.size();
  while (end > i && text[end - 1] == ' ') --end;
  if (i == end) return fail();
  bool negative = false;
  if (text[i] == '-' || text[i] == '+') {
    negative = text[i] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool round_up = false;
  for (; i < end && text[i] != '.'; ++i) {
    if (text[i] < '0' || text[i] > '9') return fail();
    whole = whole * 10 + (text[i] - '0');
    any_digit = true;
    if (whole > 9'000'000'000'000) return fail();
  }
  if (i < end) {
    ++i;
    for (; i < end; ++i) {
      if (text[i] < '0' || text[i] > '9') return fail();
      any_digit = true;
      if (frac_digits < 6) {
        frac = frac * 10 + (text[i] - '0');
        ++frac_digits;
      } else if (frac_digits == 6) {
        round_up = text[i] >= '5';
        ++frac_digits;
      }
    }
  }
  if (!any_digit) return fail();
  for (int k = std::min(frac_digits, 6); k < 6; ++k) frac *= 10;
  std::int64_t units = whole * kScale + frac + (round_up ? 1 : 0);
  return from_units(negative ? -units : units);
}

std::string Decimal::to_string() const {
  std::int64_t v = units_;
  bool negative = v < 0;
  std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
  std::uint64_t whole = mag / kScale;
  std::uint64_t frac = mag % kScale;
  std::string out = negative ? "-" : "";
  out += std::to_string(whole);
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

std::int64_t Decimal::floor() const {
  std::int64_t q = units_ / kScale;
  if (units_ % kScale != 0 && units_ < 0) --q;
  return q;
}

std::int64_t Decimal::ceil() const {
  std::int64_t q = units_ / kScale;
  if (units_ % kScale != 0 && units_ > 0) ++q;
  return q;
}

Decimal Decimal::rounded(int digits) const {
  if (digits >= 6) return *this;
  std::int64_t step = 1;
  for (int k = digits; k < 6; ++k) step *= 10;
  return from_units(div_round(units_, step) * step);
}

Decimal operator*(Decimal a, Decimal b) {
  __int128 p = static_cast<__int128>(a.units_) * b.units_;
  return Decimal::from_units(div_round(p, Decimal::kScale));
}

Decimal operator/(Decimal a, Decimal b) {
  if (b.units_ == 0) throw std::domain_error("division by zero");
  __int128 n = static_cast<__int128>(a.units_) * Decimal::kScale;
  return Decimal::from_units(div_round(n, b.units_));
}

}  // namespace itin
