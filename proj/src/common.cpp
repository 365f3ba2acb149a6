#include "itin/common.hpp"

#include <cctype>
#include <cstdio>

namespace itin {

std::optional<ClockTime> ClockTime::try_parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2) return std::nullopt;
  if (text.size() - colon - 1 != 2) return std::nullopt;
  int h = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    h = h * 10 + (text[i] - '0');
  }
  if (!std::isdigit(static_cast<unsigned char>(text[colon + 1])) ||
      !std::isdigit(static_cast<unsigned char>(text[colon + 2]))) {
    return std::nullopt;
  }
  int m = (text[colon + 1] - '0') * 10 + (text[colon + 2] - '0');
  if (m > 59) return std::nullopt;
  if (h > 24 || (h == 24 && m != 0)) return std::nullopt;
  return ClockTime(h * 60 + m);
}

ClockTime ClockTime::parse(std::string_view text) {
  auto t = try_parse(text);
  if (!t) throw ParseError("malformed clock time '" + std::string(text) + "'");
  return *t;
}

std::string ClockTime::to_string() const {
  char buf[16];
  int m = minutes_ < 0 ? 0 : minutes_;
  std::snprintf(buf, sizeof buf, "%02d:%02d", m / 60, m % 60);
  return buf;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text,
                                                                  std::string_view what) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  int lineno = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (!line.empty()) {
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(std::string(what) + " line " + std::to_string(lineno) +
                          ": expected key = value");
      }
      out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

}  // namespace itin
