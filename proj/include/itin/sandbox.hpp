#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "itin/common.hpp"
#include "itin/decimal.hpp"
#include "itin/transport.hpp"

namespace itin {

enum class TableKind { attractions, restaurants, hotels };

std::string_view table_name(TableKind kind);
/// Accepts "attractions", "restaurants", "hotels" (and the singular forms).
std::optional<TableKind> parse_table_kind(std::string_view text);

enum class CellType { text, number, time };

using Cell = std::variant<std::string, Decimal, ClockTime>;

std::string cell_to_string(const Cell& cell);

struct ColumnSpec {
  std::string name;
  CellType type;
};

/// Column layout of a POI table. The order here is the canonical order used
/// for generic row access; CSV files may list columns in any order.
const std::vector<ColumnSpec>& table_schema(TableKind kind);

/// A loaded POI table: rows of typed cells plus a name index.
class Table {
 public:
  Table() = default;
  Table(TableKind kind, std::vector<std::vector<Cell>> rows);

  TableKind kind() const { return kind_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<ColumnSpec>& columns() const { return table_schema(kind_); }

  /// Column index for `key` (case-insensitive; "cuisine" aliases
  /// "cuisinetype"). Throws KeyError listing valid columns.
  std::size_t column_index(std::string_view key) const;
  std::optional<std::size_t> find_column(std::string_view key) const;

  const Cell& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  const std::string& text(std::size_t row, std::size_t col) const;
  Decimal number(std::size_t row, std::size_t col) const;
  ClockTime time(std::size_t row, std::size_t col) const;

  std::optional<std::size_t> find(std::string_view name) const;
  const std::string& name(std::size_t row) const { return text(row, 0); }

 private:
  TableKind kind_ = TableKind::attractions;
  std::vector<std::vector<Cell>> rows_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Handle to one row of one table. Valid while the owning database lives.
struct RecordRef {
  const Table* table = nullptr;
  std::size_t row = 0;

  const std::string& name() const { return table->name(row); }
  const Cell& get(std::string_view key) const {
    return table->cell(row, table->column_index(key));
  }
  friend bool operator==(const RecordRef& a, const RecordRef& b) {
    return a.table == b.table && a.row == b.row;
  }
};

struct LatLon {
  double lat = 0;
  double lon = 0;
};

/// Great-circle distance in km (haversine, R = 6371 km).
double haversine_km(LatLon a, LatLon b);

enum class RouteKind { train, airplane };

std::string_view route_kind_name(RouteKind kind);
std::optional<RouteKind> parse_route_kind(std::string_view text);

struct IntercityRoute {
  std::string id;
  RouteKind kind = RouteKind::train;
  std::string train_type;  // e.g. "G", "D"; empty for flights
  std::string from;        // station or airport name
  std::string to;
  ClockTime begin;
  ClockTime end;
  int duration = 0;  // minutes
  Decimal cost;      // per ticket
};

/// Speeds and fares used by `goto`. Loaded from an optional key=value file.
struct FareModel {
  Decimal walk_speed_kmh = 5;
  Decimal metro_speed_kmh = 30;
  Decimal metro_fare_per_band = 3;
  Decimal metro_band_km = 6;
  int metro_access_minutes = 2;
  Decimal taxi_speed_kmh = 40;
  Decimal taxi_base_fare = 10;
  Decimal taxi_per_km = Decimal::from_units(2'500'000);
  int taxi_capacity = 4;

  /// Parses `key = value` lines; `#` starts a comment. Unknown keys and
  /// malformed values throw ConfigError.
  static FareModel parse(std::string_view text);
  static FareModel load(const std::filesystem::path& path);
};

enum class TransportMode { walk, metro, taxi };

std::string_view mode_name(TransportMode mode);
std::optional<TransportMode> parse_mode(std::string_view text);

struct TransportOption {
  TransportMode mode = TransportMode::walk;
  std::vector<TransportLeg> legs;
  Decimal distance;     // km over all legs
  int minutes = 0;      // door to door
  Decimal unit_price;   // per person (walk/metro) or per car (taxi)
  Decimal cost;         // for the party size passed to goto
};

/// One city's POI tables, coordinates and departing routes.
class CityDatabase {
 public:
  std::string city_name;
  Table attractions;
  Table restaurants;
  Table hotels;
  /// Routes departing from one of this city's stations.
  std::vector<IntercityRoute> intercity_routes;
  /// Every POI name plus every station, hub and metro access point.
  std::map<std::string, LatLon, std::less<>> poi_coordinates;
  /// Names listed only in poi.csv (stations and airports).
  std::vector<std::string> stations;

  const Table& table(TableKind kind) const;
  bool has_position(std::string_view name) const;
  /// Throws NotFoundError.
  LatLon coordinates(std::string_view name) const;
};

/// Paginated result holder. A default-constructed session has no prior
/// result and `next_page` throws StateError.
class QuerySession {
 public:
  static constexpr std::size_t kPageSize = 10;

  QuerySession() = default;
  explicit QuerySession(std::vector<RecordRef> rows) : rows_(std::move(rows)), has_result_(true) {}

  const std::vector<RecordRef>& last_result() const { return rows_; }
  std::size_t cursor() const { return cursor_; }
  /// Returns rows [10c, 10c+10) and advances the cursor.
  std::vector<RecordRef> next_page();

 private:
  std::vector<RecordRef> rows_;
  std::size_t cursor_ = 0;
  bool has_result_ = false;
};

struct NearbyHit {
  RecordRef record;
  double distance_km = 0;
};

/// Reads `<root>/<city>/*.csv`. Throws LoadError / IntegrityError.
CityDatabase load_city_data(const std::filesystem::path& root, const std::string& city);

/// Multi-city container: every subdirectory of the data root is a city.
class Sandbox {
 public:
  Sandbox() = default;
  /// Loads all cities plus `<root>/fares.cfg` if present.
  static Sandbox load(const std::filesystem::path& root);

  void add_city(CityDatabase db);
  FareModel fares;

  const std::vector<std::string>& city_list() const { return city_names_; }
  bool has_city(std::string_view city) const;
  /// Throws NotFoundError.
  const CityDatabase& city(std::string_view name) const;
  /// City whose poi.csv lists `station`, or empty.
  std::string city_of_station(std::string_view station) const;
  /// Looks up a route by id across all cities.
  const IntercityRoute* find_route(std::string_view id) const;

  std::vector<IntercityRoute> intercity_select(std::string_view from_city, std::string_view to_city,
                                               RouteKind kind, ClockTime earliest_leave) const;

 private:
  std::vector<std::unique_ptr<CityDatabase>> cities_;
  std::vector<std::string> city_names_;
};

using CellPredicate = std::function<bool(const Cell&)>;

/// All rows whose `key` column satisfies `pred`, in table order.
QuerySession select(const CityDatabase& db, TableKind table, std::string_view key,
                    const CellPredicate& pred);
/// Convenience predicate: text or numeric equality.
CellPredicate equals(std::string value);

std::vector<NearbyHit> nearby(const CityDatabase& db, TableKind table, LatLon point, int topk,
                              double dist_km);

/// Inclusive on both ends; hotels are always open. Throws NotFoundError.
bool is_open(const CityDatabase& db, TableKind table, std::string_view name, ClockTime time);

/// Single option for the mode. `people` sizes tickets/cars and the cost
/// fields. Throws NotFoundError for unknown positions.
TransportOption goto_poi(const CityDatabase& db, const FareModel& fares, std::string_view start,
                         std::string_view end, ClockTime start_time, TransportMode mode,
                         int people = 1);

/// Walk distance between two positions rounded to 3 digits.
Decimal position_distance(const CityDatabase& db, std::string_view a, std::string_view b);

}  // namespace itin
