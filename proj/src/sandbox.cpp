#include "itin/sandbox.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace itin {

namespace {

const std::vector<ColumnSpec> kAttractionSchema = {
    {"name", CellType::text},          {"type", CellType::text},
    {"latitude", CellType::number},    {"longitude", CellType::number},
    {"opentime", CellType::time},      {"endtime", CellType::time},
    {"price", CellType::number},       {"recommendmintime", CellType::number},
    {"recommendmaxtime", CellType::number},
};

const std::vector<ColumnSpec> kRestaurantSchema = {
    {"name", CellType::text},       {"latitude", CellType::number},
    {"longitude", CellType::number}, {"price", CellType::number},
    {"cuisinetype", CellType::text}, {"opentime", CellType::time},
    {"endtime", CellType::time},     {"recommendedfood", CellType::text},
};

const std::vector<ColumnSpec> kHotelSchema = {
    {"name", CellType::text},      {"name_en", CellType::text},
    {"featurehoteltype", CellType::text}, {"latitude", CellType::number},
    {"longitude", CellType::number}, {"price", CellType::number},
    {"numbed", CellType::number},
};

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path, const std::string& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read table '" + table + "' at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Maps header names (case-insensitive, aliases applied) to column positions.
struct Header {
  std::unordered_map<std::string, std::size_t> pos;

  std::size_t require(const std::string& name, const std::string& table) const {
    auto it = pos.find(name);
    if (it == pos.end()) throw LoadError("table '" + table + "' lacks column '" + name + "'");
    return it->second;
  }
  std::optional<std::size_t> optional(const std::string& name) const {
    auto it = pos.find(name);
    if (it == pos.end()) return std::nullopt;
    return it->second;
  }
};

Header read_header(const std::vector<std::string>& cols,
                   const std::unordered_map<std::string, std::string>& aliases = {}) {
  Header h;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    std::string key = to_lower(trim(cols[i]));
    if (auto a = aliases.find(key); a != aliases.end()) key = a->second;
    h.pos.emplace(key, i);
  }
  return h;
}

const std::string& field_at(const std::vector<std::string>& row, std::size_t i) {
  static const std::string empty;
  return i < row.size() ? row[i] : empty;
}

Decimal parse_number(const std::string& raw, const std::string& where) {
  try {
    return Decimal::parse(trim(raw));
  } catch (const std::invalid_argument&) {
    throw LoadError(where + ": not a number: '" + raw + "'");
  }
}

ClockTime parse_time(const std::string& raw, const std::string& where) {
  auto t = ClockTime::try_parse(trim(raw));
  if (!t) throw LoadError(where + ": not a clock time: '" + raw + "'");
  return *t;
}

Table load_table(const std::filesystem::path& dir, TableKind kind) {
  std::string name(table_name(kind));
  auto rows = parse_csv(read_file(dir / (name + ".csv"), name));
  if (rows.empty()) throw LoadError("table '" + name + "' has no header");
  Header header = read_header(rows[0], {{"cuisine", "cuisinetype"}});
  const auto& schema = table_schema(kind);
  std::vector<std::size_t> pos;
  for (const auto& col : schema) pos.push_back(header.require(col.name, name));

  std::vector<std::vector<Cell>> cells;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<Cell> out;
    std::string where = name + " row " + std::to_string(r + 1);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      std::string raw = trim(field_at(rows[r], pos[c]));
      switch (schema[c].type) {
        case CellType::text:
          out.emplace_back(raw);
          break;
        case CellType::number:
          out.emplace_back(parse_number(raw, where));
          break;
        case CellType::time:
          if (raw.empty()) {
            // Missing hours mean open all day.
            out.emplace_back(ClockTime(schema[c].name == "opentime" ? 0 : 1440));
          } else {
            out.emplace_back(parse_time(raw, where));
          }
          break;
      }
    }
    cells.push_back(std::move(out));
  }
  return Table(kind, std::move(cells));
}

bool is_airplane_id(std::string_view id) { return id.size() >= 2 && id.substr(0, 2) == "FL"; }

}  // namespace

std::string_view table_name(TableKind kind) {
  switch (kind) {
    case TableKind::attractions:
      return "attractions";
    case TableKind::restaurants:
      return "restaurants";
    case TableKind::hotels:
      return "hotels";
  }
  return "";
}

std::optional<TableKind> parse_table_kind(std::string_view text) {
  std::string t = to_lower(text);
  if (t == "attractions" || t == "attraction") return TableKind::attractions;
  if (t == "restaurants" || t == "restaurant") return TableKind::restaurants;
  if (t == "hotels" || t == "hotel" || t == "accommodations") return TableKind::hotels;
  return std::nullopt;
}

std::string cell_to_string(const Cell& cell) {
  if (auto s = std::get_if<std::string>(&cell)) return *s;
  if (auto d = std::get_if<Decimal>(&cell)) return d->to_string();
  return std::get<ClockTime>(cell).to_string();
}

const std::vector<ColumnSpec>& table_schema(TableKind kind) {
  switch (kind) {
    case TableKind::attractions:
      return kAttractionSchema;
    case TableKind::restaurants:
      return kRestaurantSchema;
    case TableKind::hotels:
      return kHotelSchema;
  }
  return kAttractionSchema;
}

Table::Table(TableKind kind, std::vector<std::vector<Cell>> rows)
    : kind_(kind), rows_(std::move(rows)) {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::string& n = name(r);
    if (n.empty()) {
      throw IntegrityError(std::string(table_name(kind)) + " row " + std::to_string(r + 2) +
                           " has an empty name");
    }
    if (!by_name_.emplace(n, r).second) {
      throw IntegrityError("duplicate name '" + n + "' in " + std::string(table_name(kind)));
    }
  }
  if (auto open = find_column("opentime")) {
    auto close = find_column("endtime");
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (time(r, *open) > time(r, *close)) {
        throw IntegrityError("'" + name(r) + "' closes before it opens (overnight hours are "
                             "not supported)");
      }
    }
  }
}

std::optional<std::size_t> Table::find_column(std::string_view key) const {
  std::string k = to_lower(key);
  if (k == "cuisine") k = "cuisinetype";
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].name == k) return i;
  }
  return std::nullopt;
}

std::size_t Table::column_index(std::string_view key) const {
  if (auto i = find_column(key)) return *i;
  std::string valid;
  for (const auto& c : columns()) valid += (valid.empty() ? "" : ", ") + c.name;
  throw KeyError("unknown column '" + std::string(key) + "' for " +
                 std::string(table_name(kind_)) + "; valid columns: " + valid);
}

const std::string& Table::text(std::size_t row, std::size_t col) const {
  return std::get<std::string>(rows_[row][col]);
}

Decimal Table::number(std::size_t row, std::size_t col) const {
  return std::get<Decimal>(rows_[row][col]);
}

ClockTime Table::time(std::size_t row, std::size_t col) const {
  return std::get<ClockTime>(rows_[row][col]);
}

std::optional<std::size_t> Table::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

double haversine_km(LatLon a, LatLon b) {
  constexpr double kRadius = 6371.0;
  constexpr double kRad = std::numbers::pi / 180.0;
  double dlat = (b.lat - a.lat) * kRad;
  double dlon = (b.lon - a.lon) * kRad;
  double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * std::sin(dlon / 2) *
                 std::sin(dlon / 2);
  return 2 * kRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string_view route_kind_name(RouteKind kind) {
  return kind == RouteKind::train ? "train" : "airplane";
}

std::optional<RouteKind> parse_route_kind(std::string_view text) {
  std::string t = to_lower(text);
  if (t == "train") return RouteKind::train;
  if (t == "airplane" || t == "flight") return RouteKind::airplane;
  return std::nullopt;
}

FareModel FareModel::parse(std::string_view text) {
  FareModel f;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("fare config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    Decimal v;
    try {
      v = Decimal::parse(value);
    } catch (const std::invalid_argument&) {
      throw ConfigError("fare config line " + std::to_string(lineno) + ": bad value '" + value +
                        "'");
    }
    if (v <= Decimal(0) && key != "taxi_base_fare" && key != "taxi_per_km" &&
        key != "metro_access_minutes") {
      throw ConfigError("fare config: '" + key + "' must be positive");
    }
    if (key == "walk_speed_kmh") {
      f.walk_speed_kmh = v;
    } else if (key == "metro_speed_kmh") {
      f.metro_speed_kmh = v;
    } else if (key == "metro_fare_per_band") {
      f.metro_fare_per_band = v;
    } else if (key == "metro_band_km") {
      f.metro_band_km = v;
    } else if (key == "metro_access_minutes") {
      f.metro_access_minutes = static_cast<int>(v.floor());
    } else if (key == "taxi_speed_kmh") {
      f.taxi_speed_kmh = v;
    } else if (key == "taxi_base_fare") {
      f.taxi_base_fare = v;
    } else if (key == "taxi_per_km") {
      f.taxi_per_km = v;
    } else if (key == "taxi_capacity") {
      f.taxi_capacity = static_cast<int>(v.floor());
    } else {
      throw ConfigError("fare config: unknown key '" + key + "'");
    }
  }
  return f;
}

FareModel FareModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read fare config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string_view mode_name(TransportMode mode) {
  switch (mode) {
    case TransportMode::walk:
      return "walk";
    case TransportMode::metro:
      return "metro";
    case TransportMode::taxi:
      return "taxi";
  }
  return "";
}

std::optional<TransportMode> parse_mode(std::string_view text) {
  if (text == "walk") return TransportMode::walk;
  if (text == "metro") return TransportMode::metro;
  if (text == "taxi") return TransportMode::taxi;
  return std::nullopt;
}

const Table& CityDatabase::table(TableKind kind) const {
  switch (kind) {
    case TableKind::attractions:
      return attractions;
    case TableKind::restaurants:
      return restaurants;
    case TableKind::hotels:
      return hotels;
  }
  return attractions;
}

bool CityDatabase::has_position(std::string_view name) const {
  return poi_coordinates.find(name) != poi_coordinates.end();
}

LatLon CityDatabase::coordinates(std::string_view name) const {
  auto it = poi_coordinates.find(name);
  if (it == poi_coordinates.end()) {
    throw NotFoundError("unknown position '" + std::string(name) + "' in " + city_name);
  }
  return it->second;
}

std::vector<RecordRef> QuerySession::next_page() {
  if (!has_result_) throw StateError("next_page called before any select");
  std::size_t begin = cursor_ * kPageSize;
  if (begin >= rows_.size()) return {};
  std::size_t end = std::min(rows_.size(), begin + kPageSize);
  ++cursor_;
  return {rows_.begin() + static_cast<std::ptrdiff_t>(begin),
          rows_.begin() + static_cast<std::ptrdiff_t>(end)};
}

CityDatabase load_city_data(const std::filesystem::path& root, const std::string& city) {
  auto dir = root / city;
  if (!std::filesystem::is_directory(dir)) {
    throw LoadError("city directory not found: " + dir.string());
  }
  CityDatabase db;
  db.city_name = city;
  db.attractions = load_table(dir, TableKind::attractions);
  db.restaurants = load_table(dir, TableKind::restaurants);
  db.hotels = load_table(dir, TableKind::hotels);

  for (TableKind kind : {TableKind::attractions, TableKind::restaurants, TableKind::hotels}) {
    const Table& t = db.table(kind);
    std::size_t lat = t.column_index("latitude");
    std::size_t lon = t.column_index("longitude");
    for (std::size_t r = 0; r < t.size(); ++r) {
      LatLon p{t.number(r, lat).to_double(), t.number(r, lon).to_double()};
      if (!db.poi_coordinates.emplace(t.name(r), p).second) {
        throw IntegrityError("name '" + t.name(r) + "' appears in more than one table of " + city);
      }
    }
  }

  auto poi_rows = parse_csv(read_file(dir / "poi.csv", "poi"));
  if (poi_rows.empty()) throw LoadError("table 'poi' has no header");
  Header ph = read_header(poi_rows[0]);
  std::size_t pn = ph.require("name", "poi");
  std::size_t plat = ph.require("latitude", "poi");
  std::size_t plon = ph.require("longitude", "poi");
  std::map<std::string, LatLon> seen;
  for (std::size_t r = 1; r < poi_rows.size(); ++r) {
    std::string where = "poi row " + std::to_string(r + 1);
    std::string name = trim(field_at(poi_rows[r], pn));
    if (name.empty()) throw IntegrityError(where + " has an empty name");
    LatLon p{parse_number(field_at(poi_rows[r], plat), where).to_double(),
             parse_number(field_at(poi_rows[r], plon), where).to_double()};
    if (!seen.emplace(name, p).second) throw IntegrityError("duplicate name '" + name + "' in poi");
    auto it = db.poi_coordinates.find(name);
    if (it != db.poi_coordinates.end()) {
      if (it->second.lat != p.lat || it->second.lon != p.lon) {
        throw IntegrityError("poi '" + name + "' has coordinates that disagree with its table");
      }
      continue;
    }
    db.poi_coordinates.emplace(name, p);
    db.stations.push_back(name);
  }

  auto route_rows = parse_csv(read_file(dir / "intercity.csv", "intercity"));
  if (route_rows.empty()) throw LoadError("table 'intercity' has no header");
  Header rh = read_header(route_rows[0], {{"trainid", "id"}, {"flightid", "id"}});
  std::size_t ck = rh.require("kind", "intercity");
  std::size_t cid = rh.require("id", "intercity");
  auto ctt = rh.optional("traintype");
  std::size_t cfrom = rh.require("from", "intercity");
  std::size_t cto = rh.require("to", "intercity");
  std::size_t cbeg = rh.require("begintime", "intercity");
  std::size_t cend = rh.require("endtime", "intercity");
  std::size_t cdur = rh.require("duration", "intercity");
  std::size_t ccost = rh.require("cost", "intercity");
  for (std::size_t r = 1; r < route_rows.size(); ++r) {
    const auto& row = route_rows[r];
    std::string where = "intercity row " + std::to_string(r + 1);
    IntercityRoute route;
    auto kind = parse_route_kind(trim(field_at(row, ck)));
    if (!kind) throw LoadError(where + ": kind must be train or airplane");
    route.kind = *kind;
    route.id = trim(field_at(row, cid));
    if (route.id.empty()) throw IntegrityError(where + ": empty id");
    if (is_airplane_id(route.id) != (route.kind == RouteKind::airplane)) {
      throw IntegrityError(where + ": id '" + route.id + "' does not match kind (flight ids start "
                           "with FL, train ids must not)");
    }
    if (ctt) route.train_type = trim(field_at(row, *ctt));
    route.from = trim(field_at(row, cfrom));
    route.to = trim(field_at(row, cto));
    route.begin = parse_time(field_at(row, cbeg), where);
    route.end = parse_time(field_at(row, cend), where);
    Decimal dur = parse_number(field_at(row, cdur), where);
    if (!dur.is_integer()) throw LoadError(where + ": duration must be whole minutes");
    route.duration = static_cast<int>(dur.floor());
    route.cost = parse_number(field_at(row, ccost), where);
    if (!(route.begin < route.end)) throw IntegrityError(where + ": end must be after begin");
    if (route.end - route.begin != route.duration) {
      throw IntegrityError(where + ": duration disagrees with begin/end");
    }
    if (route.cost <= Decimal(0)) throw IntegrityError(where + ": cost must be positive");
    if (!db.has_position(route.from)) {
      throw IntegrityError(where + ": origin '" + route.from + "' is not a station of " + city);
    }
    db.intercity_routes.push_back(std::move(route));
  }
  return db;
}

Sandbox Sandbox::load(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw LoadError("data root not found: " + root.string());
  }
  Sandbox sb;
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) sb.add_city(load_city_data(root, n));
  if (std::filesystem::exists(root / "fares.cfg")) sb.fares = FareModel::load(root / "fares.cfg");
  return sb;
}

void Sandbox::add_city(CityDatabase db) {
  if (has_city(db.city_name)) throw IntegrityError("city '" + db.city_name + "' loaded twice");
  std::set<std::string> ids;
  for (const auto& c : cities_) {
    for (const auto& r : c->intercity_routes) ids.insert(r.id);
  }
  for (const auto& r : db.intercity_routes) {
    if (!ids.insert(r.id).second) throw IntegrityError("duplicate route id '" + r.id + "'");
  }
  city_names_.push_back(db.city_name);
  cities_.push_back(std::make_unique<CityDatabase>(std::move(db)));
}

bool Sandbox::has_city(std::string_view city) const {
  return std::find(city_names_.begin(), city_names_.end(), city) != city_names_.end();
}

const CityDatabase& Sandbox::city(std::string_view name) const {
  for (const auto& c : cities_) {
    if (c->city_name == name) return *c;
  }
  throw NotFoundError("city '" + std::string(name) + "' is not loaded");
}

std::string Sandbox::city_of_station(std::string_view station) const {
  for (const auto& c : cities_) {
    if (std::find(c->stations.begin(), c->stations.end(), station) != c->stations.end()) {
      return c->city_name;
    }
  }
  return "";
}

const IntercityRoute* Sandbox::find_route(std::string_view id) const {
  for (const auto& c : cities_) {
    for (const auto& r : c->intercity_routes) {
      if (r.id == id) return &r;
    }
  }
  return nullptr;
}

std::vector<IntercityRoute> Sandbox::intercity_select(std::string_view from_city,
                                                      std::string_view to_city, RouteKind kind,
                                                      ClockTime earliest_leave) const {
  std::vector<IntercityRoute> out;
  if (!has_city(from_city) || !has_city(to_city)) return out;
  for (const auto& r : city(from_city).intercity_routes) {
    if (r.kind != kind || r.begin < earliest_leave) continue;
    if (city_of_station(r.to) != to_city) continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const IntercityRoute& a, const IntercityRoute& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.id < b.id;
  });
  return out;
}

QuerySession select(const CityDatabase& db, TableKind table, std::string_view key,
                    const CellPredicate& pred) {
  const Table& t = db.table(table);
  std::size_t col = t.column_index(key);
  std::vector<RecordRef> rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (pred(t.cell(r, col))) rows.push_back({&t, r});
  }
  return QuerySession(std::move(rows));
}

CellPredicate equals(std::string value) {
  return [value = std::move(value)](const Cell& c) { return cell_to_string(c) == value; };
}

std::vector<NearbyHit> nearby(const CityDatabase& db, TableKind table, LatLon point, int topk,
                              double dist_km) {
  std::vector<NearbyHit> hits;
  if (topk < 1 || !(dist_km > 0)) return hits;
  const Table& t = db.table(table);
  std::size_t lat = t.column_index("latitude");
  std::size_t lon = t.column_index("longitude");
  for (std::size_t r = 0; r < t.size(); ++r) {
    double d = haversine_km(point, {t.number(r, lat).to_double(), t.number(r, lon).to_double()});
    if (d <= dist_km) hits.push_back({{&t, r}, d});
  }
  std::sort(hits.begin(), hits.end(), [](const NearbyHit& a, const NearbyHit& b) {
    if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
    return a.record.name() < b.record.name();
  });
  if (hits.size() > static_cast<std::size_t>(topk)) hits.resize(static_cast<std::size_t>(topk));
  return hits;
}

bool is_open(const CityDatabase& db, TableKind table, std::string_view name, ClockTime time) {
  const Table& t = db.table(table);
  auto row = t.find(name);
  if (!row) {
    throw NotFoundError("no " + std::string(table_name(table)) + " named '" + std::string(name) +
                        "'");
  }
  auto open = t.find_column("opentime");
  if (!open) return true;
  return t.time(*row, *open) <= time && time <= t.time(*row, *t.find_column("endtime"));
}

Decimal position_distance(const CityDatabase& db, std::string_view a, std::string_view b) {
  LatLon pa = db.coordinates(a);
  LatLon pb = db.coordinates(b);
  if (a == b) return Decimal(0);
  return Decimal::from_double(haversine_km(pa, pb)).rounded(3);
}

namespace {

// ceil(distance / speed * 60) in whole minutes.
int travel_minutes(Decimal distance, Decimal speed_kmh) {
  return static_cast<int>((distance * Decimal(60) / speed_kmh).ceil());
}

TransportLeg make_leg(std::string_view mode, std::string_view from, std::string_view to,
                      ClockTime start, int minutes, Decimal distance, Decimal price) {
  TransportLeg leg;
  leg.mode = std::string(mode);
  leg.start = std::string(from);
  leg.end = std::string(to);
  leg.start_time = start.to_string();
  leg.end_time = (start + minutes).to_string();
  leg.distance = distance;
  leg.price = price;
  return leg;
}

}  // namespace

TransportOption goto_poi(const CityDatabase& db, const FareModel& fares, std::string_view start,
                         std::string_view end, ClockTime start_time, TransportMode mode,
                         int people) {
  Decimal d = position_distance(db, start, end);
  TransportOption opt;
  opt.mode = mode;
  int hc = people < 1 ? 1 : people;
  switch (mode) {
    case TransportMode::walk: {
      int m = travel_minutes(d, fares.walk_speed_kmh);
      auto leg = make_leg("walk", start, end, start_time, m, d, Decimal(0));
      leg.tickets = hc;
      opt.legs.push_back(leg);
      break;
    }
    case TransportMode::taxi: {
      int m = travel_minutes(d, fares.taxi_speed_kmh);
      Decimal price = (fares.taxi_base_fare + fares.taxi_per_km * d).rounded(2);
      auto leg = make_leg("taxi", start, end, start_time, m, d, price);
      int cars = (hc + fares.taxi_capacity - 1) / fares.taxi_capacity;
      leg.cars = cars;
      leg.cost = price * Decimal(cars);
      opt.legs.push_back(leg);
      break;
    }
    case TransportMode::metro: {
      int access = fares.metro_access_minutes;
      Decimal walk_d = (fares.walk_speed_kmh * Decimal(access) / Decimal(60)).rounded(3);
      std::string in_station = std::string(start) + " Metro";
      std::string out_station = std::string(end) + " Metro";
      auto first = make_leg("walk", start, in_station, start_time, access, walk_d, Decimal(0));
      first.tickets = hc;
      ClockTime t = start_time + access;
      int ride = travel_minutes(d, fares.metro_speed_kmh);
      std::int64_t bands = std::max<std::int64_t>(1, (d / fares.metro_band_km).ceil());
      Decimal fare = fares.metro_fare_per_band * Decimal(bands);
      auto mid = make_leg("metro", in_station, out_station, t, ride, d, fare);
      mid.tickets = hc;
      mid.cost = fare * Decimal(hc);
      t = t + ride;
      auto last = make_leg("walk", out_station, end, t, access, walk_d, Decimal(0));
      last.tickets = hc;
      opt.legs = {first, mid, last};
      break;
    }
  }
  for (const auto& leg : opt.legs) {
    opt.distance += leg.distance;
    opt.unit_price += leg.price;
    opt.cost += leg.cost;
    opt.minutes += ClockTime::parse(leg.end_time) - ClockTime::parse(leg.start_time);
  }
  return opt;
}

}  // namespace itin
