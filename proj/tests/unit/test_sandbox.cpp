#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "support.hpp"

using namespace itin;
using namespace testing_support;

namespace {

double oracle_haversine(LatLon a, LatLon b) {
  const double r = 3.14159265358979323846 / 180.0;
  double x = std::sin((b.lat - a.lat) * r / 2);
  double y = std::sin((b.lon - a.lon) * r / 2);
  double h = x * x + std::cos(a.lat * r) * std::cos(b.lat * r) * y * y;
  return 2 * 6371.0 * std::asin(std::sqrt(h));
}

const CityDatabase& alpha() { return basic_sandbox().city("Alpha"); }

std::filesystem::path scratch_city(const std::string& tag) {
  auto root = std::filesystem::temp_directory_path() / ("itin_sb_" + tag);
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root / "Zed");
  for (const char* f : {"attractions.csv", "restaurants.csv", "hotels.csv", "poi.csv", "intercity.csv"}) {
    std::filesystem::copy_file(data_dir("basic") / "Gamma" / f, root / "Zed" / f);
  }
  return root;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(SandboxLoad, FixtureCounts) {
  EXPECT_EQ(alpha().attractions.size(), 3u);
  EXPECT_EQ(alpha().restaurants.size(), 25u);
  EXPECT_EQ(basic_sandbox().city_list(), (std::vector<std::string>{"Alpha", "Beta", "Gamma"}));
  EXPECT_EQ(alpha().stations, (std::vector<std::string>{"Alpha Station", "Alpha Airport"}));
  EXPECT_EQ(basic_sandbox().city_of_station("Beta Airport"), "Beta");
  EXPECT_EQ(basic_sandbox().city_of_station("Lakeview Tower"), "");
  EXPECT_THROW(basic_sandbox().city("Nowhere"), NotFoundError);
}

TEST(SandboxLoad, MissingFileNamesTable) {
  auto root = scratch_city("missing");
  std::filesystem::remove(root / "Zed" / "hotels.csv");
  try {
    load_city_data(root, "Zed");
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("hotels"), std::string::npos);
  }
}

TEST(SandboxLoad, DuplicateNameIsIntegrityError) {
  auto root = scratch_city("dup");
  write(root / "Zed" / "attractions.csv",
        "Name,Type,Latitude,Longitude,Opentime,Endtime,Price,RecommendMinTime,RecommendMaxTime\n"
        "Twin,Park,1,1,08:00,09:00,0,1,2\nTwin,Park,1,1,08:00,09:00,0,1,2\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
}

TEST(SandboxLoad, OvernightHoursRejected) {
  auto root = scratch_city("night");
  write(root / "Zed" / "attractions.csv",
        "name,type,latitude,longitude,opentime,endtime,price,recommendmintime,recommendmaxtime\n"
        "Owl Bar,Bar,1,1,20:00,02:00,0,1,2\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
}

TEST(SandboxLoad, IntercityValidation) {
  auto root = scratch_city("routes");
  const std::string head = "kind,id,traintype,from,to,begintime,endtime,duration,cost\n";
  write(root / "Zed" / "intercity.csv", head + "airplane,G1,,Gamma Station,X,07:00,08:00,60,80\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
  write(root / "Zed" / "intercity.csv", head + "train,G1,G,Gamma Station,X,07:00,08:00,61,80\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
  write(root / "Zed" / "intercity.csv", head + "train,G1,G,Gamma Station,X,07:00,08:00,60,0\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
  write(root / "Zed" / "intercity.csv", head + "train,G1,G,Gamma Station,X,08:00,07:00,-60,10\n");
  EXPECT_THROW(load_city_data(root, "Zed"), IntegrityError);
  write(root / "Zed" / "intercity.csv", head + "train,G1,G,Gamma Station,X,07:00,08:00,60,10\n");
  EXPECT_EQ(load_city_data(root, "Zed").intercity_routes.size(), 1u);
}

TEST(SandboxSelect, ByName) {
  auto s = select(alpha(), TableKind::attractions, "name", equals("Lakeview Tower"));
  ASSERT_EQ(s.last_result().size(), 1u);
  EXPECT_EQ(s.last_result()[0].name(), "Lakeview Tower");
}

TEST(SandboxSelect, PaginationOverHotpot) {
  auto s = select(alpha(), TableKind::restaurants, "cuisine", equals("Hotpot"));
  EXPECT_EQ(s.last_result().size(), 23u);
  EXPECT_EQ(s.next_page().size(), 10u);
  EXPECT_EQ(s.next_page().size(), 10u);
  EXPECT_EQ(s.next_page().size(), 3u);
  EXPECT_EQ(s.next_page().size(), 0u);
  EXPECT_EQ(s.cursor(), 3u);
}

TEST(SandboxSelect, ExactMultipleOfPage) {
  auto all = select(alpha(), TableKind::restaurants, "cuisinetype", equals("Hotpot")).last_result();
  QuerySession s(std::vector<RecordRef>(all.begin(), all.begin() + 10));
  EXPECT_EQ(s.next_page().size(), 10u);
  EXPECT_EQ(s.next_page().size(), 0u);
}

TEST(SandboxSelect, Errors) {
  try {
    select(alpha(), TableKind::attractions, "bus", equals("x"));
    FAIL();
  } catch (const KeyError& e) {
    EXPECT_NE(std::string(e.what()).find("opentime"), std::string::npos);
  }
  QuerySession none;
  EXPECT_THROW(none.next_page(), StateError);
}

TEST(SandboxSelect, NumericPredicate) {
  auto s = select(alpha(), TableKind::restaurants, "price",
                  [](const Cell& c) { return std::get<Decimal>(c) < Decimal(62); });
  // Hotpot House 1 (61) and Noodle Bar (25), Dumpling Den (40)
  EXPECT_EQ(s.last_result().size(), 3u);
}

TEST(SandboxSelect, NameLookupIsExactForEveryRecord) {
  for (const auto& city : basic_sandbox().city_list()) {
    const auto& db = basic_sandbox().city(city);
    for (TableKind k : {TableKind::attractions, TableKind::restaurants, TableKind::hotels}) {
      const Table& t = db.table(k);
      for (std::size_t r = 0; r < t.size(); ++r) {
        auto s = select(db, k, "name", equals(t.name(r)));
        ASSERT_EQ(s.last_result().size(), 1u);
        EXPECT_EQ(s.last_result()[0].row, r);
      }
    }
  }
}

TEST(SandboxSelect, PagesConcatenateToResult) {
  auto s = select(alpha(), TableKind::restaurants, "opentime", [](const Cell&) { return true; });
  auto all = s.last_result();
  std::vector<RecordRef> joined;
  for (;;) {
    auto page = s.next_page();
    if (page.empty()) break;
    EXPECT_LE(page.size(), QuerySession::kPageSize);
    joined.insert(joined.end(), page.begin(), page.end());
  }
  EXPECT_EQ(joined, all);
}

TEST(SandboxNearby, EmptyAndIdentity) {
  LatLon tower = alpha().coordinates("Lakeview Tower");
  EXPECT_TRUE(nearby(alpha(), TableKind::attractions, {tower.lat + 1, tower.lon}, 5, 1.0).empty());
  auto hit = nearby(alpha(), TableKind::attractions, tower, 1, 1.0);
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].record.name(), "Lakeview Tower");
  EXPECT_EQ(hit[0].distance_km, 0.0);
}

TEST(SandboxNearby, MatchesBruteForceHaversine) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(29.99, 30.03), lon(119.99, 120.02), dist(0.2, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    LatLon p{lat(rng), lon(rng)};
    double d = dist(rng);
    int k = 1 + trial % 4;
    for (TableKind kind : {TableKind::attractions, TableKind::restaurants}) {
      const Table& t = alpha().table(kind);
      std::vector<std::pair<double, std::string>> want;
      for (std::size_t r = 0; r < t.size(); ++r) {
        double km = oracle_haversine(p, alpha().coordinates(t.name(r)));
        if (km <= d) want.emplace_back(km, t.name(r));
      }
      std::sort(want.begin(), want.end());
      if (want.size() > static_cast<std::size_t>(k)) want.resize(static_cast<std::size_t>(k));
      auto got = nearby(alpha(), kind, p, k, d);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].record.name(), want[i].second);
        EXPECT_NEAR(got[i].distance_km, want[i].first, 1e-9);
        if (i) EXPECT_LE(got[i - 1].distance_km, got[i].distance_km);
      }
    }
  }
}

TEST(SandboxOpen, InclusiveBounds) {
  auto t = [](const char* s) { return ClockTime::parse(s); };
  EXPECT_TRUE(is_open(alpha(), TableKind::attractions, "Lakeview Tower", t("09:00")));
  EXPECT_TRUE(is_open(alpha(), TableKind::attractions, "Lakeview Tower", t("17:00")));
  EXPECT_TRUE(is_open(alpha(), TableKind::attractions, "Lakeview Tower", t("08:00")));
  EXPECT_FALSE(is_open(alpha(), TableKind::attractions, "Lakeview Tower", t("07:59")));
  EXPECT_FALSE(is_open(alpha(), TableKind::attractions, "Lakeview Tower", t("17:01")));
  EXPECT_TRUE(is_open(alpha(), TableKind::hotels, "Alpha Grand", t("03:00")));
  EXPECT_THROW(is_open(alpha(), TableKind::attractions, "Nope", t("09:00")), NotFoundError);
}

TEST(SandboxGoto, IdentityIsFree) {
  auto o = goto_poi(alpha(), basic_sandbox().fares, "Pine Park", "Pine Park", ClockTime::hm(9, 0),
                    TransportMode::walk);
  ASSERT_EQ(o.legs.size(), 1u);
  EXPECT_EQ(o.distance, Decimal(0));
  EXPECT_EQ(o.minutes, 0);
  EXPECT_EQ(o.unit_price, Decimal(0));
}

TEST(SandboxGoto, WalkTwoKilometres) {
  double km = oracle_haversine(alpha().coordinates("Lakeview Tower"), alpha().coordinates("Pine Park"));
  EXPECT_NEAR(km, 2.0, 5e-4);
  auto o = goto_poi(alpha(), basic_sandbox().fares, "Lakeview Tower", "Pine Park",
                    ClockTime::hm(9, 0), TransportMode::walk);
  EXPECT_EQ(o.distance, Decimal(2));
  EXPECT_EQ(o.minutes, 24);  // 2 km at 5 km/h
  EXPECT_EQ(o.legs[0].start_time, "09:00");
  EXPECT_EQ(o.legs[0].end_time, "09:24");
}

TEST(SandboxGoto, MetroHasThreeChainedLegs) {
  auto o = goto_poi(alpha(), basic_sandbox().fares, "Lakeview Tower", "Pine Park",
                    ClockTime::hm(9, 0), TransportMode::metro, 3);
  ASSERT_EQ(o.legs.size(), 3u);
  EXPECT_EQ(o.legs[0].mode, "walk");
  EXPECT_EQ(o.legs[1].mode, "metro");
  EXPECT_EQ(o.legs[2].mode, "walk");
  EXPECT_EQ(o.legs[0].start_time, "09:00");
  for (std::size_t i = 0; i + 1 < o.legs.size(); ++i) {
    EXPECT_EQ(o.legs[i].end_time, o.legs[i + 1].start_time);
    EXPECT_EQ(o.legs[i].end, o.legs[i + 1].start);
  }
  EXPECT_EQ(o.legs[1].price, Decimal(3));  // one 6 km band
  EXPECT_EQ(o.legs[1].cost, Decimal(9));
  EXPECT_EQ(o.minutes, 2 + 4 + 2);  // 2 km at 30 km/h
}

TEST(SandboxGoto, TaxiCarsAndFare) {
  auto o = goto_poi(alpha(), basic_sandbox().fares, "Lakeview Tower", "Pine Park",
                    ClockTime::hm(9, 0), TransportMode::taxi, 5);
  ASSERT_EQ(o.legs.size(), 1u);
  EXPECT_EQ(o.legs[0].cars, 2);
  EXPECT_EQ(o.legs[0].price, Decimal(15));  // 10 + 2.5 * 2
  EXPECT_EQ(o.legs[0].cost, Decimal(30));
  EXPECT_EQ(o.minutes, 3);
  EXPECT_THROW(goto_poi(alpha(), basic_sandbox().fares, "Lakeview Tower", "Atlantis",
                        ClockTime::hm(9, 0), TransportMode::taxi),
               NotFoundError);
}

TEST(SandboxGoto, Deterministic) {
  for (auto m : {TransportMode::walk, TransportMode::metro, TransportMode::taxi}) {
    auto a = goto_poi(alpha(), basic_sandbox().fares, "City Museum", "Noodle Bar", ClockTime::hm(13, 7), m, 4);
    auto b = goto_poi(alpha(), basic_sandbox().fares, "City Museum", "Noodle Bar", ClockTime::hm(13, 7), m, 4);
    EXPECT_EQ(a.legs, b.legs);
  }
}

TEST(SandboxIntercity, SelectByEarliestDeparture) {
  const auto& sb = basic_sandbox();
  auto r = sb.intercity_select("Alpha", "Beta", RouteKind::train, ClockTime::hm(10, 0));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].id, "G103");
  EXPECT_EQ(r[1].id, "G105");
  EXPECT_TRUE(sb.intercity_select("Alpha", "Beta", RouteKind::train, ClockTime::hm(23, 59)).empty());
  auto f = sb.intercity_select("Alpha", "Beta", RouteKind::airplane, ClockTime::hm(0, 0));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].duration, 90);
}

TEST(FareConfig, ParseAndReject) {
  FareModel f = FareModel::parse("# pinned\nwalk_speed_kmh = 4\ntaxi_capacity = 6\n");
  EXPECT_EQ(f.walk_speed_kmh, Decimal(4));
  EXPECT_EQ(f.taxi_capacity, 6);
  EXPECT_THROW(FareModel::parse("warp_speed = 9\n"), ConfigError);
  EXPECT_THROW(FareModel::parse("walk_speed_kmh = fast\n"), ConfigError);
  EXPECT_THROW(FareModel::parse("walk_speed_kmh\n"), ConfigError);
}

TEST(Decimal, ArithmeticAndRounding) {
  EXPECT_EQ(Decimal::parse("2.5") * Decimal(3), Decimal::parse("7.5"));
  EXPECT_EQ((Decimal(2) / Decimal(3)).to_string(), "0.666667");
  EXPECT_EQ((Decimal(-2) / Decimal(3)).to_string(), "-0.666667");
  EXPECT_EQ(Decimal::parse("0.0005").rounded(3), Decimal::parse("0.001"));
  EXPECT_EQ(Decimal::parse("-0.0005").rounded(3), Decimal::parse("-0.001"));
  EXPECT_EQ(Decimal::parse("12.340").to_string(), "12.34");
  EXPECT_THROW(Decimal(1) / Decimal(0), std::domain_error);
  EXPECT_THROW(Decimal::parse("1.2.3"), std::invalid_argument);
}

TEST(ClockTime, ParseAndFormat) {
  EXPECT_EQ(ClockTime::parse("9:05").minutes(), 545);
  EXPECT_EQ(ClockTime::parse("24:00").minutes(), 1440);
  EXPECT_FALSE(ClockTime::try_parse("24:01"));
  EXPECT_FALSE(ClockTime::try_parse("12:60"));
  EXPECT_FALSE(ClockTime::try_parse("noon"));
  EXPECT_EQ(ClockTime::hm(7, 3).to_string(), "07:03");
}
