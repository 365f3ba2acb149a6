#include "itin/querygen.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include "itin/evaluator.hpp"

namespace itin {

namespace {

constexpr std::array<std::string_view, kSpecKinds> kKindNames = {
    "intercity_type", "innercity_type", "cuisine", "attraction_type", "hotel_feature",
    "poi",            "room_count",     "room_type", "budget"};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

bool has_routes(const Sandbox& sb, const std::string& a, const std::string& b, RouteKind k) {
  return !sb.intercity_select(a, b, k, ClockTime(0)).empty() &&
         !sb.intercity_select(b, a, k, ClockTime(0)).empty();
}

std::vector<std::string> distinct_column(const Table& t, std::string_view col) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  auto c = t.column_index(col);
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string& v = t.text(r, c);
    if (!v.empty() && seen.insert(v).second) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

// Candidate values for one kind; empty when the kind cannot be drawn.
std::vector<ConstraintSpec> vocabulary(SpecKind kind, const Sandbox& sb, const QuerySkeleton& s) {
  const CityDatabase& db = sb.city(s.target_city);
  std::vector<ConstraintSpec> out;
  auto texts = [&](const std::vector<std::string>& vals) {
    for (const auto& v : vals) out.push_back({kind, v, 0});
  };
  switch (kind) {
    case SpecKind::intercity_type:
      for (RouteKind k : {RouteKind::train, RouteKind::airplane}) {
        if (has_routes(sb, s.start_city, s.target_city, k)) {
          out.push_back({kind, std::string(route_kind_name(k)), 0});
        }
      }
      break;
    case SpecKind::innercity_type:
      texts({"metro", "taxi", "walk"});
      break;
    case SpecKind::cuisine:
      texts(distinct_column(db.restaurants, "cuisinetype"));
      break;
    case SpecKind::attraction_type:
      texts(distinct_column(db.attractions, "type"));
      break;
    case SpecKind::poi: {
      std::vector<std::string> names;
      for (std::size_t r = 0; r < db.attractions.size(); ++r) names.push_back(db.attractions.name(r));
      texts(names);
      break;
    }
    case SpecKind::hotel_feature:
      if (s.days >= 2) texts(distinct_column(db.hotels, "featurehoteltype"));
      break;
    case SpecKind::room_count:
    case SpecKind::room_type: {
      if (s.days < 2 || db.hotels.size() == 0) break;
      std::set<std::int64_t> beds;
      auto c = db.hotels.column_index("numbed");
      for (std::size_t r = 0; r < db.hotels.size(); ++r) {
        auto b = static_cast<std::int64_t>(db.hotels.number(r, c).floor());
        if (b > 0) beds.insert(b);
      }
      if (beds.empty()) break;
      if (kind == SpecKind::room_type) {
        for (auto b : beds) out.push_back({kind, "", b});
      } else {
        std::int64_t widest = *beds.rbegin();
        for (std::int64_t n = (s.people + widest - 1) / widest; n <= s.people; ++n) {
          out.push_back({kind, "", n});
        }
      }
      break;
    }
    case SpecKind::budget: {
      std::int64_t pd = static_cast<std::int64_t>(s.people) * s.days;
      for (std::int64_t v = 3 * pd; v <= 15 * pd; ++v) out.push_back({kind, "", v * 100});
      break;
    }
  }
  return out;
}

std::string program_for(const ConstraintSpec& s) {
  std::ostringstream o;
  switch (s.kind) {
    case SpecKind::intercity_type:
      o << "for act in allactivities(plan):\n"
           "    if activity_type(act) in ['train', 'airplane']:\n"
           "        if intercity_transport_type(act) != "
        << quote(s.text) << ":\n            return False\nreturn True\n";
      break;
    case SpecKind::innercity_type:
      o << "for act in allactivities(plan):\n"
           "    if innercity_transport_type(activity_transports(act)) not in ['', "
        << quote(s.text) << "]:\n        return False\nreturn True\n";
      break;
    case SpecKind::cuisine:
      o << "cuisines = set()\n"
           "for act in allactivities(plan):\n"
           "    if activity_type(act) in ['breakfast', 'lunch', 'dinner']:\n"
           "        cuisines = union(cuisines, {restaurant_type(act, target_city(plan))})\n"
           "return "
        << quote(s.text) << " in cuisines\n";
      break;
    case SpecKind::attraction_type:
      o << "kinds = set()\n"
           "for act in allactivities(plan):\n"
           "    if activity_type(act) == 'attraction':\n"
           "        kinds = union(kinds, {attraction_type(act, target_city(plan))})\n"
           "return "
        << quote(s.text) << " in kinds\n";
      break;
    case SpecKind::hotel_feature:
      o << "for act in allactivities(plan):\n"
           "    if activity_type(act) == 'accommodation':\n"
           "        if accommodation_type(act, target_city(plan)) != "
        << quote(s.text) << ":\n            return False\nreturn True\n";
      break;
    case SpecKind::poi:
      o << "visited = False\n"
           "for act in allactivities(plan):\n"
           "    if activity_position(act) == "
        << quote(s.text) << ":\n        visited = True\nreturn visited\n";
      break;
    case SpecKind::room_count:
    case SpecKind::room_type:
      o << "for act in allactivities(plan):\n"
           "    if activity_type(act) == 'accommodation':\n"
           "        if "
        << (s.kind == SpecKind::room_count ? "room_count" : "room_type") << "(act) != " << s.number
        << ":\n            return False\nreturn True\n";
      break;
    case SpecKind::budget:
      o << "total_cost = 0\n"
           "for activity in allactivities(plan):\n"
           "    total_cost += activity_cost(activity) + "
           "innercity_transport_cost(activity_transports(activity))\n"
           "return total_cost <= "
        << s.number << "\n";
      break;
  }
  return o.str();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 finaliser over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view difficulty_name(Difficulty d) { return d == Difficulty::easy ? "easy" : "medium"; }

Difficulty parse_difficulty(std::string_view text) {
  if (text == "easy") return Difficulty::easy;
  if (text == "medium") return Difficulty::medium;
  throw UsageError("unknown difficulty '" + std::string(text) + "' (expected easy or medium)");
}

std::string_view spec_kind_name(SpecKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<SpecKind> parse_spec_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<SpecKind>(i);
  }
  return std::nullopt;
}

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error("empty draw range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

QuerySkeleton sample_skeleton(const Sandbox& sb, Difficulty difficulty, std::mt19937_64& rng,
                              const GenConfig& cfg) {
  if (cfg.min_days < 1 || cfg.max_days < cfg.min_days || cfg.min_people < 1 ||
      cfg.max_people < cfg.min_people) {
    throw ConfigError("generator day/people ranges are invalid");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& a : sb.city_list()) {
    for (const auto& b : sb.city_list()) {
      if (a == b) continue;
      const CityDatabase& t = sb.city(b);
      if (t.hotels.size() == 0 || t.attractions.size() == 0 || t.restaurants.size() == 0) continue;
      if (has_routes(sb, a, b, RouteKind::train) || has_routes(sb, a, b, RouteKind::airplane)) {
        pairs.emplace_back(a, b);
      }
    }
  }
  if (pairs.empty()) throw Error("no city pair with routes both ways and a stocked target city");

  QuerySkeleton s;
  s.difficulty = difficulty;
  const auto& pr = pick(rng, pairs);
  s.start_city = pr.first;
  s.target_city = pr.second;
  s.days = static_cast<int>(draw(rng, cfg.min_days, cfg.max_days));
  s.people = static_cast<int>(draw(rng, cfg.min_people, cfg.max_people));

  std::vector<std::pair<SpecKind, std::vector<ConstraintSpec>>> pool;
  for (int k = 0; k < kSpecKinds; ++k) {
    auto vocab = vocabulary(static_cast<SpecKind>(k), sb, s);
    if (!vocab.empty()) pool.emplace_back(static_cast<SpecKind>(k), std::move(vocab));
  }
  if (pool.empty()) throw Error("every constraint kind has an empty vocabulary");
  std::int64_t want = difficulty == Difficulty::easy ? 1 : draw(rng, 3, 5);
  want = std::min<std::int64_t>(want, static_cast<std::int64_t>(pool.size()));
  // Distinct kinds, uniform without replacement.
  for (std::int64_t i = 0; i < want; ++i) {
    auto at = static_cast<std::size_t>(draw(rng, i, static_cast<std::int64_t>(pool.size()) - 1));
    std::swap(pool[static_cast<std::size_t>(i)], pool[at]);
    s.specs.push_back(pick(rng, pool[static_cast<std::size_t>(i)].second));
  }
  return s;
}

QuerySkeleton sample_skeleton(const Sandbox& sb, Difficulty difficulty, std::uint64_t seed,
                              const GenConfig& cfg) {
  std::mt19937_64 rng(seed);
  return sample_skeleton(sb, difficulty, rng, cfg);
}

std::vector<std::string> skeleton_to_dsl(const QuerySkeleton& skeleton) {
  std::vector<std::string> out;
  for (const auto& s : skeleton.specs) out.push_back(program_for(s));
  return out;
}

std::string describe_skeleton(const QuerySkeleton& s) {
  std::ostringstream o;
  o << (s.people == 1 ? "I am" : "We are " + std::to_string(s.people) + " people")
    << " travelling from " << s.start_city << " to " << s.target_city << " for " << s.days
    << (s.days == 1 ? " day." : " days.");
  for (const auto& c : s.specs) {
    o << ' ';
    switch (c.kind) {
      case SpecKind::intercity_type:
        o << "Go and return by " << c.text << ".";
        break;
      case SpecKind::innercity_type:
        o << "Get around the city only by " << c.text << ".";
        break;
      case SpecKind::cuisine:
        o << "Have at least one " << c.text << " meal.";
        break;
      case SpecKind::attraction_type:
        o << "Visit at least one " << c.text << " attraction.";
        break;
      case SpecKind::hotel_feature:
        o << "Stay in a " << c.text << " hotel.";
        break;
      case SpecKind::poi:
        o << "Make sure to visit " << c.text << ".";
        break;
      case SpecKind::room_count:
        o << "Book " << c.number << (c.number == 1 ? " room." : " rooms.");
        break;
      case SpecKind::room_type:
        o << "Rooms should have " << c.number << (c.number == 1 ? " bed." : " beds.");
        break;
      case SpecKind::budget:
        o << "Keep the total cost within " << c.number << ".";
        break;
    }
  }
  return o.str();
}

Certification certify(const QuerySkeleton& skeleton, const Sandbox& sb, const SearchConfig& cfg) {
  Certification c;
  std::vector<std::string> dsl = skeleton_to_dsl(skeleton);
  std::string text = describe_skeleton(skeleton);
  QueryContext q = QueryContext::make(skeleton.start_city, skeleton.target_city, skeleton.days,
                                      skeleton.people, dsl, text);
  HeuristicRanker ranker;
  c.outcome = dfs_search(q, sb, ranker, cfg);
  if (c.outcome.status == SearchStatus::full_pass) {
    c.query = CertifiedQuery{"", skeleton, std::move(text), std::move(dsl), c.outcome.plan};
  }
  return c;
}

std::vector<CertifiedQuery> generate_batch(const Sandbox& sb, Difficulty difficulty, int count,
                                           std::uint64_t seed, const GenConfig& cfg, int jobs) {
  if (count < 0) throw UsageError("count must be >= 0");
  if (jobs < 1) throw UsageError("jobs must be >= 1");
  std::vector<std::optional<CertifiedQuery>> slots(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
      for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        QuerySkeleton s = sample_skeleton(sb, difficulty, rng, cfg);
        Certification c = certify(s, sb, cfg.search);
        if (c.query) {
          slots[static_cast<std::size_t>(k)] = std::move(c.query);
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(jobs, std::max(count, 1)); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<CertifiedQuery> out;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k]) continue;
    slots[k]->id = std::string(difficulty_name(difficulty)) + "-" + std::to_string(k);
    out.push_back(std::move(*slots[k]));
  }
  return out;
}

json spec_to_json(const ConstraintSpec& s) {
  json j = {{"kind", std::string(spec_kind_name(s.kind))}};
  if (s.kind == SpecKind::room_count || s.kind == SpecKind::room_type ||
      s.kind == SpecKind::budget) {
    j["value"] = s.number;
  } else {
    j["value"] = s.text;
  }
  return j;
}

json skeleton_to_json(const QuerySkeleton& s) {
  json specs = json::array();
  for (const auto& c : s.specs) specs.push_back(spec_to_json(c));
  return {{"start_city", s.start_city}, {"target_city", s.target_city},
          {"days", s.days},             {"people", s.people},
          {"difficulty", std::string(difficulty_name(s.difficulty))},
          {"specs", specs}};
}

namespace {

template <typename T>
T member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(where + ": '" + key + "' has the wrong type");
  }
}

}  // namespace

QuerySkeleton skeleton_from_json(const json& j) {
  QuerySkeleton s;
  s.start_city = member<std::string>(j, "start_city", "skeleton");
  s.target_city = member<std::string>(j, "target_city", "skeleton");
  s.days = member<int>(j, "days", "skeleton");
  s.people = member<int>(j, "people", "skeleton");
  try {
    s.difficulty = parse_difficulty(member<std::string>(j, "difficulty", "skeleton"));
  } catch (const UsageError& e) {
    throw SchemaError(std::string("skeleton: ") + e.what());
  }
  for (const auto& sj : member<json>(j, "specs", "skeleton")) {
    ConstraintSpec c;
    auto kind = parse_spec_kind(member<std::string>(sj, "kind", "spec"));
    if (!kind) throw SchemaError("spec: unknown kind");
    c.kind = *kind;
    if (!sj.contains("value")) throw SchemaError("spec: missing 'value'");
    if (sj["value"].is_number_integer()) c.number = sj["value"].get<std::int64_t>();
    else if (sj["value"].is_string()) c.text = sj["value"].get<std::string>();
    else throw SchemaError("spec: 'value' has the wrong type");
    s.specs.push_back(std::move(c));
  }
  return s;
}

json certified_to_json(const CertifiedQuery& q) {
  return {{"id", q.id},
          {"skeleton", skeleton_to_json(q.skeleton)},
          {"text", q.text},
          {"dsl", q.dsl},
          {"witness", plan_to_json(q.witness)}};
}

CertifiedQuery certified_from_json(const json& j) {
  CertifiedQuery q;
  q.id = member<std::string>(j, "id", "query");
  q.skeleton = skeleton_from_json(member<json>(j, "skeleton", "query " + q.id));
  q.text = member<std::string>(j, "text", "query " + q.id);
  q.dsl = member<std::vector<std::string>>(j, "dsl", "query " + q.id);
  q.witness = plan_from_json(member<json>(j, "witness", "query " + q.id));
  return q;
}

}  // namespace itin
