#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "itin/json.hpp"
#include "itin/plan.hpp"
#include "itin/planner.hpp"
#include "itin/sandbox.hpp"

namespace itin {

enum class Difficulty { easy, medium };
std::string_view difficulty_name(Difficulty d);
/// Throws UsageError on anything but "easy" / "medium".
Difficulty parse_difficulty(std::string_view text);

enum class SpecKind {
  intercity_type,
  innercity_type,
  cuisine,
  attraction_type,
  hotel_feature,
  poi,
  room_count,
  room_type,
  budget,
};
constexpr int kSpecKinds = 9;
std::string_view spec_kind_name(SpecKind k);
std::optional<SpecKind> parse_spec_kind(std::string_view text);

struct ConstraintSpec {
  SpecKind kind = SpecKind::cuisine;
  std::string text;    // type, feature, name or mode
  std::int64_t number = 0;  // rooms, beds or budget

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

struct QuerySkeleton {
  std::string start_city;
  std::string target_city;
  int days = 1;
  int people = 1;
  Difficulty difficulty = Difficulty::easy;
  std::vector<ConstraintSpec> specs;

  friend bool operator==(const QuerySkeleton&, const QuerySkeleton&) = default;
};

struct GenConfig {
  int min_days = 1;
  int max_days = 3;
  int min_people = 1;
  int max_people = 4;
  int max_attempts = 40;  // skeletons tried per requested query
  /// Certification search. A node cap instead of a wall-clock budget keeps
  /// accept/reject independent of machine speed.
  SearchConfig search = [] {
    SearchConfig c;
    c.budget_secs = 1e9;
    c.max_nodes = 50000;
    return c;
  }();
};

/// Uniform integer in [lo, hi] by rejection on the raw engine output, so
/// draws do not depend on the standard library's distributions.
std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);

/// Throws Error when fewer than two cities have routes both ways or when
/// every constraint kind has an empty vocabulary.
QuerySkeleton sample_skeleton(const Sandbox& sb, Difficulty difficulty, std::mt19937_64& rng,
                              const GenConfig& cfg = {});
QuerySkeleton sample_skeleton(const Sandbox& sb, Difficulty difficulty, std::uint64_t seed,
                              const GenConfig& cfg = {});

/// One DSL program per spec.
std::vector<std::string> skeleton_to_dsl(const QuerySkeleton& skeleton);
/// Plain-English request used as the natural-language query.
std::string describe_skeleton(const QuerySkeleton& skeleton);

struct CertifiedQuery {
  std::string id;
  QuerySkeleton skeleton;
  std::string text;
  std::vector<std::string> dsl;
  Plan witness;
};

struct Certification {
  std::optional<CertifiedQuery> query;
  SearchOutcome outcome;
};

/// Accepts iff the heuristic search reaches full_pass.
Certification certify(const QuerySkeleton& skeleton, const Sandbox& sb, const SearchConfig& cfg);

/// `count` queries; query k retries with fresh skeletons drawn from a
/// generator seeded by (seed, k) until one certifies or attempts run out.
/// Output order is k order regardless of `jobs`.
std::vector<CertifiedQuery> generate_batch(const Sandbox& sb, Difficulty difficulty, int count,
                                           std::uint64_t seed, const GenConfig& cfg = {},
                                           int jobs = 1);

json spec_to_json(const ConstraintSpec& s);
json skeleton_to_json(const QuerySkeleton& s);
QuerySkeleton skeleton_from_json(const json& j);
json certified_to_json(const CertifiedQuery& q);
/// Throws SchemaError on missing or ill-typed members.
CertifiedQuery certified_from_json(const json& j);

}  // namespace itin
