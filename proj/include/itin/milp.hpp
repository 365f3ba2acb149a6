#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itin/common.hpp"
#include "itin/json.hpp"
#include "itin/plan.hpp"
#include "itin/sandbox.hpp"

namespace itin {

struct MilpParams {
  int hotelNum = 2;
  int attrNum = 10;
  int restNum = 5;
  int transNum = 3;
  int stationNum = 5;
  int goNum = 100;
  int backNum = 100;
  int timeStep = 24;
  int days = 1;

  int locNum() const { return hotelNum + attrNum + restNum; }
  int totalNum() const { return locNum() + stationNum; }
  int steps_per_day() const { return timeStep / days; }
  int slot_minutes() const { return 1440 / steps_per_day(); }
  /// Throws UsageError on negative counts, timeStep not a multiple of days,
  /// or slots that do not divide a day into whole minutes.
  void validate() const;
  /// `key=value` pairs separated by commas or newlines.
  static MilpParams parse(std::string_view text, MilpParams base);
  static MilpParams parse(std::string_view text) { return parse(text, MilpParams{}); }
};

enum class MilpCategory { spatio, hotel, attr, rest, meal, urban, intercity };
constexpr std::size_t kMilpCategories = 7;
std::string_view category_name(MilpCategory c);

struct CategoryCount {
  std::int64_t variables = 0;
  std::int64_t constraints = 0;
};

struct SizeReport {
  std::array<CategoryCount, kMilpCategories> by_category{};
  std::int64_t y_variables = 0;
  std::int64_t total_variables = 0;
  std::int64_t total_constraints = 0;
  /// Row totals of the coarser published estimates, for comparison.
  std::array<std::int64_t, kMilpCategories> estimate{};
  std::int64_t estimate_total = 0;
};

/// Closed-form sizes of the model `build_model` emits.
SizeReport count_sizes(const MilpParams& p);
json size_report_to_json(const SizeReport& r);

enum class VarKind { binary, integer };

struct MilpVar {
  std::string name;
  VarKind kind = VarKind::binary;
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  MilpCategory category = MilpCategory::spatio;
};

struct MilpTerm {
  int var = 0;
  std::int64_t coef = 0;
};

enum class Sense { le, ge, eq };

struct MilpRow {
  std::string name;
  MilpCategory category = MilpCategory::spatio;
  std::vector<MilpTerm> terms;
  Sense sense = Sense::le;
  std::int64_t rhs = 0;
};

/// POIs and routes the model is built over, in index order.
struct MilpSlice {
  std::string city;
  std::vector<std::string> hotels;
  std::vector<std::string> attractions;
  std::vector<std::string> restaurants;
  std::vector<std::string> stations;
  std::vector<IntercityRoute> go;    // arriving in `city`
  std::vector<IntercityRoute> back;  // leaving `city`
};

/// First hotels/attractions/... of the city up to the params' counts, with
/// the counts clipped to what exists. Returns the clipped params too.
std::pair<MilpSlice, MilpParams> select_slice(const Sandbox& sb, const std::string& origin,
                                              const std::string& city, MilpParams wanted);

struct MilpModel {
  MilpParams params;
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  std::vector<std::pair<int, Decimal>> objective;
  int min_attr = 0;

  // Index helpers; locations are hotels, attractions, restaurants, stations,
  // then the transport modes.
  int u(int idx, int t) const;
  int event(int t) const;
  int y(int i, int j, int tr, int t) const;
  int hotel(int h, int d) const;
  int attr(int a) const;
  int rest(int r, int meal) const;  // meal = day * 3 + {0,1,2}
  int go(int i) const;
  int back(int i) const;

  int first_u = 0, first_event = 0, first_y = 0, first_hotel = 0, first_attr = 0, first_rest = 0,
      first_go = 0, first_back = 0;
  std::int64_t count_rows(MilpCategory c) const;
};

/// Throws Error when the slice does not match the params.
MilpModel build_model(const MilpSlice& slice, const MilpParams& params, const Sandbox& sb,
                      int people = 1);

/// CPLEX-LP text; byte-stable.
std::string emit_lp(const MilpModel& model);
/// Writes emit_lp output; throws Error when the path is unwritable.
void write_lp(const MilpModel& model, const std::filesystem::path& path);

struct MilpSolution {
  bool feasible = false;
  std::vector<std::int64_t> values;
  std::uint64_t nodes = 0;
};

/// Exhaustive search with bound propagation. Refuses models above
/// `max_vars` variables with UsageError.
MilpSolution micro_solve(const MilpModel& model, int max_vars = 2000,
                         std::uint64_t max_nodes = 5'000'000);

/// True when `values` satisfies every row and variable bound; fills `failed`
/// with the first failing row name otherwise.
bool check_assignment(const MilpModel& model, const std::vector<std::int64_t>& values,
                      std::string* failed = nullptr);

/// Plan view of a solution: intercity legs, visits at their slots.
Plan decode_solution(const MilpModel& model, const MilpSlice& slice,
                     const std::vector<std::int64_t>& values, const Sandbox& sb,
                     const std::string& origin, int people);

}  // namespace itin
