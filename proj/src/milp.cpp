#include "itin/milp.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace itin {

namespace {

constexpr std::array<TransportMode, 3> kModes = {TransportMode::walk, TransportMode::metro,
                                                 TransportMode::taxi};

// Meal windows in minutes of the day, [open, close).
constexpr std::array<std::array<int, 2>, 3> kMealWindows = {{{6 * 60, 9 * 60},
                                                             {11 * 60, 14 * 60},
                                                             {17 * 60, 20 * 60}}};

std::int64_t sq(std::int64_t v) { return v * v; }

}  // namespace

void MilpParams::validate() const {
  auto nonneg = [](int v, const char* name) {
    if (v < 0) throw UsageError(std::string(name) + " must be >= 0");
  };
  nonneg(hotelNum, "hotelNum");
  nonneg(attrNum, "attrNum");
  nonneg(restNum, "restNum");
  nonneg(transNum, "transNum");
  nonneg(stationNum, "stationNum");
  nonneg(goNum, "goNum");
  nonneg(backNum, "backNum");
  if (days < 1) throw UsageError("days must be >= 1");
  if (timeStep < 1) throw UsageError("timeStep must be >= 1");
  if (timeStep % days != 0) throw UsageError("timeStep must be a multiple of days");
  if (1440 % steps_per_day() != 0) {
    throw UsageError("timeStep per day must divide 1440 minutes");
  }
}

MilpParams MilpParams::parse(std::string_view text, MilpParams base) {
  std::string flat(text);
  std::replace(flat.begin(), flat.end(), ',', '\n');
  for (const auto& [key, value] : parse_key_values(flat, "milp params")) {
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw UsageError("milp params: '" + key + "' needs an integer, got '" + value + "'");
    }
    if (key == "hotelNum") base.hotelNum = v;
    else if (key == "attrNum") base.attrNum = v;
    else if (key == "restNum") base.restNum = v;
    else if (key == "transNum") base.transNum = v;
    else if (key == "stationNum") base.stationNum = v;
    else if (key == "goNum") base.goNum = v;
    else if (key == "backNum") base.backNum = v;
    else if (key == "timeStep") base.timeStep = v;
    else if (key == "days") base.days = v;
    else throw UsageError("milp params: unknown key '" + key + "'");
  }
  base.validate();
  return base;
}

std::string_view category_name(MilpCategory c) {
  switch (c) {
    case MilpCategory::spatio: return "spatio";
    case MilpCategory::hotel: return "hotel";
    case MilpCategory::attr: return "attr";
    case MilpCategory::rest: return "rest";
    case MilpCategory::meal: return "meal";
    case MilpCategory::urban: return "urban";
    case MilpCategory::intercity: return "intercity";
  }
  return "?";
}

SizeReport count_sizes(const MilpParams& p) {
  p.validate();
  const std::int64_t T = p.timeStep, D = p.days, tot = p.totalNum(), tr = p.transNum;
  const std::int64_t N = tot + tr, h = p.hotelNum, a = p.attrNum, r = p.restNum;
  const std::int64_t go = p.goNum, back = p.backNum;
  SizeReport rep;
  auto& c = rep.by_category;
  auto at = [&](MilpCategory k) -> CategoryCount& { return c[static_cast<std::size_t>(k)]; };

  at(MilpCategory::spatio).variables = N * T + N * (T - 1) + T;
  at(MilpCategory::spatio).constraints = 6 * N * (T - 1) + 2 * (T - 1) + T + tr * T;
  at(MilpCategory::hotel).variables = h * D + h * T;
  at(MilpCategory::hotel).constraints = h * (3 * T + D) + D;
  at(MilpCategory::attr).variables = a + a * T;
  at(MilpCategory::attr).constraints = 4 * a * T + a + 1;
  at(MilpCategory::rest).variables = r * 3 * D + r * T;
  at(MilpCategory::rest).constraints = r * (4 * T + 3 * D) + 3 * D;
  at(MilpCategory::meal).variables = 3 * D;
  at(MilpCategory::meal).constraints = 6 * D;
  rep.y_variables = sq(tot) * tr * T;
  at(MilpCategory::urban).variables = rep.y_variables;
  at(MilpCategory::urban).constraints = 7 * sq(tot) * tr * T + 4 * tot * T;
  at(MilpCategory::intercity).variables = go + back;
  at(MilpCategory::intercity).constraints = (go + back) * T + 2;

  auto& e = rep.estimate;
  e[0] = N * (4 * T + 3);
  e[1] = h * (3 * T + 1);
  e[2] = 4 * a * T;
  e[3] = r * (4 * T + 1);
  e[4] = 6 * D;
  e[5] = 7 * sq(tot) * tr * T + 4 * tot * T;
  e[6] = (go + back) * T;
  for (std::size_t k = 0; k < kMilpCategories; ++k) {
    rep.total_variables += c[k].variables;
    rep.total_constraints += c[k].constraints;
    rep.estimate_total += e[k];
  }
  return rep;
}

json size_report_to_json(const SizeReport& r) {
  json cats = json::object();
  for (std::size_t k = 0; k < kMilpCategories; ++k) {
    cats[std::string(category_name(static_cast<MilpCategory>(k)))] = {
        {"variables", r.by_category[k].variables},
        {"constraints", r.by_category[k].constraints},
        {"estimate_constraints", r.estimate[k]}};
  }
  return {{"categories", cats},
          {"y_variables", r.y_variables},
          {"total_variables", r.total_variables},
          {"total_constraints", r.total_constraints},
          {"estimate_total_constraints", r.estimate_total}};
}

// ---------------------------------------------------------------------------
// Model

int MilpModel::u(int idx, int t) const { return first_u + idx * params.timeStep + t; }
int MilpModel::event(int t) const { return first_event + t; }
int MilpModel::y(int i, int j, int tr, int t) const {
  const int tot = params.totalNum();
  return first_y + ((i * tot + j) * params.transNum + tr) * params.timeStep + t;
}
int MilpModel::hotel(int h, int d) const { return first_hotel + h * params.days + d; }
int MilpModel::attr(int a) const { return first_attr + a; }
int MilpModel::rest(int r, int meal) const { return first_rest + r * 3 * params.days + meal; }
int MilpModel::go(int i) const { return first_go + i; }
int MilpModel::back(int i) const { return first_back + i; }

std::int64_t MilpModel::count_rows(MilpCategory c) const {
  return std::count_if(rows.begin(), rows.end(),
                       [c](const MilpRow& r) { return r.category == c; });
}

std::pair<MilpSlice, MilpParams> select_slice(const Sandbox& sb, const std::string& origin,
                                              const std::string& city, MilpParams wanted) {
  const CityDatabase& db = sb.city(city);
  MilpSlice s;
  s.city = city;
  auto take = [](const Table& t, int n, std::vector<std::string>& out) {
    for (std::size_t r = 0; r < t.size() && static_cast<int>(out.size()) < n; ++r) {
      out.push_back(t.name(r));
    }
    return static_cast<int>(out.size());
  };
  wanted.hotelNum = take(db.hotels, wanted.hotelNum, s.hotels);
  wanted.attrNum = take(db.attractions, wanted.attrNum, s.attractions);
  wanted.restNum = take(db.restaurants, wanted.restNum, s.restaurants);
  for (const auto& st : db.stations) {
    if (static_cast<int>(s.stations.size()) >= wanted.stationNum) break;
    s.stations.push_back(st);
  }
  wanted.stationNum = static_cast<int>(s.stations.size());
  auto in_slice = [&](const std::string& st) {
    return std::find(s.stations.begin(), s.stations.end(), st) != s.stations.end();
  };
  if (sb.has_city(origin)) {
    for (RouteKind kind : {RouteKind::train, RouteKind::airplane}) {
      for (auto& r : sb.intercity_select(origin, city, kind, ClockTime(0))) {
        if (static_cast<int>(s.go.size()) < wanted.goNum && in_slice(r.to)) s.go.push_back(r);
      }
      for (auto& r : sb.intercity_select(city, origin, kind, ClockTime(0))) {
        if (static_cast<int>(s.back.size()) < wanted.backNum && in_slice(r.from)) {
          s.back.push_back(r);
        }
      }
    }
  }
  wanted.goNum = static_cast<int>(s.go.size());
  wanted.backNum = static_cast<int>(s.back.size());
  wanted.transNum = std::min(wanted.transNum, static_cast<int>(kModes.size()));
  return {std::move(s), wanted};
}

namespace {

class Builder {
 public:
  Builder(MilpModel& m, const MilpSlice& slice, const Sandbox& sb, int people)
      : m_(m), p_(m.params), slice_(slice), db_(sb.city(slice.city)), fares_(sb.fares),
        people_(people) {}

  void run() {
    declare();
    spatio();
    hotel();
    attr();
    rest();
    meal();
    urban();
    intercity();
    objective();
  }

 private:
  int add_var(std::string name, MilpCategory cat, VarKind kind = VarKind::binary,
              std::int64_t hi = 1) {
    m_.vars.push_back({std::move(name), kind, 0, hi, cat});
    return static_cast<int>(m_.vars.size()) - 1;
  }

  void add_row(MilpCategory cat, std::vector<MilpTerm> terms, Sense sense, std::int64_t rhs) {
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const MilpTerm& t) { return t.coef == 0; }),
                terms.end());
    auto& n = counters_[static_cast<std::size_t>(cat)];
    m_.rows.push_back({std::string(category_name(cat)) + "_" + std::to_string(n++), cat,
                       std::move(terms), sense, rhs});
  }

  static std::string sfx(std::initializer_list<int> ids) {
    std::string s;
    for (int v : ids) s += "_" + std::to_string(v);
    return s;
  }

  int T() const { return p_.timeStep; }
  int tot() const { return p_.totalNum(); }
  int N() const { return tot() + p_.transNum; }
  int hotel_loc(int h) const { return h; }
  int attr_loc(int a) const { return p_.hotelNum + a; }
  int rest_loc(int r) const { return p_.hotelNum + p_.attrNum + r; }
  int station_loc(int s) const { return p_.locNum() + s; }
  int trans_loc(int tr) const { return tot() + tr; }

  void declare() {
    const int T = this->T();
    m_.first_u = static_cast<int>(m_.vars.size());
    for (int i = 0; i < N(); ++i)
      for (int t = 0; t < T; ++t) add_var("u" + sfx({i, t}), MilpCategory::spatio);
    first_delta_ = static_cast<int>(m_.vars.size());
    for (int i = 0; i < N(); ++i)
      for (int t = 0; t + 1 < T; ++t) add_var("dl" + sfx({i, t}), MilpCategory::spatio);
    m_.first_event = static_cast<int>(m_.vars.size());
    for (int t = 0; t < T; ++t) add_var("ev" + sfx({t}), MilpCategory::spatio);

    m_.first_hotel = static_cast<int>(m_.vars.size());
    for (int h = 0; h < p_.hotelNum; ++h)
      for (int d = 0; d < p_.days; ++d)
        add_var("hot" + sfx({h, d}), MilpCategory::hotel, VarKind::integer, p_.steps_per_day());
    first_zh_ = static_cast<int>(m_.vars.size());
    for (int h = 0; h < p_.hotelNum; ++h)
      for (int t = 0; t < T; ++t) add_var("zh" + sfx({h, t}), MilpCategory::hotel);

    m_.first_attr = static_cast<int>(m_.vars.size());
    for (int a = 0; a < p_.attrNum; ++a) add_var("at" + sfx({a}), MilpCategory::attr);
    first_za_ = static_cast<int>(m_.vars.size());
    for (int a = 0; a < p_.attrNum; ++a)
      for (int t = 0; t < T; ++t) add_var("za" + sfx({a, t}), MilpCategory::attr);

    m_.first_rest = static_cast<int>(m_.vars.size());
    for (int r = 0; r < p_.restNum; ++r)
      for (int k = 0; k < 3 * p_.days; ++k)
        add_var("rs" + sfx({r, k}), MilpCategory::rest, VarKind::integer, T);
    first_zr_ = static_cast<int>(m_.vars.size());
    for (int r = 0; r < p_.restNum; ++r)
      for (int t = 0; t < T; ++t) add_var("zr" + sfx({r, t}), MilpCategory::rest);

    first_eat_ = static_cast<int>(m_.vars.size());
    for (int k = 0; k < 3 * p_.days; ++k) add_var("ne" + sfx({k}), MilpCategory::meal);

    m_.first_y = static_cast<int>(m_.vars.size());
    for (int i = 0; i < tot(); ++i)
      for (int j = 0; j < tot(); ++j)
        for (int tr = 0; tr < p_.transNum; ++tr)
          for (int t = 0; t < T; ++t) add_var("y" + sfx({i, j, tr, t}), MilpCategory::urban);

    m_.first_go = static_cast<int>(m_.vars.size());
    for (int i = 0; i < p_.goNum; ++i) add_var("go" + sfx({i}), MilpCategory::intercity);
    m_.first_back = static_cast<int>(m_.vars.size());
    for (int i = 0; i < p_.backNum; ++i) add_var("bk" + sfx({i}), MilpCategory::intercity);
  }

  int delta(int i, int t) const { return first_delta_ + i * (T() - 1) + t; }

  void spatio() {
    const auto C = MilpCategory::spatio;
    for (int i = 0; i < N(); ++i) {
      for (int t = 0; t + 1 < T(); ++t) {
        int d = delta(i, t), a = m_.u(i, t), b = m_.u(i, t + 1), ev = m_.event(t);
        // delta = |u[t+1] - u[t]|
        add_row(C, {{d, 1}, {b, -1}, {a, 1}}, Sense::ge, 0);
        add_row(C, {{d, 1}, {a, -1}, {b, 1}}, Sense::ge, 0);
        add_row(C, {{d, 1}, {a, -1}, {b, -1}}, Sense::le, 0);
        add_row(C, {{d, 1}, {a, 1}, {b, 1}}, Sense::le, 2);
        // no event, no change
        add_row(C, {{b, 1}, {a, -1}, {ev, -1}}, Sense::le, 0);
        add_row(C, {{a, 1}, {b, -1}, {ev, -1}}, Sense::le, 0);
      }
    }
    for (int t = 0; t + 1 < T(); ++t) {
      std::vector<MilpTerm> lo, hi;
      for (int i = 0; i < N(); ++i) lo.push_back({delta(i, t), 1});
      hi = lo;
      lo.push_back({m_.event(t), -2});
      hi.push_back({m_.event(t), -2});
      add_row(C, std::move(lo), Sense::ge, 0);
      add_row(C, std::move(hi), Sense::le, 0);
    }
    for (int t = 0; t < T(); ++t) {
      std::vector<MilpTerm> one;
      for (int i = 0; i < N(); ++i) one.push_back({m_.u(i, t), 1});
      add_row(C, std::move(one), Sense::eq, 1);
    }
    // A transport state is only entered by a move that started one slot
    // earlier.
    for (int tr = 0; tr < p_.transNum; ++tr) {
      for (int t = 0; t < T(); ++t) {
        std::vector<MilpTerm> terms{{m_.u(trans_loc(tr), t), 1}};
        if (t >= 1) {
          for (int i = 0; i < tot(); ++i)
            for (int j = 0; j < tot(); ++j) terms.push_back({m_.y(i, j, tr, t - 1), -1});
        }
        add_row(C, std::move(terms), Sense::le, 0);
      }
    }
  }

  // z = u AND event, three rows.
  void link_and(MilpCategory c, int z, int u, int ev) {
    add_row(c, {{z, 1}, {u, -1}}, Sense::le, 0);
    add_row(c, {{z, 1}, {ev, -1}}, Sense::le, 0);
    add_row(c, {{z, 1}, {u, -1}, {ev, -1}}, Sense::ge, -1);
  }

  void hotel() {
    const auto C = MilpCategory::hotel;
    const int spd = p_.steps_per_day();
    for (int h = 0; h < p_.hotelNum; ++h) {
      for (int t = 0; t < T(); ++t) {
        link_and(C, first_zh_ + h * T() + t, m_.u(hotel_loc(h), t), m_.event(t));
      }
      for (int d = 0; d < p_.days; ++d) {
        std::vector<MilpTerm> terms{{m_.hotel(h, d), 1}};
        for (int t = d * spd; t < (d + 1) * spd; ++t) terms.push_back({first_zh_ + h * T() + t, -1});
        add_row(C, std::move(terms), Sense::eq, 0);
      }
    }
    for (int d = 0; d < p_.days; ++d) {
      std::vector<MilpTerm> terms;
      for (int h = 0; h < p_.hotelNum; ++h) terms.push_back({m_.hotel(h, d), 1});
      add_row(C, std::move(terms), Sense::eq, 1);
    }
  }

  bool open_during(TableKind kind, const std::string& name, int t) const {
    const int dt = p_.slot_minutes();
    const int m0 = (t % p_.steps_per_day()) * dt;
    return is_open(db_, kind, name, ClockTime(m0)) && is_open(db_, kind, name, ClockTime(m0 + dt));
  }

  void attr() {
    const auto C = MilpCategory::attr;
    for (int a = 0; a < p_.attrNum; ++a) {
      for (int t = 0; t < T(); ++t) {
        link_and(C, first_za_ + a * T() + t, m_.u(attr_loc(a), t), m_.event(t));
      }
      for (int t = 0; t < T(); ++t) {
        bool open = open_during(TableKind::attractions, slice_.attractions[a], t);
        add_row(C, {{m_.u(attr_loc(a), t), 1}}, Sense::le, open ? 1 : 0);
      }
      std::vector<MilpTerm> terms{{m_.attr(a), 1}};
      for (int t = 0; t < T(); ++t) terms.push_back({first_za_ + a * T() + t, -1});
      add_row(C, std::move(terms), Sense::eq, 0);
    }
    std::vector<MilpTerm> all;
    for (int a = 0; a < p_.attrNum; ++a) all.push_back({m_.attr(a), 1});
    m_.min_attr = std::min(p_.attrNum, p_.days);
    add_row(C, std::move(all), Sense::ge, m_.min_attr);
  }

  // Slot range [first, last] of meal k (= day * 3 + meal).
  std::pair<int, int> meal_slots(int k) const {
    const int dt = p_.slot_minutes();
    const int day = k / 3;
    const auto& w = kMealWindows[static_cast<std::size_t>(k % 3)];
    int first = w[0] / dt;
    int last = (w[1] + dt - 1) / dt - 1;
    return {day * p_.steps_per_day() + first, day * p_.steps_per_day() + last};
  }

  void rest() {
    const auto C = MilpCategory::rest;
    for (int r = 0; r < p_.restNum; ++r) {
      for (int t = 0; t < T(); ++t) {
        link_and(C, first_zr_ + r * T() + t, m_.u(rest_loc(r), t), m_.event(t));
      }
      for (int t = 0; t < T(); ++t) {
        bool open = open_during(TableKind::restaurants, slice_.restaurants[r], t);
        add_row(C, {{m_.u(rest_loc(r), t), 1}}, Sense::le, open ? 1 : 0);
      }
      for (int k = 0; k < 3 * p_.days; ++k) {
        auto [a, b] = meal_slots(k);
        std::vector<MilpTerm> terms{{m_.rest(r, k), 1}};
        for (int t = a; t <= b; ++t) terms.push_back({first_zr_ + r * T() + t, -1});
        add_row(C, std::move(terms), Sense::eq, 0);
      }
    }
    for (int k = 0; k < 3 * p_.days; ++k) {
      std::vector<MilpTerm> terms;
      for (int r = 0; r < p_.restNum; ++r) terms.push_back({m_.rest(r, k), 1});
      terms.push_back({first_eat_ + k, -1});
      add_row(C, std::move(terms), Sense::le, 0);
    }
  }

  int arrival_slot(const IntercityRoute& r) const {
    return std::min(T() - 1, r.end.minutes() / p_.slot_minutes());
  }
  int departure_slot(const IntercityRoute& r) const {
    return std::min(T() - 1,
                    (p_.days - 1) * p_.steps_per_day() + r.begin.minutes() / p_.slot_minutes());
  }

  // needEat[k] = 1 only when the meal window overlaps the stay:
  // T_arr <= b[k] and T_dep >= a[k], with M = timeStep.
  void meal() {
    const auto C = MilpCategory::meal;
    const std::int64_t M = T();
    for (int k = 0; k < 3 * p_.days; ++k) {
      auto [a, b] = meal_slots(k);
      int ne = first_eat_ + k;
      std::vector<MilpTerm> arr{{ne, M}};
      for (int i = 0; i < p_.goNum; ++i) arr.push_back({m_.go(i), arrival_slot(slice_.go[i])});
      add_row(C, std::move(arr), Sense::le, M + b);
      std::vector<MilpTerm> dep{{ne, M}};
      for (int i = 0; i < p_.backNum; ++i) {
        dep.push_back({m_.back(i), -departure_slot(slice_.back[i])});
      }
      add_row(C, std::move(dep), Sense::le, M - a);
    }
  }

  void urban() {
    const auto C = MilpCategory::urban;
    const int T = this->T();
    for (int i = 0; i < tot(); ++i) {
      for (int j = 0; j < tot(); ++j) {
        for (int tr = 0; tr < p_.transNum; ++tr) {
          for (int t = 0; t < T; ++t) {
            int y = m_.y(i, j, tr, t);
            auto bound = [&](int var_or_neg) {
              if (var_or_neg < 0) add_row(C, {{y, 1}}, Sense::le, 0);
              else add_row(C, {{y, 1}, {var_or_neg, -1}}, Sense::le, 0);
            };
            bool in1 = t + 1 < T, in2 = t + 2 < T;
            bound(m_.u(i, t));
            bound(m_.event(t));
            bound(in1 ? m_.u(trans_loc(tr), t + 1) : -1);
            bound(in1 ? m_.u(trans_loc(tr), t + 1) : -1);
            bound(in1 ? m_.event(t + 1) : -1);
            bound(in2 ? m_.u(j, t + 2) : -1);
            if (in2) {
              add_row(C,
                      {{y, 1},
                       {m_.u(i, t), -1},
                       {m_.event(t), -1},
                       {m_.u(trans_loc(tr), t + 1), -1},
                       {m_.event(t + 1), -1},
                       {m_.u(j, t + 2), -1}},
                      Sense::ge, -4);
            } else {
              add_row(C, {{y, 1}}, Sense::le, 0);
            }
          }
        }
      }
    }
    for (int i = 0; i < tot(); ++i) {
      for (int t = 0; t < T; ++t) {
        std::vector<MilpTerm> out, in;
        for (int j = 0; j < tot(); ++j)
          for (int tr = 0; tr < p_.transNum; ++tr) {
            out.push_back({m_.y(i, j, tr, t), 1});
            in.push_back({m_.y(j, i, tr, t), 1});
          }
        auto leave_u = out, leave_ev = out, leave_any = out;
        leave_u.push_back({m_.u(i, t), -1});
        add_row(C, std::move(leave_u), Sense::le, 0);
        leave_ev.push_back({m_.event(t), -1});
        add_row(C, std::move(leave_ev), Sense::le, 0);
        // at i and an event at t means a move out of i
        leave_any.push_back({m_.u(i, t), -1});
        leave_any.push_back({m_.event(t), -1});
        add_row(C, std::move(leave_any), Sense::ge, -1);
        if (t + 2 < T) in.push_back({m_.u(i, t + 2), -1});
        add_row(C, std::move(in), Sense::le, 0);
      }
    }
  }

  int station_index(const std::string& name) const {
    auto it = std::find(slice_.stations.begin(), slice_.stations.end(), name);
    if (it == slice_.stations.end()) {
      throw Error("route station '" + name + "' is not in the model slice");
    }
    return static_cast<int>(it - slice_.stations.begin());
  }

  void intercity() {
    const auto C = MilpCategory::intercity;
    std::vector<MilpTerm> all_go, all_back;
    for (int i = 0; i < p_.goNum; ++i) all_go.push_back({m_.go(i), 1});
    for (int i = 0; i < p_.backNum; ++i) all_back.push_back({m_.back(i), 1});
    add_row(C, std::move(all_go), Sense::eq, 1);
    add_row(C, std::move(all_back), Sense::eq, 1);
    // Chosen arrival: at its station up to the arrival slot. Chosen return:
    // at its station from the departure slot on. Other slots get a slack row.
    for (int i = 0; i < p_.goNum; ++i) {
      int k = station_loc(station_index(slice_.go[i].to));
      int s = arrival_slot(slice_.go[i]);
      for (int t = 0; t < T(); ++t) {
        add_row(C, {{m_.go(i), 1}, {m_.u(k, t), -1}}, Sense::le, t <= s ? 0 : 1);
      }
    }
    for (int i = 0; i < p_.backNum; ++i) {
      int k = station_loc(station_index(slice_.back[i].from));
      int s = departure_slot(slice_.back[i]);
      for (int t = 0; t < T(); ++t) {
        add_row(C, {{m_.back(i), 1}, {m_.u(k, t), -1}}, Sense::le, t >= s ? 0 : 1);
      }
    }
  }

  std::string loc_name(int idx) const {
    if (idx < p_.hotelNum) return slice_.hotels[idx];
    idx -= p_.hotelNum;
    if (idx < p_.attrNum) return slice_.attractions[idx];
    idx -= p_.attrNum;
    if (idx < p_.restNum) return slice_.restaurants[idx];
    return slice_.stations[idx - p_.restNum];
  }

  Decimal price_of(TableKind kind, const std::string& name, std::string_view col) const {
    const Table& t = db_.table(kind);
    auto row = t.find(name);
    if (!row) return Decimal(0);
    return t.number(*row, t.column_index(col));
  }

  void objective() {
    auto add = [&](int var, Decimal c) {
      if (c != Decimal(0)) m_.objective.push_back({var, c});
    };
    const Decimal p(people_);
    for (int h = 0; h < p_.hotelNum; ++h) {
      Decimal beds = price_of(TableKind::hotels, slice_.hotels[h], "numbed");
      int per_room = std::max(1, static_cast<int>(beds.ceil()));
      int rooms = (people_ + per_room - 1) / per_room;
      Decimal price = price_of(TableKind::hotels, slice_.hotels[h], "price") * Decimal(rooms);
      for (int d = 0; d < p_.days; ++d) add(m_.hotel(h, d), price);
    }
    for (int a = 0; a < p_.attrNum; ++a) {
      add(m_.attr(a), price_of(TableKind::attractions, slice_.attractions[a], "price") * p);
    }
    for (int r = 0; r < p_.restNum; ++r) {
      Decimal price = price_of(TableKind::restaurants, slice_.restaurants[r], "price") * p;
      for (int k = 0; k < 3 * p_.days; ++k) add(m_.rest(r, k), price);
    }
    std::vector<std::string> names;
    for (int i = 0; i < tot(); ++i) names.push_back(loc_name(i));
    for (int i = 0; i < tot(); ++i) {
      for (int j = 0; j < tot(); ++j) {
        if (i == j) continue;
        for (int tr = 0; tr < p_.transNum; ++tr) {
          Decimal c = goto_poi(db_, fares_, names[i], names[j], ClockTime::hm(8, 0),
                               kModes[static_cast<std::size_t>(tr)], people_)
                          .cost;
          for (int t = 0; t < T(); ++t) add(m_.y(i, j, tr, t), c);
        }
      }
    }
    for (int i = 0; i < p_.goNum; ++i) add(m_.go(i), slice_.go[i].cost * p);
    for (int i = 0; i < p_.backNum; ++i) add(m_.back(i), slice_.back[i].cost * p);
  }

  MilpModel& m_;
  const MilpParams& p_;
  const MilpSlice& slice_;
  const CityDatabase& db_;
  const FareModel& fares_;
  int people_;
  std::array<int, kMilpCategories> counters_{};
  int first_delta_ = 0, first_zh_ = 0, first_za_ = 0, first_zr_ = 0, first_eat_ = 0;
};

}  // namespace

MilpModel build_model(const MilpSlice& slice, const MilpParams& params, const Sandbox& sb,
                      int people) {
  params.validate();
  if (people < 1) throw UsageError("people must be >= 1");
  if (params.transNum > static_cast<int>(kModes.size())) {
    throw UsageError("transNum must be <= 3 (walk, metro, taxi)");
  }
  auto check = [](std::size_t have, int want, const char* what) {
    if (static_cast<int>(have) != want) {
      throw Error(std::string("slice has ") + std::to_string(have) + " " + what + ", params say " +
                  std::to_string(want));
    }
  };
  check(slice.hotels.size(), params.hotelNum, "hotels");
  check(slice.attractions.size(), params.attrNum, "attractions");
  check(slice.restaurants.size(), params.restNum, "restaurants");
  check(slice.stations.size(), params.stationNum, "stations");
  check(slice.go.size(), params.goNum, "outbound routes");
  check(slice.back.size(), params.backNum, "return routes");
  MilpModel m;
  m.params = params;
  Builder(m, slice, sb, people).run();
  return m;
}

// ---------------------------------------------------------------------------
// LP text

namespace {

class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}
  void start(std::string head) {
    flush();
    line_ = std::move(head);
  }
  void add(const std::string& token) {
    if (line_.size() + token.size() + 1 > kWidth) {
      out_ += line_;
      out_ += '\n';
      line_ = "   ";
    }
    line_ += ' ';
    line_ += token;
  }
  void flush() {
    if (!line_.empty()) {
      out_ += line_;
      out_ += '\n';
    }
    line_.clear();
  }

 private:
  static constexpr std::size_t kWidth = 200;
  std::string& out_;
  std::string line_;
};

void write_terms(LineWriter& w, const MilpModel& m, const std::vector<MilpTerm>& terms) {
  bool first = true;
  for (const auto& t : terms) {
    std::string tok;
    std::int64_t c = t.coef;
    if (c < 0) tok = "- ";
    else if (!first) tok = "+ ";
    std::int64_t a = c < 0 ? -c : c;
    if (a != 1) tok += std::to_string(a) + " ";
    tok += m.vars[static_cast<std::size_t>(t.var)].name;
    w.add(tok);
    first = false;
  }
  if (terms.empty()) w.add("0 " + m.vars.front().name);
}

}  // namespace

std::string emit_lp(const MilpModel& m) {
  std::string out;
  out += "\\ itin itinerary model\n";
  out += "Minimize\n";
  LineWriter w(out);
  w.start(" obj:");
  if (m.objective.empty()) {
    w.add("0");
  } else {
    bool first = true;
    for (const auto& [var, c] : m.objective) {
      std::string tok;
      Decimal a = c;
      if (c < Decimal(0)) {
        tok = "- ";
        a = -c;
      } else if (!first) {
        tok = "+ ";
      }
      tok += a.to_string() + " " + m.vars[static_cast<std::size_t>(var)].name;
      w.add(tok);
      first = false;
    }
  }
  w.flush();
  out += "Subject To\n";
  for (const auto& row : m.rows) {
    w.start(" " + row.name + ":");
    write_terms(w, m, row.terms);
    const char* sense = row.sense == Sense::le ? "<=" : row.sense == Sense::ge ? ">=" : "=";
    w.add(std::string(sense) + " " + std::to_string(row.rhs));
    w.flush();
  }
  out += "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::integer) {
      out += " " + std::to_string(v.lo) + " <= " + v.name + " <= " + std::to_string(v.hi) + "\n";
    }
  }
  out += "Binaries\n";
  w.start("");
  for (const auto& v : m.vars)
    if (v.kind == VarKind::binary) w.add(v.name);
  w.flush();
  out += "Generals\n";
  w.start("");
  for (const auto& v : m.vars)
    if (v.kind == VarKind::integer) w.add(v.name);
  w.flush();
  out += "End\n";
  return out;
}

void write_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << emit_lp(model);
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Micro solver

namespace {

struct Propagator {
  const MilpModel& m;
  std::vector<std::vector<int>> rows_of;

  explicit Propagator(const MilpModel& model) : m(model), rows_of(model.vars.size()) {
    for (std::size_t r = 0; r < m.rows.size(); ++r)
      for (const auto& t : m.rows[r].terms) rows_of[static_cast<std::size_t>(t.var)].push_back(
          static_cast<int>(r));
  }

  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

  // Tightens against `sum <= rhs` (or >= when `upper` is false). Returns
  // false on a wipe-out; pushes changed variables to `queue`.
  bool tighten(const MilpRow& row, bool upper, std::vector<std::int64_t>& lo,
               std::vector<std::int64_t>& hi, std::vector<int>& queue) {
    // Work with sum(c x) <= rhs; flip signs for >=.
    const std::int64_t sign = upper ? 1 : -1;
    const std::int64_t rhs = sign * row.rhs;
    std::int64_t min_act = 0;
    for (const auto& t : row.terms) {
      std::int64_t c = sign * t.coef;
      auto v = static_cast<std::size_t>(t.var);
      min_act += c > 0 ? c * lo[v] : c * hi[v];
    }
    if (min_act > rhs) return false;
    for (const auto& t : row.terms) {
      std::int64_t c = sign * t.coef;
      auto v = static_cast<std::size_t>(t.var);
      std::int64_t own = c > 0 ? c * lo[v] : c * hi[v];
      std::int64_t slack = rhs - (min_act - own);
      if (c > 0) {
        std::int64_t nb = floor_div(slack, c);
        if (nb < hi[v]) {
          if (nb < lo[v]) return false;
          hi[v] = nb;
          queue.push_back(t.var);
        }
      } else if (c < 0) {
        std::int64_t nb = ceil_div(slack, c);
        if (nb > lo[v]) {
          if (nb > hi[v]) return false;
          lo[v] = nb;
          queue.push_back(t.var);
        }
      }
    }
    return true;
  }

  bool propagate(std::vector<std::int64_t>& lo, std::vector<std::int64_t>& hi,
                 std::vector<int> queue) {
    std::vector<char> pending(m.rows.size(), 0);
    std::vector<int> work;
    auto enqueue_var = [&](int v) {
      for (int r : rows_of[static_cast<std::size_t>(v)]) {
        if (!pending[static_cast<std::size_t>(r)]) {
          pending[static_cast<std::size_t>(r)] = 1;
          work.push_back(r);
        }
      }
    };
    if (queue.empty()) {
      for (std::size_t r = 0; r < m.rows.size(); ++r) {
        pending[r] = 1;
        work.push_back(static_cast<int>(r));
      }
    }
    for (int v : queue) enqueue_var(v);
    std::vector<int> changed;
    while (!work.empty()) {
      int r = work.back();
      work.pop_back();
      pending[static_cast<std::size_t>(r)] = 0;
      const MilpRow& row = m.rows[static_cast<std::size_t>(r)];
      changed.clear();
      if (row.sense != Sense::ge && !tighten(row, true, lo, hi, changed)) return false;
      if (row.sense != Sense::le && !tighten(row, false, lo, hi, changed)) return false;
      for (int v : changed) enqueue_var(v);
    }
    return true;
  }
};

}  // namespace

MilpSolution micro_solve(const MilpModel& model, int max_vars, std::uint64_t max_nodes) {
  if (static_cast<int>(model.vars.size()) > max_vars) {
    throw UsageError("micro_solve handles at most " + std::to_string(max_vars) +
                     " variables; model has " + std::to_string(model.vars.size()));
  }
  Propagator prop(model);
  const std::size_t n = model.vars.size();
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = model.vars[i].lo;
    hi[i] = model.vars[i].hi;
  }
  // Branch on routes and positions first; everything else is implied.
  std::vector<int> order;
  for (int i = 0; i < model.params.goNum; ++i) order.push_back(model.go(i));
  for (int i = 0; i < model.params.backNum; ++i) order.push_back(model.back(i));
  const int N = model.params.totalNum() + model.params.transNum;
  for (int t = 0; t < model.params.timeStep; ++t)
    for (int i = 0; i < N; ++i) order.push_back(model.u(i, t));
  for (std::size_t i = 0; i < n; ++i) order.push_back(static_cast<int>(i));

  MilpSolution sol;
  if (!prop.propagate(lo, hi, {})) return sol;

  std::function<bool(std::vector<std::int64_t>&, std::vector<std::int64_t>&)> dfs =
      [&](std::vector<std::int64_t>& l, std::vector<std::int64_t>& h) -> bool {
    if (++sol.nodes > max_nodes) throw Error("micro_solve node limit reached");
    int pick = -1;
    for (int v : order) {
      if (l[static_cast<std::size_t>(v)] != h[static_cast<std::size_t>(v)]) {
        pick = v;
        break;
      }
    }
    if (pick < 0) {
      sol.values = l;
      return true;
    }
    auto pv = static_cast<std::size_t>(pick);
    for (std::int64_t val = h[pv]; val >= l[pv]; --val) {
      auto l2 = l, h2 = h;
      l2[pv] = h2[pv] = val;
      if (prop.propagate(l2, h2, {pick}) && dfs(l2, h2)) return true;
    }
    return false;
  };
  sol.feasible = dfs(lo, hi);
  return sol;
}

bool check_assignment(const MilpModel& model, const std::vector<std::int64_t>& values,
                      std::string* failed) {
  if (values.size() != model.vars.size()) {
    if (failed) *failed = "size";
    return false;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < model.vars[i].lo || values[i] > model.vars[i].hi) {
      if (failed) *failed = model.vars[i].name;
      return false;
    }
  }
  for (const auto& row : model.rows) {
    std::int64_t s = 0;
    for (const auto& t : row.terms) s += t.coef * values[static_cast<std::size_t>(t.var)];
    bool ok = row.sense == Sense::le ? s <= row.rhs : row.sense == Sense::ge ? s >= row.rhs
                                                                             : s == row.rhs;
    if (!ok) {
      if (failed) *failed = row.name;
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Decoding

Plan decode_solution(const MilpModel& model, const MilpSlice& slice,
                     const std::vector<std::int64_t>& values, const Sandbox& sb,
                     const std::string& origin, int people) {
  const MilpParams& p = model.params;
  const CityDatabase& db = sb.city(slice.city);
  auto val = [&](int v) { return values.at(static_cast<std::size_t>(v)); };
  const int N = p.totalNum() + p.transNum;
  const int dt = p.slot_minutes();
  const int spd = p.steps_per_day();

  std::vector<int> where(static_cast<std::size_t>(p.timeStep), -1);
  for (int t = 0; t < p.timeStep; ++t)
    for (int i = 0; i < N; ++i)
      if (val(model.u(i, t)) == 1) where[static_cast<std::size_t>(t)] = i;

  auto name_of = [&](int idx) -> std::string {
    if (idx < p.hotelNum) return slice.hotels[static_cast<std::size_t>(idx)];
    idx -= p.hotelNum;
    if (idx < p.attrNum) return slice.attractions[static_cast<std::size_t>(idx)];
    idx -= p.attrNum;
    if (idx < p.restNum) return slice.restaurants[static_cast<std::size_t>(idx)];
    return slice.stations[static_cast<std::size_t>(idx - p.restNum)];
  };
  auto hhmm = [](int minutes) { return ClockTime(std::min(minutes, 1440)).to_string(); };

  Plan plan;
  plan.people_number = people;
  plan.start_city = origin;
  plan.target_city = slice.city;
  for (int d = 0; d < p.days; ++d) plan.itinerary.push_back(DayPlan{d + 1, {}, json::object()});

  auto intercity = [&](const IntercityRoute& r) {
    Activity a;
    a.type = r.kind == RouteKind::train ? ActivityType::train : ActivityType::airplane;
    a.start = r.from;
    a.end = r.to;
    a.start_time = r.begin.to_string();
    a.end_time = r.end.to_string();
    a.price = r.cost;
    a.tickets = people;
    a.cost = r.cost * Decimal(people);
    if (r.kind == RouteKind::train) a.train_id = r.id;
    else a.flight_id = r.id;
    return a;
  };
  for (int i = 0; i < p.goNum; ++i)
    if (val(model.go(i)) == 1) plan.itinerary.front().activities.push_back(intercity(slice.go[i]));

  std::string last_pos;
  std::vector<TransportLeg> pending;
  for (int t = 0; t < p.timeStep;) {
    int idx = where[static_cast<std::size_t>(t)];
    int run_end = t;
    while (run_end + 1 < p.timeStep && where[static_cast<std::size_t>(run_end + 1)] == idx) ++run_end;
    if (idx >= 0 && idx < p.totalNum()) {
      std::string name = name_of(idx);
      if (!last_pos.empty() && name != last_pos && t >= 2) {
        int tr = where[static_cast<std::size_t>(t - 1)] - p.totalNum();
        if (tr >= 0 && tr < 3) {
          static constexpr std::array<TransportMode, 3> modes = {
              TransportMode::walk, TransportMode::metro, TransportMode::taxi};
          auto opt = goto_poi(db, sb.fares, last_pos, name,
                              ClockTime(((t - 1) % spd) * dt), modes[static_cast<std::size_t>(tr)],
                              people);
          pending = opt.legs;
        }
      }
      if (idx < p.locNum()) {
        Activity a;
        int first = t % spd;
        int last = run_end % spd;
        a.position = name;
        a.start_time = hhmm(first * dt);
        a.end_time = hhmm((last + 1) * dt);
        a.transports = pending;
        if (idx < p.hotelNum) {
          a.type = ActivityType::accommodation;
          const Table& h = db.hotels;
          auto row = h.find(name);
          int beds = row ? std::max(1, static_cast<int>(h.number(*row, h.column_index("numbed")).ceil())) : 1;
          a.price = row ? h.number(*row, h.column_index("price")) : Decimal(0);
          a.room_type = beds;
          a.rooms = (people + beds - 1) / beds;
          a.cost = *a.price * Decimal(*a.rooms);
        } else if (idx < p.hotelNum + p.attrNum) {
          a.type = ActivityType::attraction;
          const Table& at = db.attractions;
          auto row = at.find(name);
          a.price = row ? at.number(*row, at.column_index("price")) : Decimal(0);
          a.tickets = people;
          a.cost = *a.price * Decimal(people);
        } else {
          int minute = first * dt;
          a.type = minute < 10 * 60 ? ActivityType::breakfast
                   : minute < 16 * 60 ? ActivityType::lunch
                                      : ActivityType::dinner;
          const Table& rs = db.restaurants;
          auto row = rs.find(name);
          a.price = row ? rs.number(*row, rs.column_index("price")) : Decimal(0);
          a.cost = *a.price * Decimal(people);
        }
        plan.itinerary[static_cast<std::size_t>(t / spd)].activities.push_back(std::move(a));
        pending.clear();
      }
      last_pos = name;
    }
    t = run_end + 1;
  }

  for (int i = 0; i < p.backNum; ++i) {
    if (val(model.back(i)) == 1) {
      Activity a = intercity(slice.back[i]);
      a.transports = pending;
      plan.itinerary.back().activities.push_back(std::move(a));
    }
  }
  return plan;
}

}  // namespace itin
