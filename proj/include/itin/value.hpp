#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "itin/decimal.hpp"
#include "itin/plan.hpp"

namespace itin {

class Value;
using ValueList = std::vector<Value>;

/// Runtime value of the constraint language. Lists and sets are immutable
/// and shared; records point into the plan being evaluated.
class Value {
 public:
  enum class Kind { none, boolean, number, text, list, set, plan, activity, leg };

  struct SetTag {};

  Value() = default;
  Value(bool b) : data_(b) {}
  Value(Decimal d) : data_(d) {}
  Value(int i) : data_(Decimal(i)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(const Plan* p) : data_(p) {}
  Value(const Activity* a) : data_(a) {}
  Value(const TransportLeg* l) : data_(l) {}

  static Value list(ValueList items);
  /// Sorts and de-duplicates; elements must be scalars.
  static Value set(ValueList items);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  bool is_scalar() const;

  bool as_bool() const { return std::get<bool>(data_); }
  Decimal as_number() const { return std::get<Decimal>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }
  /// Elements of a list or set.
  const ValueList& items() const;
  const Plan* as_plan() const { return std::get<const Plan*>(data_); }
  const Activity* as_activity() const { return std::get<const Activity*>(data_); }
  const TransportLeg* as_leg() const { return std::get<const TransportLeg*>(data_); }

  /// Debug/diagnostic rendering, Python-like.
  std::string repr() const;

  friend bool operator==(const Value& a, const Value& b);
  /// Total order used for sets: by kind, then by value.
  friend bool operator<(const Value& a, const Value& b);

 private:
  struct ListBox {
    ValueList items;
    bool is_set = false;
  };
  std::variant<std::monostate, bool, Decimal, std::string, std::shared_ptr<const ListBox>,
               const Plan*, const Activity*, const TransportLeg*>
      data_;
};

std::string_view kind_name(Value::Kind k);

}  // namespace itin
