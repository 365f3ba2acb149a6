#include "itin/value.hpp"

#include <algorithm>

namespace itin {

Value Value::list(ValueList items) {
  Value v;
  v.data_ = std::make_shared<const ListBox>(ListBox{std::move(items), false});
  return v;
}

Value Value::set(ValueList items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Value v;
  v.data_ = std::make_shared<const ListBox>(ListBox{std::move(items), true});
  return v;
}

Value::Kind Value::kind() const {
  switch (data_.index()) {
    case 0:
      return Kind::none;
    case 1:
      return Kind::boolean;
    case 2:
      return Kind::number;
    case 3:
      return Kind::text;
    case 4:
      return std::get<4>(data_)->is_set ? Kind::set : Kind::list;
    case 5:
      return Kind::plan;
    case 6:
      return Kind::activity;
    default:
      return Kind::leg;
  }
}

bool Value::is_scalar() const {
  Kind k = kind();
  return k == Kind::boolean || k == Kind::number || k == Kind::text;
}

const ValueList& Value::items() const { return std::get<4>(data_)->items; }

std::string Value::repr() const {
  switch (kind()) {
    case Kind::none:
      return "None";
    case Kind::boolean:
      return as_bool() ? "True" : "False";
    case Kind::number:
      return as_number().to_string();
    case Kind::text:
      return "'" + as_text() + "'";
    case Kind::list:
    case Kind::set: {
      bool s = kind() == Kind::set;
      std::string out = s ? "{" : "[";
      for (std::size_t i = 0; i < items().size(); ++i) {
        if (i) out += ", ";
        out += items()[i].repr();
      }
      if (s && items().empty()) return "set()";
      return out + (s ? "}" : "]");
    }
    case Kind::plan:
      return "<plan>";
    case Kind::activity:
      return "<activity " + std::string(activity_type_name(as_activity()->type)) + ">";
    case Kind::leg:
      return "<transport " + as_leg()->mode + ">";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::list:
    case Value::Kind::set:
      return a.items() == b.items();
    default:
      return a.data_ == b.data_;
  }
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Value::Kind::none:
      return false;
    case Value::Kind::boolean:
      return a.as_bool() < b.as_bool();
    case Value::Kind::number:
      return a.as_number() < b.as_number();
    case Value::Kind::text:
      return a.as_text() < b.as_text();
    case Value::Kind::list:
    case Value::Kind::set:
      return std::lexicographical_compare(a.items().begin(), a.items().end(), b.items().begin(),
                                          b.items().end());
    default:
      return a.data_ < b.data_;
  }
}

std::string_view kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::none:
      return "None";
    case Value::Kind::boolean:
      return "bool";
    case Value::Kind::number:
      return "number";
    case Value::Kind::text:
      return "text";
    case Value::Kind::list:
      return "list";
    case Value::Kind::set:
      return "set";
    case Value::Kind::plan:
      return "plan";
    case Value::Kind::activity:
      return "activity";
    case Value::Kind::leg:
      return "transport";
  }
  return "?";
}

}  // namespace itin
