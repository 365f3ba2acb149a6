#pragma once

#include <json.hpp>

namespace itin {

// Insertion-ordered JSON so every emitted document has a fixed key order.
using json = nlohmann::ordered_json;

}  // namespace itin
