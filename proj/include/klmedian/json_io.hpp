#pragma once

#include <string>

#include <json.hpp>

namespace klmedian {

/// Serializes like nlohmann::json::dump but prints every floating point number
/// with 17 significant digits. Non-finite numbers become null.
std::string dump_json(const nlohmann::json& j, int indent = -1);

}  // namespace klmedian
