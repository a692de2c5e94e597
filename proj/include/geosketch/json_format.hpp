#pragma once

#include <string>

#include <json.hpp>

namespace geosketch {

/// Formats a double with 9 significant digits ("%.9g").
std::string format_number(double value);

/// Writes JSON with sorted object keys, 2-space indentation, LF line endings
/// and every floating point number formatted by format_number, so the bytes
/// depend only on the value.
std::string dump_deterministic(const nlohmann::json& value);

}  // namespace geosketch
