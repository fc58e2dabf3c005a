#pragma once

#include <string>

#include <json.hpp>

namespace netcomp {

// Minimal TOML reader covering the subset used by the spec files: comments,
// [table] and [[array-of-tables]] headers, and key = value pairs with
// strings, numbers, booleans and (nested) arrays. Parses into a JSON tree so
// both config formats flow through one code path.
nlohmann::json parse_toml(const std::string& text);

nlohmann::json parse_toml_file(const std::string& path);

}  // namespace netcomp
