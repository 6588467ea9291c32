#pragma once

// Serialisation of reports: JSON with every float printed to 17 significant
// digits (non-finite values become null) and keys in sorted order, and plain
// CSV tables.

#include <string>
#include <vector>

#include "json.hpp"

namespace bracketgeo {

std::string format_double(double v);

/// Pretty-printed JSON, two-space indent, trailing newline.
std::string to_json_text(const nlohmann::json& value);

/// The same document without its "timing" members, at any depth.
nlohmann::json without_timing(const nlohmann::json& value);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

std::string to_csv(const Table& table);
nlohmann::json table_to_json(const Table& table);

}  // namespace bracketgeo
