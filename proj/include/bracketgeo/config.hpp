#pragma once

// JSON manifold descriptions:
//   {"manifold": {"builtin": name, "params": {...}}}
//   {"manifold": {"custom": {"name"?, "n", "m", "embedding": [...],
//       "ambient": {"diagonal": [...]} | {"general": [[...]]},
//       "bracket": {"nambu": {"rho": e}} | {"poisson": {"theta": [[...]]}}
//                | {"multivector": {"arity", "entries": [{"index": [1-based], "value": e}],
//                                   "antisymmetric"}},
//       "normals"?: [[...]], "domain": {"box": [[lo, hi], ...], "margin"?}}}}

#include <cstdint>
#include <filesystem>
#include <string>

#include "bracketgeo/manifold.hpp"
#include "json.hpp"

namespace bracketgeo {

inline constexpr double kStructureRejectThreshold = 1e-6;

struct ConfigOptions {
  bool force = false;  // skip structure validation
  int validation_points = 20;
  std::uint64_t seed = 42;
  int order = 3;
};

/// Builds the manifold without running structure validation. Throws ConfigError
/// naming the offending key; expression errors carry the key and byte offset.
EmbeddedManifold manifold_from_json(const nlohmann::json& doc);

/// manifold_from_json followed by structure validation unless options.force.
EmbeddedManifold from_config(const nlohmann::json& doc, const ConfigOptions& options = {});
EmbeddedManifold load_config(const std::filesystem::path& path, const ConfigOptions& options = {});

}  // namespace bracketgeo
