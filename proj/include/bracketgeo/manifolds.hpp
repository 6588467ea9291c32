#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bracketgeo/manifold.hpp"

namespace bracketgeo {

using ParamMap = std::map<std::string, std::string>;

struct BuiltinParam {
  std::string name;
  std::string default_value;
  std::string description;
};

struct ExpectedInvariants {
  int epsilon = 1;
  /// gamma as an expression in u1..un.
  std::string gamma;
  std::optional<double> scalar_curvature;
  std::vector<std::string> laplacians;
  std::string notes;
};

struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::vector<BuiltinParam> params;
};

const std::vector<BuiltinInfo>& builtin_registry();

/// Throws ConfigError for unknown names, unknown parameters or invalid values.
EmbeddedManifold builtin(const std::string& name, const ParamMap& params = {});
ExpectedInvariants builtin_expectations(const std::string& name, const ParamMap& params = {});

/// S^2 x S^2 whose second Poisson block is multiplied by (2 + cos(u3)). Still a
/// Poisson structure, but its bracket square no longer matches the induced
/// metric, so the tangent projection built from it is wrong.
EmbeddedManifold distorted_s2xs2();

}  // namespace bracketgeo
