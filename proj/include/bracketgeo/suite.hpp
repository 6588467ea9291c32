#pragma once

// Point-parallel drivers behind the command-line tool: the residual battery
// (check), invariant tables (invariants) and the bracket-versus-coordinate
// comparison (compare).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bracketgeo/manifold.hpp"
#include "bracketgeo/manifolds.hpp"
#include "bracketgeo/report.hpp"
#include "json.hpp"

namespace bracketgeo {

struct Subject {
  EmbeddedManifold manifold;
  std::optional<ExpectedInvariants> expected;
  /// Free-form description copied into reports.
  nlohmann::json descriptor = nlohmann::json::object();
};

Subject builtin_subject(const std::string& name, const ParamMap& params = {});

struct RunOptions {
  int points = 100;
  std::uint64_t seed = 42;
  double tolerance = 1e-7;
  int order = 3;
  int threads = 1;
  bool fast_path = false;
  /// Test functions over u1..un and x1..xm; empty means the defaults.
  std::vector<std::string> functions;
  /// Grid counts per chart axis; replaces random sampling when set.
  std::vector<int> grid;
};

/// Functions used by check when none are given.
std::vector<std::string> default_check_functions(const EmbeddedManifold& mfld);

std::vector<ChartPoint> run_points(const EmbeddedManifold& mfld, const RunOptions& options);

/// Full residual battery. The returned report has a boolean "pass".
nlohmann::json run_check(const Subject& subject, const RunOptions& options);
Table check_table(const nlohmann::json& report);

Table run_invariants(const Subject& subject, const RunOptions& options);

nlohmann::json run_compare(const Subject& subject, const RunOptions& options);
Table compare_table(const nlohmann::json& report);

}  // namespace bracketgeo
