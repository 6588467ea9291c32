#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "bracketgeo/report.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

const std::string kExe = BRACKETGEO_CLI;
const std::string kData = BRACKETGEO_TEST_DATA;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kExe + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string stderr_of(const std::string& args) {
  const std::string cmd = kExe + " " + args + " 2>&1 >/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  pclose(pipe);
  return out;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST_CASE("exit codes") {
  const Run ok = run("check sphere --points 20");
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["pass"] == true);

  const Run strict = run("check sphere --points 20 --tol 1e-18");
  CHECK(strict.code == 1);
  CHECK(json::parse(strict.out)["pass"] == false);
  CHECK(stderr_of("check sphere --points 20 --tol 1e-18").find("FAIL") != std::string::npos);

  CHECK(run("check nosuch").code == 2);
  CHECK(run("check sphere --bogus").code == 2);
  CHECK(run("check sphere --order 2").code == 2);
  CHECK(run("check sphere --points 0").code == 2);
  CHECK(run("check sphere --param q=1").code == 2);
  CHECK(run("check").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("check sphere --seed abc").code == 2);
  CHECK(run("check sphere", "BRACKETGEO_SEED=x").code == 2);
  CHECK(run("invariants sphere --functions 'u1+'").code == 2);
}

TEST_CASE("check output is deterministic apart from timing") {
  const Run a = run("check torus --points 15 --seed 7");
  const Run b = run("check torus --points 15 --seed 7");
  const Run c = run("check torus --points 15 --seed 7 --threads 3");
  REQUIRE(a.code == 0);
  const std::string ta = bracketgeo::to_json_text(bracketgeo::without_timing(json::parse(a.out)));
  CHECK(ta == bracketgeo::to_json_text(bracketgeo::without_timing(json::parse(b.out))));
  CHECK(ta == bracketgeo::to_json_text(bracketgeo::without_timing(json::parse(c.out))));
  const Run d = run("check torus --points 15 --seed 8");
  CHECK(ta != bracketgeo::to_json_text(bracketgeo::without_timing(json::parse(d.out))));
}

TEST_CASE("seed comes from the flag, then the environment, then 42") {
  const auto seed_of = [](const Run& r) { return json::parse(r.out)["seed"].get<std::uint64_t>(); };
  CHECK(seed_of(run("check sphere --points 3")) == 42);
  CHECK(seed_of(run("check sphere --points 3", "BRACKETGEO_SEED=5")) == 5);
  CHECK(seed_of(run("check sphere --points 3 --seed 9", "BRACKETGEO_SEED=5")) == 9);
}

TEST_CASE("invariants tables") {
  const Run grid = run("invariants torus --grid 10x10");
  REQUIRE(grid.code == 0);
  CHECK(count_lines(grid.out) == 101);
  CHECK(header(grid.out).rfind("u1,u2,gamma2,epsilon,S,", 0) == 0);
  CHECK(header(grid.out).find("_hat") == std::string::npos);

  const Run fn = run("invariants sphere --points 5 --functions 'cos(u1)'");
  REQUIRE(fn.code == 0);
  std::istringstream rows(fn.out);
  std::string line;
  std::getline(rows, line);
  CHECK(line.find("f1_hat") != std::string::npos);
  CHECK(line.find("f1_oracle") != std::string::npos);

  const Run js = run("invariants sphere --points 4 --format json --functions 'x3, x1^2'");
  REQUIRE(js.code == 0);
  const json t = json::parse(js.out);
  CHECK(t["rows"].size() == 4);
  bool has_f2 = false;
  for (const auto& c : t["columns"]) has_f2 = has_f2 || c == "f2_oracle";
  CHECK(has_f2);

  CHECK(run("invariants torus --grid 10x0").code == 2);
  CHECK(run("invariants torus --grid 10").code == 2);
}

TEST_CASE("the Laplacian of cos(u1) on the unit sphere") {
  const Run r = run("invariants sphere --points 6 --format json --functions 'cos(u1)'");
  REQUIRE(r.code == 0);
  const json t = json::parse(r.out);
  int col_u1 = -1, col_hat = -1, col_oracle = -1;
  for (int i = 0; i < static_cast<int>(t["columns"].size()); ++i) {
    const std::string c = t["columns"][static_cast<std::size_t>(i)];
    if (c == "u1") col_u1 = i;
    if (c == "f1_hat") col_hat = i;
    if (c == "f1_oracle") col_oracle = i;
  }
  REQUIRE(col_u1 >= 0);
  for (const auto& row : t["rows"]) {
    const double expected = -2 * std::cos(row[static_cast<std::size_t>(col_u1)].get<double>());
    CHECK(row[static_cast<std::size_t>(col_hat)].get<double>() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(row[static_cast<std::size_t>(col_oracle)].get<double>() == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("output files and csv check tables") {
  const std::string path = "cli_test_output.csv";
  std::remove(path.c_str());
  const Run r = run("check sphere --points 5 --format csv --output " + path);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(count_lines(ss.str()) == 6);
  std::remove(path.c_str());
}

TEST_CASE("configured manifolds") {
  const Run ok = run("check --points 10 --config " + kData + "/sphere_custom.json");
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["manifold"]["source"] == "config");

  CHECK(run("check --points 10 --config " + kData + "/distorted_s2xs2.json").code == 2);
  const Run forced = run("check --points 5 --force --config " + kData + "/distorted_s2xs2.json");
  CHECK(forced.code == 1);
  const json rep = json::parse(forced.out);
  CHECK(rep["maxima"]["pgdef"].get<double>() > 1e-3);

  CHECK(run("check sphere --config " + kData + "/sphere_custom.json").code == 2);
  CHECK(run("check --config " + kData + "/missing.json").code == 2);
}

TEST_CASE("compare reports agreement and timing") {
  const Run r = run("compare s3_nambu --points 5");
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["quantities"]["scalar_curvature"]["max_abs"].get<double>() < 1e-10);
  CHECK(rep["quantities"]["fast_path_projection"]["max_abs"].get<double>() < 1e-12);
  CHECK(rep["timing"].contains("bracket_fast_path_seconds"));

  const Run csv = run("compare sphere --points 3 --format csv");
  CHECK(header(csv.out) == "quantity,max_abs,max_rel");
}

TEST_CASE("list") {
  const Run text = run("list");
  CHECK(text.code == 0);
  for (const char* name : {"sphere", "torus", "hyperbolic", "s3_nambu", "s2xs2", "indefinite_s2xs2", "clifford_torus", "para_plane"})
    CHECK(text.out.find(name) != std::string::npos);
  const json js = json::parse(run("list --format json").out);
  CHECK(js.size() >= 8);
  CHECK(run("list --format xml").code == 2);
}
