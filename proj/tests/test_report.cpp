#include <doctest.h>

#include <cmath>
#include <limits>

#include "bracketgeo/report.hpp"

using namespace bracketgeo;
using nlohmann::json;

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2.0");
  CHECK(format_double(-3.0) == "-3.0");
  CHECK(format_double(1e-20) == "9.9999999999999995e-21");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "null");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "null");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("json text is sorted, indented and round-trips") {
  json doc = {{"zeta", 1.5}, {"alpha", {{"b", json::array({1.0, 2, "x"})}, {"a", true}}}, {"nan", std::nan("")}, {"empty", json::array()}};
  const std::string text = to_json_text(doc);
  CHECK(text ==
        "{\n"
        "  \"alpha\": {\n"
        "    \"a\": true,\n"
        "    \"b\": [1.0, 2, \"x\"]\n"
        "  },\n"
        "  \"empty\": [],\n"
        "  \"nan\": null,\n"
        "  \"zeta\": 1.5\n"
        "}\n");
  const json back = json::parse(text);
  CHECK(back["zeta"] == 1.5);
  CHECK(back["nan"].is_null());
}

TEST_CASE("timing members are removed at any depth") {
  const json doc = {{"timing", 1}, {"a", {{"timing", {{"x", 1}}}, {"keep", 2}}}, {"list", json::array({json{{"timing", 3}, {"v", 4}}})}};
  const json stripped = without_timing(doc);
  CHECK(stripped == json{{"a", {{"keep", 2}}}, {"list", json::array({json{{"v", 4}}})}});
}

TEST_CASE("csv quoting and missing values") {
  Table t;
  t.columns = {"name", "value", "note"};
  t.rows.push_back({"plain", 0.5, json()});
  t.rows.push_back({"a,b", std::nan(""), "say \"hi\""});
  t.rows.push_back({"int", 3, true});
  CHECK(to_csv(t) ==
        "name,value,note\n"
        "plain,0.5,\n"
        "\"a,b\",,\"say \"\"hi\"\"\"\n"
        "int,3,true\n");
  const json j = table_to_json(t);
  CHECK(j["columns"].size() == 3);
  CHECK(j["rows"].size() == 3);
}
