#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bracketgeo/config.hpp"
#include "bracketgeo/error.hpp"
#include "bracketgeo/manifolds.hpp"
#include "bracketgeo/report.hpp"
#include "bracketgeo/suite.hpp"

namespace {

using namespace bracketgeo;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string manifold;
  std::string config;
  std::vector<std::string> params;
  int points = 100;
  std::string seed;
  double tolerance = 1e-7;
  std::string grid;
  std::vector<std::string> functions;
  std::string format = "json";
  std::string output;
  bool force = false;
  int order = 3;
  int threads = 1;
  bool fast_path = false;
};

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(origin + " must be a non-negative integer, got '" + text + "'");
  return v;
}

std::uint64_t resolve_seed(const CommonArgs& args) {
  if (!args.seed.empty()) return parse_seed(args.seed, "--seed");
  if (const char* env = std::getenv("BRACKETGEO_SEED"); env && *env) return parse_seed(env, "BRACKETGEO_SEED");
  return 42;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cur, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cur.size() || v < 1) throw ConfigError("--grid expects counts like 10x10, got '" + text + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == 'x' || c == 'X' || c == ',')
      flush();
    else
      cur += c;
  }
  flush();
  return out;
}

// Splits on commas outside parentheses.
std::vector<std::string> split_functions(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    int depth = 0;
    std::string cur;
    auto flush = [&] {
      const auto b = cur.find_first_not_of(" \t");
      if (b != std::string::npos) out.push_back(cur.substr(b, cur.find_last_not_of(" \t") - b + 1));
      cur.clear();
    };
    for (char c : item) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0)
        flush();
      else
        cur += c;
    }
    flush();
  }
  return out;
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

Subject resolve_subject(const CommonArgs& args, std::uint64_t seed) {
  if (!args.config.empty()) {
    if (!args.manifold.empty()) throw ConfigError("give either a builtin name or --config, not both");
    if (!args.params.empty()) throw ConfigError("--param applies to builtin manifolds only");
    ConfigOptions copts;
    copts.force = args.force;
    copts.seed = seed;
    copts.order = std::max(args.order, 3);
    Subject s;
    s.manifold = load_config(args.config, copts);
    s.descriptor = {{"source", "config"}, {"path", args.config}};
    return s;
  }
  if (args.manifold.empty()) throw ConfigError("no manifold given; name a builtin (see 'list') or pass --config");
  return builtin_subject(args.manifold, parse_params(args.params));
}

RunOptions run_options(const CommonArgs& args, std::uint64_t seed) {
  RunOptions o;
  o.points = args.points;
  o.seed = seed;
  o.tolerance = args.tolerance;
  o.order = args.order;
  o.threads = args.threads;
  o.fast_path = args.fast_path;
  o.functions = split_functions(args.functions);
  if (!args.grid.empty()) o.grid = parse_grid(args.grid);
  if (o.threads < 1) throw ConfigError("--threads must be at least 1");
  return o;
}

void emit(const CommonArgs& args, const std::string& text) {
  if (args.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(args.output, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + args.output + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + args.output + "'");
}

void warn_skipped(const json& report) {
  const auto& skipped = report["skipped"];
  if (skipped.empty()) return;
  std::cerr << "warning: skipped " << skipped.size() << " point(s):";
  for (const auto& s : skipped) std::cerr << "\n  #" << s["index"].get<std::size_t>() << ": " << s["reason"].get<std::string>();
  std::cerr << "\n";
}

int cmd_check(const CommonArgs& args) {
  const auto seed = resolve_seed(args);
  const Subject subject = resolve_subject(args, seed);
  const json report = run_check(subject, run_options(args, seed));
  warn_skipped(report);
  emit(args, args.format == "csv" ? to_csv(check_table(report)) : to_json_text(report));
  if (!report["pass"].get<bool>()) {
    for (auto it = report["suites"].begin(); it != report["suites"].end(); ++it)
      if (!it.value()["pass"].get<bool>())
        std::cerr << "FAIL " << it.key() << ": max " << format_double(it.value()["max"].get<double>()) << " > "
                  << format_double(it.value()["threshold"].get<double>()) << "\n";
    if (report["points_evaluated"].get<std::size_t>() == 0) std::cerr << "FAIL no point could be evaluated\n";
    if (!report["incomplete"].empty())
      std::cerr << "FAIL " << report["incomplete"].size() << " point(s) stopped early because D does not fix the tangent vectors\n";
    return kExitFail;
  }
  return kExitPass;
}

int cmd_invariants(const CommonArgs& args) {
  const auto seed = resolve_seed(args);
  const Subject subject = resolve_subject(args, seed);
  RunOptions options = run_options(args, seed);
  const Table table = run_invariants(subject, options);
  const std::size_t expected = run_points(subject.manifold, options).size();
  if (table.rows.size() < expected) std::cerr << "warning: skipped " << expected - table.rows.size() << " degenerate point(s)\n";
  emit(args, args.format == "csv" ? to_csv(table) : to_json_text(table_to_json(table)));
  return kExitPass;
}

int cmd_compare(const CommonArgs& args) {
  const auto seed = resolve_seed(args);
  const Subject subject = resolve_subject(args, seed);
  const json report = run_compare(subject, run_options(args, seed));
  warn_skipped(report);
  emit(args, args.format == "csv" ? to_csv(compare_table(report)) : to_json_text(report));
  return kExitPass;
}

int cmd_list(const std::string& format) {
  if (format == "json") {
    json out = json::array();
    for (const auto& info : builtin_registry()) {
      json params = json::array();
      for (const auto& p : info.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
      out.push_back({{"name", info.name}, {"summary", info.summary}, {"params", params}});
    }
    std::cout << to_json_text(out);
    return kExitPass;
  }
  if (format == "csv") {
    Table t;
    t.columns = {"name", "summary", "params"};
    for (const auto& info : builtin_registry()) {
      std::string p;
      for (const auto& q : info.params) p += (p.empty() ? "" : " ") + q.name + "=" + q.default_value;
      t.rows.push_back({info.name, info.summary, p});
    }
    std::cout << to_csv(t);
    return kExitPass;
  }
  for (const auto& info : builtin_registry()) {
    std::cout << info.name << "\n  " << info.summary << "\n";
    for (const auto& p : info.params) std::cout << "  --param " << p.name << "=" << p.default_value << "  " << p.description << "\n";
  }
  return kExitPass;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_tol, bool with_grid) {
  cmd->add_option("manifold", args.manifold, "Builtin manifold name");
  cmd->add_option("--config", args.config, "JSON manifold description");
  cmd->add_option("--param", args.params, "Builtin parameter as key=value (repeatable)");
  cmd->add_option("--points", args.points, "Number of sample points")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "Sampling seed (default: BRACKETGEO_SEED or 42)");
  if (with_tol) cmd->add_option("--tol", args.tolerance, "Residual tolerance")->check(CLI::NonNegativeNumber);
  if (with_grid) cmd->add_option("--grid", args.grid, "Grid counts per chart axis, e.g. 10x10");
  cmd->add_option("--functions", args.functions, "Comma-separated test functions in u1..un and x1..xm");
  cmd->add_option("--format", args.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", args.output, "Write output to this file");
  cmd->add_flag("--force", args.force, "Skip structure validation of configured manifolds");
  cmd->add_option("--order", args.order, "Jet truncation order")->check(CLI::Range(1, 8));
  cmd->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--fast-path", args.fast_path, "Use the sorted-tuple contraction for antisymmetric brackets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bracket-based geometry of embedded submanifolds"};
  app.require_subcommand(1);

  std::string list_format = "text";
  auto* list = app.add_subcommand("list", "List builtin manifolds and their parameters");
  list->add_option("--format", list_format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));

  CommonArgs check_args, inv_args, cmp_args;
  auto* check = app.add_subcommand("check", "Run the residual battery; exit 0 iff every suite passes");
  add_common(check, check_args, true, true);
  auto* inv = app.add_subcommand("invariants", "Tabulate curvature and Laplacians at sample or grid points");
  add_common(inv, inv_args, false, true);
  inv_args.format = "csv";
  auto* cmp = app.add_subcommand("compare", "Compare bracket-side quantities against the coordinate pipeline");
  add_common(cmp, cmp_args, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*list) return cmd_list(list_format);
    if (*check) return cmd_check(check_args);
    if (*inv) return cmd_invariants(inv_args);
    if (*cmp) return cmd_compare(cmp_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
