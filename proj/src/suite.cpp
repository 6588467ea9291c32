#include "bracketgeo/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "bracketgeo/error.hpp"
#include "bracketgeo/flat.hpp"
#include "bracketgeo/geometry.hpp"
#include "bracketgeo/oracle.hpp"
#include "bracketgeo/validation.hpp"

namespace bracketgeo {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

double max_abs(std::span<const double> v) {
  double r = 0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

double rel(double diff, double ref) { return diff / std::max(1.0, std::abs(ref)); }

void bump(std::map<std::string, double>& m, const std::string& key, double v) {
  auto [it, fresh] = m.try_emplace(key, v);
  if (!fresh) it->second = std::max(it->second, v);
}

// Deterministic per-point stream, independent of scheduling.
class PointRng {
 public:
  PointRng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index), 0x5eedu};
    gen_.seed(seq);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

std::vector<Expr> parse_functions(const EmbeddedManifold& mfld, const std::vector<std::string>& texts) {
  std::vector<Expr> out;
  for (const auto& t : texts) out.push_back(parse_field_expr(mfld, t));
  return out;
}

std::vector<std::string> function_texts(const EmbeddedManifold& mfld, const RunOptions& options) {
  return options.functions.empty() ? default_check_functions(mfld) : options.functions;
}

std::vector<Field> declared_normals(const EmbeddedManifold& mfld, const PointFrame& frame) {
  std::vector<Field> out;
  if (!mfld.normals) return out;
  for (const auto& nv : *mfld.normals) {
    Field f;
    for (const auto& e : nv) f.push_back(eval_field_expr(e, frame.chart(), frame.x()));
    out.push_back(std::move(f));
  }
  return out;
}

Field basis_field(const PointFrame& frame, int a) {
  Field f;
  for (const auto& xi : frame.x()) f.push_back(xi.derivative(a));
  return f;
}

std::vector<double> unit_chart(int n, int a) {
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(a)] = 1.0;
  return e;
}

json ricci_summary(const Oracle& o, const ConnectionContext& ctx, std::vector<double>& chart_ricci) {
  const int n = ctx.n();
  Eigen::MatrixXd ric(n, n), g(n, n);
  std::vector<std::vector<double>> e;
  for (int a = 0; a < n; ++a) e.push_back(o.basis(a));
  const auto rt = ricci_tensor(ctx);
  const int m = ctx.m();
  chart_ricci.clear();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0;
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) s += rt[static_cast<std::size_t>(j * m + l)] * e[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
      ric(a, b) = s;
      g(a, b) = o.metric().value(a, b);
      if (a <= b) chart_ricci.push_back(s);
    }
  const Eigen::MatrixXd op = g.inverse() * ric;
  Eigen::EigenSolver<Eigen::MatrixXd> es(op, false);
  std::vector<double> ev;
  for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()[i].real());
  std::sort(ev.begin(), ev.end());
  return {{"eigenvalues", ev}, {"min", ev.front()}, {"max", ev.back()}};
}

struct PointOutcome {
  bool skipped = false;
  std::string reason;
  json record;
  std::map<std::string, double> residuals;
};

PointOutcome check_point(const Subject& subject, const ChartPoint& u, std::size_t index, const RunOptions& options,
                         const std::vector<std::string>& fnames, const std::vector<Expr>& functions) {
  const EmbeddedManifold& mf = subject.manifold;
  PointOutcome out;
  std::map<std::string, double>& res = out.residuals;
  ConnectionContext ctx(mf, u, {options.order, options.fast_path});
  const PointFrame& frame = ctx.frame();
  const Oracle o(mf, u, options.order);
  const int n = mf.n, m = mf.m;
  const double scale = frame.local_scale();

  json rec;
  rec["index"] = index;
  rec["u"] = u;
  rec["gamma2"] = frame.gamma2();
  rec["epsilon"] = frame.epsilon();

  // Structure and projection.
  res["pgdef"] = verify_compatibility(mf, u, options.order);
  {
    const auto p = projection_residuals(frame);
    res["idempotency"] = std::max({p.idempotency, p.eta_symmetry, p.tangent_fix, p.normal_kill, p.complement, p.trace});
  }

  std::vector<std::vector<double>> e;
  for (int a = 0; a < n; ++a) e.push_back(o.basis(a));

  if (mf.bracket.arity() == 2) {
    for (const auto& fe : functions) {
      const auto dc = d_commutator(ctx, eval_field_expr(fe, frame.chart(), frame.x()));
      bump(res, "d_commutator", dc.residual / scale);
      bump(res, "d_hypothesis", dc.hypothesis / scale);
    }
  }

  // Operators below need D to fix the coordinate tangent vectors.
  std::optional<double> s_bracket;
  try {
    json laps = json::object();
    const bool nambu = nambu_laplace_applicable(mf), kahler = kahler_laplace_applicable(mf);
    for (std::size_t k = 0; k < functions.size(); ++k) {
      const Jet f = eval_field_expr(functions[k], frame.chart(), frame.x());
      const double lo = o.laplace(f);
      json entry{{"oracle", lo}, {"hat", laplace_hat(ctx, f)}};
      double worst = rel(std::abs(entry["hat"].get<double>() - lo), lo);
      if (nambu) {
        entry["nambu"] = laplace_nambu(ctx, f);
        worst = std::max(worst, rel(std::abs(entry["nambu"].get<double>() - lo), lo));
      }
      if (kahler) {
        entry["kahler"] = laplace_kahler(ctx, f);
        worst = std::max(worst, rel(std::abs(entry["kahler"].get<double>() - lo), lo));
      }
      laps[fnames[k]] = entry;
      bump(res, "laplacian_agreement", worst);
    }
    rec["laplacians"] = laps;

    // Curvature.
    const double s_b = scalar_curvature(ctx), s_o = o.scalar_curvature();
    s_bracket = s_b;
    rec["S_bracket"] = s_b;
    rec["S_oracle"] = s_o;
    res["scalar_curvature"] = rel(std::abs(s_b - s_o), s_o);
    {
      double worst = 0, ref = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
              const double ro = o.riemann(a, b, c, d);
              ref = std::max(ref, std::abs(ro));
              worst = std::max(worst, std::abs(riemann(ctx, e[a], e[b], e[c], e[d]) - ro));
            }
      res["gauss"] = rel(worst, ref);
    }
    std::vector<double> chart_ricci;
    rec["ricci"] = ricci_summary(o, ctx, chart_ricci);

    // Second fundamental form.
    {
      double worst = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const auto ab = second_fundamental(ctx, e[a], e[b]);
          const auto ba = second_fundamental(ctx, e[b], e[a]);
          const double size = std::max(1.0, max_abs(ab));
          worst = std::max(worst, max_diff(ab, ba) / size);
          worst = std::max(worst, max_abs(frame.project_tangent(ab)) / size);
          worst = std::max(worst, nablah_d_symmetry(ctx, e[a], e[b]) / scale);
          worst = std::max(worst, max_diff(ab, o.second_fundamental(a, b)) / size);
        }
      res["alpha_symmetry"] = worst;
    }

    // Normal frames: declared (when present) and Gram-Schmidt.
    std::vector<std::pair<std::string, std::vector<Field>>> frames;
    if (mf.normals) {
      auto dn = declared_normals(mf, frame);
      double off = 0;
      for (const auto& nv : dn) off = std::max(off, max_abs(frame.project_tangent(values(nv))) / std::max(1.0, max_abs(values(nv))));
      res["declared_normals"] = off;
      if (off <= kCharacterTolerance) frames.emplace_back("declared", std::move(dn));
    }
    frames.emplace_back("gram_schmidt", gram_schmidt_normals(ctx));

    std::vector<Field> tangent_fields;
    for (int a = 0; a < n; ++a) tangent_fields.push_back(basis_field(frame, a));

    for (const auto& [label, normals] : frames) {
      for (const auto& nv : normals) {
        const auto b = weingarten_b(ctx, nv);
        const auto nval = values(nv);
        double w = 0;
        for (int a = 0; a < n; ++a) {
          const auto xc = unit_chart(n, a);
          const auto dn = o.ambient_derivative(xc, nv);
          const auto bx = apply_b(ctx, b, e[a]);
          // B_N(X) = W_N(X) = -(tangential part of the ambient derivative of N).
          auto wn = o.tangential(dn);
          for (auto& v : wn) v = -v;
          w = std::max(w, max_diff(bx, wn));
          // eta(B_N(N'), X) = -eta(normal part of the ambient derivative of N, N').
          const auto perp = o.normal_part(dn);
          for (const auto& other : normals) {
            const auto ov = values(other);
            w = std::max(w, std::abs(frame.inner(apply_b(ctx, b, ov), e[a]) + frame.inner(perp, ov)));
          }
          // eta(alpha(X, Y), N) = eta(B_N(X), Y).
          for (int c = 0; c < n; ++c) w = std::max(w, std::abs(frame.inner(second_fundamental(ctx, e[a], e[c]), nval) - frame.inner(bx, e[c])));
        }
        bump(res, "weingarten", w / scale);

        const CodazziTerms terms(ctx, nv);
        double cod = 0, forms = 0;
        for (int a = 0; a < n; ++a)
          for (int bb = a + 1; bb < n; ++bb)
            for (int c = 0; c < n; ++c) {
              cod = std::max(cod, std::abs(terms.residual(e[a], e[bb], e[c])));
              if (label != frames.front().first) continue;
              const double bf = terms.b_form(e[a], e[bb], e[c]);
              const double af = codazzi_alpha_form(ctx, tangent_fields[a], tangent_fields[bb], tangent_fields[c], nv);
              forms = std::max(forms, std::abs(af - bf));
            }
        bump(res, "codazzi", cod / scale);
        bump(res, "codazzi_forms", forms / scale);
      }
    }

    // Commutator of hat-nabla against the ambient curvature.
    {
      PointRng rng(options.seed, index);
      double worst = 0;
      for (int trial = 0; trial < 2; ++trial) {
        std::vector<double> r1(static_cast<std::size_t>(m)), r2(static_cast<std::size_t>(m));
        for (auto& v : r1) v = rng.uniform(-1, 1);
        for (auto& v : r2) v = rng.uniform(-1, 1);
        const auto x = frame.project_tangent(r1), y = frame.project_tangent(r2);
        Field uf;
        for (int k = 0; k < m; ++k) {
          Jet c = Jet::constant(rng.uniform(-1, 1), n, options.order);
          for (int l = 0; l < m; ++l) c += rng.uniform(-1, 1) * frame.x()[static_cast<std::size_t>(l)];
          c += rng.uniform(-1, 1) * frame.x()[static_cast<std::size_t>(k)] * frame.x()[static_cast<std::size_t>((k + 1) % m)];
          uf.push_back(std::move(c));
        }
        worst = std::max(worst, curvature_commutator(ctx, x, y, uf));
      }
      res["curvature_commutator"] = worst / scale;
    }

    // Explicit formulas for a diagonal ambient metric.
    if (mf.ambient.is_diagonal()) {
      const FlatPath fp(frame);
      double worst = 0;
      auto cmp = [&](double a, double b) { worst = std::max(worst, rel(std::abs(a - b), b)); };
      auto cmpv = [&](std::span<const double> a, std::span<const double> b) {
        for (std::size_t i = 0; i < a.size(); ++i) cmp(a[i], b[i]);
      };
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) cmp(fp.d(i, k).value(), frame.d(i, k).value());
      cmp(fp.scalar_curvature(), s_b);
      for (const auto& f_expr : functions) {
        const Jet f = eval_field_expr(f_expr, frame.chart(), frame.x());
        const Field g = hat_grad(ctx, f);
        cmpv(values(fp.grad(f)), values(g));
        cmp(fp.divergence(g), divergence(ctx, g));
        cmp(fp.laplace(f), laplace_hat(ctx, f));
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) cmpv(fp.levi_civita(e[a], tangent_fields[b]), levi_civita(ctx, e[a], tangent_fields[b]));
      for (const auto& nv : frames.back().second) {
        const auto b = weingarten_b(ctx, nv);
        const CodazziTerms terms(ctx, nv);
        for (int a = 0; a < n; ++a) cmpv(fp.weingarten(nv, e[a]), apply_b(ctx, b, e[a]));
        for (int a = 0; a < n; ++a)
          for (int bb = a + 1; bb < n; ++bb)
            for (int c = 0; c < n; ++c) cmp(fp.codazzi(e[a], e[bb], e[c], nv), terms.residual(e[a], e[bb], e[c]));
      }
      res["flat_path"] = worst;
    }

    // Sorted-tuple contraction against the full enumeration.
    if (mf.bracket.antisymmetric()) {
      const PointFrame other(mf, u, {options.order, !options.fast_path});
      double worst = rel(std::abs(other.trace_scale().value() - frame.trace_scale().value()), frame.trace_scale().value());
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) worst = std::max(worst, rel(std::abs(other.d(i, k).value() - frame.d(i, k).value()), frame.d(i, k).value()));
      res["fast_path"] = worst;
    }
  } catch (const CharacterError& e) {
    rec["incomplete"] = e.what();
  }

  if (subject.expected) {
    const auto& ex = *subject.expected;
    double worst = frame.epsilon() == ex.epsilon ? 0.0 : 1.0;
    const double gamma = parse(ex.gamma, mf.chart_names()).eval(u);
    worst = std::max(worst, rel(std::abs(frame.gamma2() - gamma * gamma), gamma * gamma));
    if (ex.scalar_curvature && s_bracket) worst = std::max(worst, rel(std::abs(*s_bracket - *ex.scalar_curvature), *ex.scalar_curvature));
    res["expected_invariants"] = worst;
  }

  json rj = json::object();
  for (const auto& [k, v] : res) rj[k] = v;
  rec["residuals"] = rj;
  out.record = std::move(rec);
  return out;
}

template <class Work>
std::vector<PointOutcome> run_over_points(const std::vector<ChartPoint>& points, int threads, Work&& work) {
  std::vector<PointOutcome> outcomes(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      outcomes[i] = work(i);
    } catch (const DegenerateError& e) {
      outcomes[i].skipped = true;
      outcomes[i].reason = e.what();
    } catch (const CharacterError& e) {
      outcomes[i].skipped = true;
      outcomes[i].reason = e.what();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outcomes;
}

json skipped_entry(std::size_t i, const ChartPoint& u, const std::string& reason) { return {{"index", i}, {"u", u}, {"reason", reason}}; }

json manifold_block(const Subject& s) {
  json d = s.descriptor;
  d["name"] = s.manifold.name;
  d["n"] = s.manifold.n;
  d["m"] = s.manifold.m;
  return d;
}

}  // namespace

Subject builtin_subject(const std::string& name, const ParamMap& params) {
  Subject s;
  s.manifold = builtin(name, params);
  s.expected = builtin_expectations(name, params);
  json p = json::object();
  for (const auto& [k, v] : params) p[k] = v;
  s.descriptor = {{"source", "builtin"}, {"params", p}};
  return s;
}

std::vector<std::string> default_check_functions(const EmbeddedManifold& mfld) {
  std::vector<std::string> f{"x1"};
  if (mfld.m >= 2) f.push_back("x1*x2 + x" + std::to_string(mfld.m));
  return f;
}

std::vector<ChartPoint> run_points(const EmbeddedManifold& mfld, const RunOptions& options) {
  if (!options.grid.empty()) {
    if (static_cast<int>(options.grid.size()) != mfld.n) throw ConfigError("grid needs one count per chart axis (" + std::to_string(mfld.n) + ")");
    for (int c : options.grid)
      if (c < 1) throw ConfigError("grid counts must be positive");
    return grid_points(mfld.domain, options.grid);
  }
  if (options.points < 1) throw ConfigError("--points must be positive");
  return sample_points(mfld.domain, options.points, options.seed);
}

json run_check(const Subject& subject, const RunOptions& options) {
  if (options.order < 3) throw ConfigError("the residual battery needs jet order >= 3");
  const auto t0 = Clock::now();
  const auto fnames = function_texts(subject.manifold, options);
  const auto functions = parse_functions(subject.manifold, fnames);
  const auto points = run_points(subject.manifold, options);
  auto outcomes = run_over_points(points, options.threads, [&](std::size_t i) {
    return check_point(subject, points[i], i, options, fnames, functions);
  });

  json records = json::array(), skipped = json::array(), incomplete = json::array();
  std::map<std::string, double> maxima;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].skipped) {
      skipped.push_back(skipped_entry(i, points[i], outcomes[i].reason));
      continue;
    }
    if (outcomes[i].record.contains("incomplete")) incomplete.push_back(i);
    for (const auto& [k, v] : outcomes[i].residuals) bump(maxima, k, v);
    records.push_back(std::move(outcomes[i].record));
  }
  json suites = json::object(), jmax = json::object();
  bool pass = !records.empty() && incomplete.empty();
  for (const auto& [k, v] : maxima) {
    jmax[k] = v;
    const bool ok = v <= options.tolerance;
    pass = pass && ok;
    suites[k] = {{"max", v}, {"threshold", options.tolerance}, {"pass", ok}};
  }
  json report;
  report["manifold"] = manifold_block(subject);
  report["seed"] = options.seed;
  report["order"] = options.order;
  report["fast_path"] = options.fast_path;
  report["tolerance"] = options.tolerance;
  report["functions"] = fnames;
  report["points_requested"] = points.size();
  report["points_evaluated"] = records.size();
  report["skipped"] = skipped;
  report["incomplete"] = incomplete;
  report["records"] = records;
  report["maxima"] = jmax;
  report["suites"] = suites;
  report["pass"] = pass;
  report["timing"] = {{"total_seconds", seconds_since(t0)}, {"threads", options.threads}};
  return report;
}

Table check_table(const json& report) {
  Table t;
  std::vector<std::string> names;
  for (auto it = report["suites"].begin(); it != report["suites"].end(); ++it) names.push_back(it.key());
  const int n = report["manifold"]["n"].get<int>();
  t.columns.push_back("index");
  for (int a = 1; a <= n; ++a) t.columns.push_back("u" + std::to_string(a));
  for (const char* c : {"gamma2", "epsilon", "S_bracket", "S_oracle"}) t.columns.push_back(c);
  for (const auto& k : names) t.columns.push_back(k);
  for (const auto& r : report["records"]) {
    std::vector<json> row{r["index"]};
    for (const auto& v : r["u"]) row.push_back(v);
    for (const char* c : {"gamma2", "epsilon", "S_bracket", "S_oracle"}) row.push_back(r.value(c, json()));
    for (const auto& k : names) row.push_back(r["residuals"].contains(k) ? r["residuals"][k] : json());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table run_invariants(const Subject& subject, const RunOptions& options) {
  const EmbeddedManifold& mf = subject.manifold;
  if (options.order < 3) throw ConfigError("invariants need jet order >= 3");
  const auto functions = parse_functions(mf, options.functions);
  const auto points = run_points(mf, options);
  const int n = mf.n;
  const bool nambu = nambu_laplace_applicable(mf), kahler = kahler_laplace_applicable(mf);

  Table t;
  for (int a = 1; a <= n; ++a) t.columns.push_back("u" + std::to_string(a));
  for (const char* c : {"gamma2", "epsilon", "S"}) t.columns.push_back(c);
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b) t.columns.push_back("ric_" + std::to_string(a) + std::to_string(b));
  for (std::size_t k = 1; k <= functions.size(); ++k) {
    const std::string f = "f" + std::to_string(k);
    t.columns.push_back(f + "_hat");
    if (nambu) t.columns.push_back(f + "_nambu");
    if (kahler) t.columns.push_back(f + "_kahler");
    t.columns.push_back(f + "_oracle");
  }

  auto outcomes = run_over_points(points, options.threads, [&](std::size_t i) {
    const ChartPoint& u = points[i];
    ConnectionContext ctx(mf, u, {options.order, options.fast_path});
    const Oracle o(mf, u, options.order);
    std::vector<json> row;
    for (double v : u) row.push_back(v);
    row.push_back(ctx.frame().gamma2());
    row.push_back(ctx.frame().epsilon());
    row.push_back(scalar_curvature(ctx));
    std::vector<double> chart_ricci;
    ricci_summary(o, ctx, chart_ricci);
    for (double v : chart_ricci) row.push_back(v);
    for (const auto& fe : functions) {
      const Jet f = eval_field_expr(fe, ctx.frame().chart(), ctx.frame().x());
      row.push_back(laplace_hat(ctx, f));
      if (nambu) row.push_back(laplace_nambu(ctx, f));
      if (kahler) row.push_back(laplace_kahler(ctx, f));
      row.push_back(o.laplace(f));
    }
    PointOutcome po;
    po.record = json(row);
    return po;
  });
  for (auto& oc : outcomes)
    if (!oc.skipped) t.rows.push_back(oc.record.get<std::vector<json>>());
  return t;
}

json run_compare(const Subject& subject, const RunOptions& options) {
  const EmbeddedManifold& mf = subject.manifold;
  if (options.order < 3) throw ConfigError("compare needs jet order >= 3");
  const auto t0 = Clock::now();
  const auto fnames = function_texts(mf, options);
  const auto functions = parse_functions(mf, fnames);
  const auto points = run_points(mf, options);
  const int n = mf.n;
  const bool nambu = nambu_laplace_applicable(mf), kahler = kahler_laplace_applicable(mf);
  const bool fast = mf.bracket.antisymmetric();

  struct Dev {
    double abs = 0, rel = 0;
  };
  struct Result {
    std::map<std::string, Dev> dev;
    double t_oracle = 0, t_bracket = 0, t_fast = 0;
  };
  std::vector<Result> results(points.size());

  auto outcomes = run_over_points(points, options.threads, [&](std::size_t i) {
    const ChartPoint& u = points[i];
    Result& r = results[i];
    auto note = [&](const std::string& key, double value, double ref) {
      const double d = std::abs(value - ref);
      Dev& dv = r.dev[key];
      dv.abs = std::max(dv.abs, d);
      dv.rel = std::max(dv.rel, std::abs(ref) > 1e-12 ? d / std::abs(ref) : d);
    };

    auto ta = Clock::now();
    const Oracle o(mf, u, options.order);
    const double s_o = o.scalar_curvature();
    std::vector<double> lap_o, riem_o;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) riem_o.push_back(o.riemann(a, b, c, d));
    for (const auto& fe : functions) {
      const auto chart = chart_jets(u, options.order);
      const auto x = embedding_jets(mf, u, options.order);
      lap_o.push_back(o.laplace(eval_field_expr(fe, chart, x)));
    }
    r.t_oracle = seconds_since(ta);

    std::vector<std::vector<double>> e;
    for (int a = 0; a < n; ++a) e.push_back(o.basis(a));

    auto bracket_side = [&](bool fast_path, bool record) {
      ConnectionContext ctx(mf, u, {options.order, fast_path});
      const double s_b = scalar_curvature(ctx);
      std::vector<double> riem, laps;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) riem.push_back(riemann(ctx, e[a], e[b], e[c], e[d]));
      for (std::size_t k = 0; k < functions.size(); ++k) {
        const Jet f = eval_field_expr(functions[k], ctx.frame().chart(), ctx.frame().x());
        laps.push_back(laplace_hat(ctx, f));
        if (record) {
          if (nambu) note("laplacian_nambu[" + fnames[k] + "]", laplace_nambu(ctx, f), lap_o[k]);
          if (kahler) note("laplacian_kahler[" + fnames[k] + "]", laplace_kahler(ctx, f), lap_o[k]);
          const auto g = values(hat_grad(ctx, f));
          const auto go = o.gradient(f);
          for (int j = 0; j < mf.m; ++j) note("gradient[" + fnames[k] + "]", g[static_cast<std::size_t>(j)], go[static_cast<std::size_t>(j)]);
        }
      }
      if (record) {
        note("scalar_curvature", s_b, s_o);
        for (std::size_t q = 0; q < riem.size(); ++q) note("riemann", riem[q], riem_o[q]);
        for (std::size_t k = 0; k < functions.size(); ++k) note("laplacian_hat[" + fnames[k] + "]", laps[k], lap_o[k]);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const auto al = second_fundamental(ctx, e[a], e[b]);
            const auto ao = o.second_fundamental(a, b);
            for (int j = 0; j < mf.m; ++j) note("second_fundamental", al[static_cast<std::size_t>(j)], ao[static_cast<std::size_t>(j)]);
          }
      }
      return std::make_pair(ctx.frame().d_values(), s_b);
    };

    auto tb = Clock::now();
    const auto naive = bracket_side(false, true);
    r.t_bracket = seconds_since(tb);
    if (fast) {
      auto tf = Clock::now();
      const auto sorted = bracket_side(true, false);
      r.t_fast = seconds_since(tf);
      for (std::size_t q = 0; q < naive.first.size(); ++q) note("fast_path_projection", sorted.first[q], naive.first[q]);
      note("fast_path_scalar_curvature", sorted.second, naive.second);
    }
    return PointOutcome{};
  });

  std::map<std::string, Dev> total;
  double t_o = 0, t_b = 0, t_f = 0;
  json skipped = json::array();
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (outcomes[i].skipped) {
      skipped.push_back(skipped_entry(i, points[i], outcomes[i].reason));
      continue;
    }
    ++evaluated;
    for (const auto& [k, d] : results[i].dev) {
      Dev& t = total[k];
      t.abs = std::max(t.abs, d.abs);
      t.rel = std::max(t.rel, d.rel);
    }
    t_o += results[i].t_oracle;
    t_b += results[i].t_bracket;
    t_f += results[i].t_fast;
  }
  json q = json::object();
  for (const auto& [k, d] : total) q[k] = {{"max_abs", d.abs}, {"max_rel", d.rel}};
  json report;
  report["manifold"] = manifold_block(subject);
  report["seed"] = options.seed;
  report["order"] = options.order;
  report["functions"] = fnames;
  report["points_requested"] = points.size();
  report["points_evaluated"] = evaluated;
  report["skipped"] = skipped;
  report["quantities"] = q;
  json timing{{"oracle_seconds", t_o}, {"bracket_seconds", t_b}, {"total_seconds", seconds_since(t0)}};
  if (fast) timing["bracket_fast_path_seconds"] = t_f;
  report["timing"] = timing;
  return report;
}

Table compare_table(const json& report) {
  Table t;
  t.columns = {"quantity", "max_abs", "max_rel"};
  for (auto it = report["quantities"].begin(); it != report["quantities"].end(); ++it)
    t.rows.push_back({it.key(), it.value()["max_abs"], it.value()["max_rel"]});
  return t;
}

}  // namespace bracketgeo
