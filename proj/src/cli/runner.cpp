#include "holo/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "holo/chen.hpp"
#include "holo/cli/output.hpp"
#include "holo/cli/scenario.hpp"
#include "holo/errors.hpp"
#include "holo/groupoid.hpp"
#include "holo/presets.hpp"
#include "holo/transport.hpp"

namespace holo::cli {

namespace {

const std::map<std::string, std::vector<std::string>>& command_checks() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"transport", {"transport"}},
      {"holonomy", {"holonomy"}},
      {"curvature", {"curvature"}},
      {"wilson", {"wilson-base-point", "wilson-gauge"}},
      {"gen-wilson", {"gen-wilson-term0", "gen-wilson-oracle"}},
      {"flatness", {"flatness"}},
      {"groupoid-check", {"groupoid"}}};
  return table;
}

// Evaluates fn(0..count-1) on up to `jobs` threads; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct NamedLoop {
  int id;
  SampledCurve curve;
};

struct NamedFamily {
  int id;
  LoopFamily family;
  BasePointMode mode;
};

// Everything built from a scenario before any check runs.
struct Context {
  Scenario scenario;
  GroupSpec spec = GroupSpec::u1();
  std::optional<BundleSetup> setup;
  std::optional<Representation> rho;
  std::optional<AdjointForm> form;
  std::vector<NamedLoop> loops;
  std::vector<NamedFamily> families;
  TransportOptions transport;
  ChenOptions chen;
  int order = 6;
  bool oracle = false;
  int jobs = 1;
  std::uint64_t seed = 0;

  std::vector<const NamedLoop*> closed_loops() const {
    std::vector<const NamedLoop*> out;
    for (const auto& l : loops)
      if (l.curve.is_loop()) out.push_back(&l);
    return out;
  }
};

AlgebraElement algebra_from(const GroupSpec& spec, const std::vector<double>& coords, const std::string& what) {
  if (static_cast<int>(coords.size()) != spec.algebra_dim())
    throw ScenarioError(what + " needs " + std::to_string(spec.algebra_dim()) + " algebra coordinates");
  return AlgebraElement::from_coords(spec, Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size())));
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SampledCurve build_loop(const LoopSpec& l, const std::shared_ptr<const Atlas>& atlas) {
  const Eigen::Vector2d c(l.centre[0], l.centre[1]);
  if (l.preset == "circle") return circle_loop(atlas, c, l.radius, l.winding, l.phase);
  if (l.preset == "ellipse") return ellipse_loop(atlas, c, l.a, l.b, l.phase);
  if (l.preset == "arc") return circle_arc(atlas, c, l.radius, l.from, l.to);
  if (l.preset == "latitude") return latitude_loop(atlas, l.theta, l.winding);
  if (l.preset == "tilted") return tilted_circle(atlas, l.radius, l.tilt, l.phase);
  if (l.preset == "circle-angle") return circle_angle_loop(atlas, l.winding);
  std::vector<Eigen::VectorXd> vertices;
  for (const auto& p : l.points) vertices.push_back(vec(p));
  return SampledCurve::polygon(atlas, 0, vertices);
}

LoopFamily build_family(const FamilySpec& f, const std::shared_ptr<const Atlas>& atlas) {
  if (f.preset == "radial") return radial_family(atlas, f.r0, f.r1, f.winding);
  if (f.preset == "wobble") return wobble_family(atlas);
  if (f.preset == "crossing") return crossing_family(atlas);
  return latitude_family(atlas, f.theta0, f.theta1);
}

Context build_context(const RunOptions& options) {
  Context ctx;
  ctx.scenario = load_scenario(options.scenario_path);
  const Scenario& s = ctx.scenario;
  ctx.seed = options.seed.value_or(s.seed);
  ctx.order = options.order.value_or(s.order);
  if (ctx.order < 0 || ctx.order > 8) throw ScenarioError("order must lie in 0..8");
  ctx.oracle = options.oracle;
  ctx.jobs = options.jobs;
  ctx.transport.step = options.step.value_or(s.integrator.step);
  if (!(ctx.transport.step > 0.0)) throw ScenarioError("step must be positive");
  ctx.chen.transport = ctx.transport;
  ctx.chen.panel_nodes = s.integrator.panel_nodes;
  ctx.chen.panels_per_unit = s.integrator.panels_per_unit;
  ctx.chen.simplex_nodes_low = s.integrator.simplex_nodes;

  try {
    const SetupSpec& st = s.setup;
    if (st.preset == "monopole") {
      ctx.spec = GroupSpec::u1();
      ctx.setup = monopole_setup(st.charge);
    } else {
      ctx.spec = GroupSpec::parse(st.group);
      if (st.preset == "trivial") {
        ctx.setup = trivial_setup(ctx.spec, make_atlas(st.atlas));
      } else if (st.preset == "flat-angle") {
        ctx.setup = flat_angle_setup(algebra_from(ctx.spec, st.xi, "setup.xi"));
      } else {
        ctx.setup = random_polynomial_setup(ctx.spec, st.seed.value_or(ctx.seed + 1), st.degree, st.scale);
      }
    }
    ctx.rho = parse_representation(ctx.spec, s.representation);
    const auto atlas = ctx.setup->bundle->atlas_ptr();
    for (const auto& l : s.loops) ctx.loops.push_back(NamedLoop{l.id, build_loop(l, atlas)});
    for (const auto& f : s.families)
      ctx.families.push_back(
          NamedFamily{f.id, build_family(f, atlas), f.mode == "fixed" ? BasePointMode::Fixed : BasePointMode::Moving});
    if (s.form) {
      const FormSpec& f = *s.form;
      const BundlePtr bundle = ctx.setup->bundle;
      std::optional<AdjointForm> b;
      if (f.preset == "zero") {
        b = AdjointForm::zero(bundle, 1);
      } else if (f.preset == "constant") {
        std::vector<AlgebraElement> coeffs;
        for (const auto& c : f.coefficients) coeffs.push_back(algebra_from(ctx.spec, c, "form.coefficients"));
        b = constant_form(bundle, coeffs);
      } else if (f.preset == "angle") {
        b = angle_form(bundle, algebra_from(ctx.spec, f.eta, "form.eta"));
      } else if (f.preset == "x-dy") {
        b = x_dy_form(bundle, algebra_from(ctx.spec, f.eta, "form.eta"));
      } else {
        b = random_polynomial_form(bundle, f.seed.value_or(ctx.seed + 2), f.degree, f.scale);
      }
      if (f.norm > 0.0) {
        const auto closed = ctx.closed_loops();
        if (closed.empty()) throw ScenarioError("form.norm needs a closed loop");
        const double current = form_norm_along(*b, closed.front()->curve);
        if (current > 0.0) b = b->scaled(f.norm / current);
      }
      ctx.form = *b;
    }
  } catch (const Error& e) {
    throw ScenarioError(std::string("scenario rejected: ") + e.what());
  }
  return ctx;
}

// Check names to run for a command, with tolerances.
std::vector<std::pair<std::string, double>> requested_checks(const Context& ctx, const std::string& command,
                                                             bool from_all) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& name : command_checks().at(command)) {
    const auto it = ctx.scenario.checks.find(name);
    const bool listed = it != ctx.scenario.checks.end();
    const double tol = listed ? it->second : default_tolerance(name);
    if (name == "gen-wilson-oracle") {
      if (ctx.oracle || listed) out.emplace_back(name, tol);
      continue;
    }
    if (from_all && !ctx.scenario.checks.empty() && !listed) continue;
    out.emplace_back(name, tol);
  }
  return out;
}

struct CommandResult {
  CsvTable table;
  std::vector<CheckResult> checks;
};

CheckResult make_check(const std::string& name, double residual, double tol, std::string detail = {}) {
  return CheckResult{name, residual, tol, residual <= tol, std::move(detail)};
}

std::vector<std::string> matrix_header(int n) {
  std::vector<std::string> h;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::string base = "m" + std::to_string(i) + std::to_string(j);
      h.push_back(base + "_re");
      h.push_back(base + "_im");
    }
  return h;
}

void put_matrix(CsvTable::Row& row, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) row << m(i, j);
}

std::vector<std::string> concat_header(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const NamedLoop& require_nonempty(const std::vector<const NamedLoop*>& loops, const std::string& command) {
  if (loops.empty()) throw ScenarioError(command + " needs at least one closed loop");
  return *loops.front();
}

CommandResult run_transport(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  if (ctx.loops.empty()) throw ScenarioError("transport needs at least one loop");
  const int n = ctx.spec.matrix_dim();
  CommandResult r{CsvTable(concat_header({"loop", "t0", "t1"}, concat_header(matrix_header(n), {"membership", "step_halving"}))), {}};
  const LocalConnection& a = ctx.setup->connection;
  const PrincipalBundle& bundle = *ctx.setup->bundle;
  TransportOptions half = ctx.transport;
  half.step /= 2.0;
  struct Row {
    double t;
    Matrix m;
    double membership;
    double halving;
  };
  const auto rows = parallel_map<std::vector<Row>>(ctx.loops.size(), ctx.jobs, [&](std::size_t i) {
    const SampledCurve& curve = ctx.loops[i].curve;
    const BundlePoint p = reference_point(bundle, curve.at(0.0).point);
    std::vector<Row> out;
    for (int k = 1; k <= 4; ++k) {
      const double t = k / 4.0;
      const BundlePoint q = reference_point(bundle, curve.at(t).point);
      const GroupElement full = parallel_transport(a, curve, 0.0, t, p, q, ctx.transport);
      const GroupElement fine = parallel_transport(a, curve, 0.0, t, p, q, half);
      out.push_back(Row{t, full.matrix(), group_residual(ctx.spec, full.matrix()), distance(full, fine)});
    }
    return out;
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& row : rows[i]) {
      auto& out = r.table.row();
      out << ctx.loops[i].id << 0.0 << row.t;
      put_matrix(out, row.m);
      out << row.membership << row.halving;
      worst = std::max({worst, row.membership, row.halving});
    }
  for (const auto& [name, tol] : checks) r.checks.push_back(make_check(name, worst, tol));
  return r;
}

CommandResult run_holonomy(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  const auto loops = ctx.closed_loops();
  require_nonempty(loops, "holonomy");
  const int n = ctx.spec.matrix_dim();
  CommandResult r{CsvTable(concat_header({"loop", "t0", "t1"}, concat_header(matrix_header(n), {"membership", "step_halving"}))), {}};
  const LocalConnection& a = ctx.setup->connection;
  TransportOptions half = ctx.transport;
  half.step /= 2.0;
  const auto hol = parallel_map<std::pair<GroupElement, double>>(loops.size(), ctx.jobs, [&](std::size_t i) {
    const SampledCurve& curve = loops[i]->curve;
    const BundlePoint p = reference_point(*ctx.setup->bundle, curve.at(0.0).point);
    const GroupElement h = holonomy(a, curve, p, ctx.transport);
    return std::make_pair(h, distance(h, holonomy(a, curve, p, half)));
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    auto& out = r.table.row();
    out << loops[i]->id << 0.0 << 1.0;
    put_matrix(out, hol[i].first.matrix());
    const double membership = group_residual(ctx.spec, hol[i].first.matrix());
    out << membership << hol[i].second;
    worst = std::max({worst, membership, hol[i].second});
  }
  for (const auto& [name, tol] : checks) r.checks.push_back(make_check(name, worst, tol));
  return r;
}

CommandResult run_curvature(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  const auto& points = ctx.scenario.curvature_points;
  if (points.empty()) throw ScenarioError("curvature needs curvature.points");
  const int dim = ctx.spec.algebra_dim();
  std::vector<std::string> header{"point", "chart", "x0", "x1"};
  for (int k = 0; k < dim; ++k) header.push_back("analytic_" + std::to_string(k));
  for (int k = 0; k < dim; ++k) header.push_back("estimate_" + std::to_string(k));
  header.push_back("richardson_ratio");
  header.push_back("residual");
  CommandResult r{CsvTable(header), {}};
  const LocalConnection& a = ctx.setup->connection;
  const double eps = ctx.scenario.curvature_eps;
  struct Row {
    Eigen::VectorXd analytic, estimate;
    double ratio, residual;
  };
  const auto rows = parallel_map<Row>(points.size(), ctx.jobs, [&](std::size_t i) {
    const auto& pt = points[i];
    if (pt.x.size() != 2) throw ScenarioError("curvature points need two coordinates");
    if (pt.chart < 0 || pt.chart >= ctx.setup->bundle->atlas().chart_count())
      throw ScenarioError("curvature point chart out of range");
    const Eigen::VectorXd x = vec(pt.x);
    const Eigen::VectorXd u = Eigen::Vector2d(1.0, 0.0), v = Eigen::Vector2d(0.0, 1.0);
    const Eigen::VectorXd f = curvature(a, pt.chart, x, u, v).coords();
    const Eigen::VectorXd e1 = curvature_small_loop(a, pt.chart, x, u, v, eps, ctx.transport).value.coords();
    const Eigen::VectorXd e2 = curvature_small_loop(a, pt.chart, x, u, v, eps / 2.0, ctx.transport).value.coords();
    const Eigen::VectorXd extrapolated = (4.0 * e2 - e1) / 3.0;
    const double d1 = (e1 - f).norm(), d2 = (e2 - f).norm();
    return Row{f, extrapolated, d2 > 0.0 ? d1 / d2 : std::nan(""), (extrapolated - f).norm()};
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& out = r.table.row();
    out << static_cast<int>(i) << points[i].chart << points[i].x[0] << points[i].x[1];
    for (int k = 0; k < dim; ++k) out << rows[i].analytic[k];
    for (int k = 0; k < dim; ++k) out << rows[i].estimate[k];
    out << rows[i].ratio << rows[i].residual;
    worst = std::max(worst, rows[i].residual);
  }
  for (const auto& [name, tol] : checks) r.checks.push_back(make_check(name, worst, tol));
  return r;
}

GaugeTransformation sample_gauge(const Context& ctx, std::uint64_t seed) {
  const BundlePtr& bundle = ctx.setup->bundle;
  if (bundle->atlas().chart_count() == 1 && bundle->atlas().dim() == 2)
    return random_polynomial_gauge(bundle, seed, 2, 0.5);
  Rng rng(seed);
  return GaugeTransformation::constant(bundle, random_group_element(ctx.spec, rng));
}

CommandResult run_wilson(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  const auto loops = ctx.closed_loops();
  require_nonempty(loops, "wilson");
  CommandResult r{CsvTable({"loop", "order", "term_re", "term_im", "partial_sum_re", "partial_sum_im",
                            "base_point_residual", "gauge_residual"}),
                  {}};
  const LocalConnection& a = ctx.setup->connection;
  const Representation& rho = *ctx.rho;
  struct Row {
    Complex w;
    double base, gauge;
  };
  const auto rows = parallel_map<Row>(loops.size(), ctx.jobs, [&](std::size_t i) {
    const SampledCurve& curve = loops[i]->curve;
    const BundlePoint p = reference_point(*ctx.setup->bundle, curve.at(0.0).point);
    const Complex w = wilson_loop(a, rho, curve, p, ctx.transport);
    Rng rng(ctx.seed + 100 + static_cast<std::uint64_t>(loops[i]->id));
    double base = 0.0, gauge = 0.0;
    for (int k = 0; k < ctx.scenario.samples; ++k) {
      const GroupElement g = random_group_element(ctx.spec, rng);
      base = std::max(base, std::abs(wilson_loop(a, rho, curve, p * g, ctx.transport) - w));
      const GaugeTransformation sigma = sample_gauge(ctx, rng());
      const LocalConnection as = apply_gauge_to_connection(a, sigma);
      gauge = std::max(gauge, std::abs(wilson_loop(as, rho, curve, p, ctx.transport) - w));
    }
    return Row{w, base, gauge};
  });
  double base = 0.0, gauge = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.table.row() << loops[i]->id << 0 << rows[i].w << rows[i].w << rows[i].base << rows[i].gauge;
    base = std::max(base, rows[i].base);
    gauge = std::max(gauge, rows[i].gauge);
  }
  for (const auto& [name, tol] : checks)
    r.checks.push_back(make_check(name, name == "wilson-base-point" ? base : gauge, tol));
  return r;
}

CommandResult run_gen_wilson(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  if (!ctx.form) throw ScenarioError("gen-wilson needs a form");
  const auto loops = ctx.closed_loops();
  require_nonempty(loops, "gen-wilson");
  const bool want_oracle = std::any_of(checks.begin(), checks.end(),
                                       [](const auto& c) { return c.first == "gen-wilson-oracle"; });
  CommandResult r{CsvTable({"loop", "order", "term_re", "term_im", "partial_sum_re", "partial_sum_im", "oracle_re",
                            "oracle_im", "residual"}),
                  {}};
  const BFPair pair{ctx.setup->connection, *ctx.form};
  const Representation& rho = *ctx.rho;
  struct Result {
    WilsonSeries series;
    Complex wilson;
    std::optional<Complex> oracle;
  };
  const auto results = parallel_map<Result>(loops.size(), ctx.jobs, [&](std::size_t i) {
    const SampledCurve& curve = loops[i]->curve;
    const BundlePoint p = reference_point(*ctx.setup->bundle, curve.at(0.0).point);
    Result res{gen_wilson_series(pair, rho, curve, p, ctx.order, loops[i]->id, ctx.chen),
               wilson_loop(pair.a, rho, curve, p, ctx.transport), std::nullopt};
    if (want_oracle) res.oracle = dyson_oracle(pair, rho, curve, p, ctx.transport);
    return res;
  });
  double term0 = 0.0, final_residual = 0.0;
  std::string detail;
  for (const auto& res : results) {
    term0 = std::max(term0, std::abs(res.series.terms.front() - res.wilson));
    double previous = INFINITY;
    for (int n = 0; n <= res.series.order; ++n) {
      auto& out = r.table.row();
      out << res.series.loop_id << n << res.series.terms[static_cast<std::size_t>(n)]
          << res.series.partial_sums[static_cast<std::size_t>(n)];
      if (res.oracle) {
        const double residual = std::abs(res.series.partial_sums[static_cast<std::size_t>(n)] - *res.oracle);
        out << *res.oracle << residual;
        if (!(residual < previous) && previous > 1e-13 && detail.empty())
          detail = "residual not decreasing at loop " + std::to_string(res.series.loop_id) + " order " +
                   std::to_string(n);
        previous = residual;
        if (n == res.series.order) final_residual = std::max(final_residual, residual);
      } else {
        out << "" << "" << "";
      }
    }
  }
  for (const auto& [name, tol] : checks) {
    if (name == "gen-wilson-term0") {
      r.checks.push_back(make_check(name, term0, tol));
    } else {
      CheckResult c = make_check(name, final_residual, tol, detail);
      c.pass = c.pass && detail.empty();
      r.checks.push_back(c);
    }
  }
  return r;
}

CommandResult run_flatness(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  if (ctx.families.empty()) throw ScenarioError("flatness needs at least one family");
  CommandResult r{CsvTable({"family", "mode", "slices", "deviation", "status"}), {}};
  struct Row {
    double deviation;
    std::string status;
  };
  const auto rows = parallel_map<Row>(ctx.families.size(), ctx.jobs, [&](std::size_t i) {
    const auto& f = ctx.families[i];
    const BundlePoint p = reference_point(*ctx.setup->bundle, f.family.at(0.0, 0.0).point);
    try {
      return Row{flat_homotopy_invariance(ctx.setup->connection, f.family, p, f.mode, ctx.transport), "ok"};
    } catch (const Error& e) {
      return Row{INFINITY, error_code_name(e.code())};
    }
  });
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = ctx.families[i];
    r.table.row() << f.id << (f.mode == BasePointMode::Fixed ? "fixed" : "moving") << f.family.s_resolution()
                  << rows[i].deviation << rows[i].status;
    worst = std::max(worst, rows[i].deviation);
    if (rows[i].status != "ok" && detail.empty()) detail = "family " + std::to_string(f.id) + ": " + rows[i].status;
  }
  for (const auto& [name, tol] : checks) r.checks.push_back(make_check(name, worst, tol, detail));
  return r;
}

FiniteGroupoid build_groupoid(const Context& ctx) {
  if (!ctx.scenario.groupoid) throw ScenarioError("groupoid-check needs a groupoid fixture");
  const GroupoidSpec& g = *ctx.scenario.groupoid;
  if (g.fixture == "random") return FiniteGroupoid::random(g.seed.value_or(ctx.seed + 3));
  if (g.fixture == "cyclic") return FiniteGroupoid::from_group(cyclic_group(g.order));
  if (g.fixture == "s3") return FiniteGroupoid::from_group(symmetric_group_3());
  return FiniteGroupoid::transitive(g.objects, cyclic_group(g.order));
}

CommandResult run_groupoid(const Context& ctx, const std::vector<std::pair<std::string, double>>& checks) {
  const FiniteGroupoid g = build_groupoid(ctx);
  if (g.arrow_count() > 20) throw ScenarioError("groupoid fixtures are limited to 20 arrows");
  CommandResult r{CsvTable({"check", "checked", "failures", "status"}), {}};
  std::vector<AxiomReport> reports;
  reports.push_back(check_groupoid_axioms(g, "groupoid axioms"));
  const FiniteGroupoid op = opposite_groupoid(g);
  reports.push_back(check_groupoid_axioms(op, "opposite groupoid axioms"));
  const FiniteGroupoid gg = product_groupoid(g, g);
  reports.push_back(check_groupoid_axioms(gg, "product groupoid axioms"));
  reports.push_back(check_isomorphism(g, op, inversion_morphism(g), "inversion to opposite"));
  GroupoidMorphism first, second;
  for (int a = 0; a < gg.arrow_count(); ++a) {
    first.arrows.push_back(a / g.arrow_count());
    second.arrows.push_back(a % g.arrow_count());
  }
  for (int x = 0; x < gg.object_count(); ++x) {
    first.objects.push_back(x / g.object_count());
    second.objects.push_back(x % g.object_count());
  }
  reports.push_back(check_morphism(gg, g, first, "first projection"));
  reports.push_back(check_morphism(gg, g, second, "second projection"));
  const auto actions = variant_conjugations(g);
  for (const auto& act : actions) reports.push_back(check_action_axioms(act));
  GroupoidMorphism identity;
  for (int a = 0; a < gg.arrow_count(); ++a) identity.arrows.push_back(a);
  for (int x = 0; x < gg.object_count(); ++x) identity.objects.push_back(x);
  std::vector<int> inversion;
  for (int a = 0; a < g.arrow_count(); ++a) inversion.push_back(g.inverse(a));
  reports.push_back(check_equivariant(inversion, identity, actions[0], actions[1], "inversion intertwines right conjugations"));
  reports.push_back(check_equivariant(inversion, identity, actions[2], actions[3], "inversion intertwines left conjugations"));
  std::size_t failures = 0;
  for (const auto& rep : reports) {
    r.table.row() << rep.name << static_cast<int>(rep.checked) << static_cast<int>(rep.failures)
                  << (rep.pass() ? "exact-pass" : "fail");
    failures += rep.failures;
  }
  for (const auto& [name, tol] : checks) r.checks.push_back(make_check(name, static_cast<double>(failures), tol));
  return r;
}

CommandResult dispatch(const Context& ctx, const std::string& command,
                       const std::vector<std::pair<std::string, double>>& checks) {
  if (command == "transport") return run_transport(ctx, checks);
  if (command == "holonomy") return run_holonomy(ctx, checks);
  if (command == "curvature") return run_curvature(ctx, checks);
  if (command == "wilson") return run_wilson(ctx, checks);
  if (command == "gen-wilson") return run_gen_wilson(ctx, checks);
  if (command == "flatness") return run_flatness(ctx, checks);
  return run_groupoid(ctx, checks);
}

bool has_data_for(const Context& ctx, const std::string& command) {
  if (command == "transport") return !ctx.loops.empty();
  if (command == "holonomy" || command == "wilson") return !ctx.closed_loops().empty();
  if (command == "gen-wilson") return ctx.form.has_value() && !ctx.closed_loops().empty();
  if (command == "curvature") return !ctx.scenario.curvature_points.empty();
  if (command == "flatness") return !ctx.families.empty();
  return ctx.scenario.groupoid.has_value();
}

bool listed_in_scenario(const Context& ctx, const std::string& command) {
  for (const auto& name : command_checks().at(command))
    if (ctx.scenario.checks.count(name)) return true;
  return false;
}

std::string output_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"transport", "holonomy",       "curvature", "wilson",
                                              "gen-wilson", "flatness", "groupoid-check", "all"};
  return names;
}

int run(const RunOptions& options, std::ostream& log) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    log << "error: unknown command '" << options.command << "'\n";
    return kExitValidation;
  }
  Context ctx;
  try {
    ctx = build_context(options);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  std::vector<std::string> commands;
  if (options.command == "all") {
    for (const auto& c : names) {
      if (c == "all") continue;
      if (!ctx.scenario.checks.empty() ? listed_in_scenario(ctx, c) : has_data_for(ctx, c)) commands.push_back(c);
    }
  } else {
    commands.push_back(options.command);
  }

  try {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + options.out_dir + "'");
    std::vector<CheckResult> all_checks;
    for (const auto& command : commands) {
      const auto checks = requested_checks(ctx, command, options.command == "all");
      CommandResult result{CsvTable({}), {}};
      try {
        result = dispatch(ctx, command, checks);
      } catch (const Error& e) {
        for (const auto& [name, tol] : checks)
          result.checks.push_back(CheckResult{name, INFINITY, tol, false, std::string(error_code_name(e.code())) + ": " + e.what()});
      }
      write_file(output_path(options.out_dir, command + ".csv"), result.table.str());
      write_file(output_path(options.out_dir, command + ".json"),
                 summary_json(command, ctx.scenario.name, result.checks));
      all_checks.insert(all_checks.end(), result.checks.begin(), result.checks.end());
    }
    if (options.command == "all")
      write_file(output_path(options.out_dir, "all.json"), summary_json("all", ctx.scenario.name, all_checks));
    bool pass = true;
    for (const auto& c : all_checks) {
      if (!c.pass) {
        log << "check failed: " << c.name << " residual " << format_number(c.residual) << " tolerance "
            << format_number(c.tolerance) << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
        pass = false;
      }
    }
    return pass ? kExitPass : kExitCheckFailed;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace holo::cli
