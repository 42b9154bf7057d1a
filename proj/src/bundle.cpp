#include "holo/bundle.hpp"

#include <cmath>

namespace holo {

namespace {

std::vector<Matrix> fd_partials(const ChartMatrixFn& f, const Eigen::VectorXd& x) {
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += kDerivativeStep;
    xm[k] -= kDerivativeStep;
    out.push_back((f(xp) - f(xm)) / (2.0 * kDerivativeStep));
  }
  return out;
}

std::vector<Matrix> fd_component_partials(const ChartComponentsFn& f, const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size();
  std::vector<Matrix> out(static_cast<std::size_t>(m * m));
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += kDerivativeStep;
    xm[j] -= kDerivativeStep;
    const auto fp = f(xp), fm = f(xm);
    for (Eigen::Index k = 0; k < m; ++k)
      out[static_cast<std::size_t>(j * m + k)] =
          (fp[static_cast<std::size_t>(k)] - fm[static_cast<std::size_t>(k)]) / (2.0 * kDerivativeStep);
  }
  return out;
}

Matrix inverse_of(const GroupSpec& spec, const Matrix& m) {
  if (spec.kind() == GroupKind::GLn) return m.inverse();
  return m.adjoint();
}

}  // namespace

PrincipalBundle::PrincipalBundle(std::shared_ptr<const Atlas> atlas, GroupSpec group,
                                 std::vector<Transition> transitions, std::string name)
    : atlas_(std::move(atlas)), group_(group), transitions_(std::move(transitions)), name_(std::move(name)) {
  if (!atlas_) throw Error(ErrorCode::InvalidArgument, "bundle without atlas");
  for (const auto& t : transitions_)
    if (t.from < 0 || t.to < 0 || t.from >= atlas_->chart_count() || t.to >= atlas_->chart_count() || t.from == t.to)
      throw Error(ErrorCode::InvalidArgument, "transition between invalid charts");
}

Matrix PrincipalBundle::transition_matrix(int from, int to, const Eigen::VectorXd& x_from) const {
  const int n = group_.matrix_dim();
  if (from == to) return Matrix::Identity(n, n);
  for (const auto& t : transitions_) {
    if (t.from == from && t.to == to) return t.value(x_from);
    if (t.from == to && t.to == from) {
      const ChartPoint q = atlas_->convert(ChartPoint{from, x_from}, to);
      return inverse_of(group_, t.value(q.x));
    }
  }
  return Matrix::Identity(n, n);
}

GroupElement PrincipalBundle::transition(int from, int to, const Eigen::VectorXd& x_from) const {
  return GroupElement::projected(group_, transition_matrix(from, to, x_from));
}

std::vector<Matrix> PrincipalBundle::transition_partials(int from, int to, const Eigen::VectorXd& x_from) const {
  return fd_partials([&](const Eigen::VectorXd& y) { return transition_matrix(from, to, y); }, x_from);
}

double PrincipalBundle::cocycle_residual(const std::vector<ChartPoint>& samples) const {
  double worst = 0.0;
  const int nc = atlas_->chart_count();
  for (const auto& p : samples) {
    const int u = p.chart;
    worst = std::max(worst, (transition_matrix(u, u, p.x) - Matrix::Identity(group_.matrix_dim(), group_.matrix_dim())).norm());
    for (int v = 0; v < nc; ++v) {
      auto xv = atlas_->try_convert(p, v);
      if (!xv) continue;
      for (int w = 0; w < nc; ++w) {
        if (!atlas_->try_convert(p, w)) continue;
        const Matrix lhs = transition_matrix(u, v, p.x) * transition_matrix(v, w, *xv);
        worst = std::max(worst, (lhs - transition_matrix(u, w, p.x)).norm());
      }
    }
  }
  return worst;
}

BundlePoint reference_point(const PrincipalBundle& bundle, const ChartPoint& base) {
  return BundlePoint{base.chart, base.x, GroupElement::identity(bundle.group())};
}

BundlePoint change_chart(const PrincipalBundle& bundle, const BundlePoint& p, int to) {
  if (p.chart == to) return p;
  const ChartPoint q = bundle.atlas().convert(p.base(), to);
  const Matrix t = bundle.transition_matrix(p.chart, to, p.x);
  return BundlePoint{to, q.x, GroupElement::projected(bundle.group(), inverse_of(bundle.group(), t) * p.fiber.matrix())};
}

BundlePoint operator*(const BundlePoint& p, const GroupElement& g) {
  return BundlePoint{p.chart, p.x, p.fiber * g};
}

double base_distance(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q) {
  return bundle.atlas().distance(p.base(), q.base());
}

GroupElement division_map(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q) {
  if (!(base_distance(bundle, p, q) <= kBaseTol)) throw Error(ErrorCode::BaseMismatch, "points lie in different fibres");
  const BundlePoint qa = change_chart(bundle, q, p.chart);
  return p.fiber.inverse() * qa.fiber;
}

double point_distance(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q) {
  const BundlePoint qa = change_chart(bundle, q, p.chart);
  return bundle.atlas().reduce_periodic(p.chart, qa.x - p.x).norm() + (qa.fiber.matrix() - p.fiber.matrix()).norm();
}

LocalConnection::LocalConnection(BundlePtr bundle, std::vector<ConnectionChart> charts)
    : bundle_(std::move(bundle)), charts_(std::move(charts)) {
  if (!bundle_) throw Error(ErrorCode::InvalidArgument, "connection without bundle");
  if (static_cast<int>(charts_.size()) != bundle_->atlas().chart_count())
    throw Error(ErrorCode::InvalidArgument, "connection needs one entry per chart");
}

LocalConnection LocalConnection::zero(BundlePtr bundle) {
  const int m = bundle->atlas().dim();
  const int n = bundle->group().matrix_dim();
  ConnectionChart c;
  c.components = [m, n](const Eigen::VectorXd&) {
    return std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(n, n));
  };
  c.partials = [m, n](const Eigen::VectorXd&) {
    return std::vector<Matrix>(static_cast<std::size_t>(m * m), Matrix::Zero(n, n));
  };
  std::vector<ConnectionChart> charts(static_cast<std::size_t>(bundle->atlas().chart_count()), c);
  return LocalConnection(std::move(bundle), std::move(charts));
}

std::vector<Matrix> LocalConnection::components(int chart, const Eigen::VectorXd& x) const {
  return charts_.at(static_cast<std::size_t>(chart)).components(x);
}

std::vector<Matrix> LocalConnection::partials(int chart, const Eigen::VectorXd& x) const {
  const auto& c = charts_.at(static_cast<std::size_t>(chart));
  if (c.partials) return c.partials(x);
  return fd_component_partials(c.components, x);
}

Matrix LocalConnection::apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  const auto comps = components(chart, x);
  Matrix out = Matrix::Zero(comps.front().rows(), comps.front().cols());
  for (std::size_t k = 0; k < comps.size(); ++k) out += v[static_cast<Eigen::Index>(k)] * comps[k];
  return out;
}

AlgebraElement LocalConnection::evaluate(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  return AlgebraElement::projected(bundle_->group(), apply(chart, x, v));
}

double LocalConnection::overlap_residual(const std::vector<ChartPoint>& samples) const {
  const auto& atlas = bundle_->atlas();
  const GroupSpec& spec = bundle_->group();
  double worst = 0.0;
  for (const auto& p : samples) {
    for (int v = 0; v < atlas.chart_count(); ++v) {
      if (v == p.chart) continue;
      auto xv = atlas.try_convert(p, v);
      if (!xv) continue;
      const Matrix t = bundle_->transition_matrix(p.chart, v, p.x);
      const Matrix ti = inverse_of(spec, t);
      const auto dt = bundle_->transition_partials(p.chart, v, p.x);
      const auto au = components(p.chart, p.x);
      const Eigen::MatrixXd jac = atlas.jacobian(p.chart, v, p.x);
      for (int k = 0; k < atlas.dim(); ++k) {
        const Matrix lhs = apply(v, *xv, jac.col(k));
        const Matrix rhs = ti * au[static_cast<std::size_t>(k)] * t + ti * dt[static_cast<std::size_t>(k)];
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
  }
  return worst;
}

GaugeTransformation::GaugeTransformation(BundlePtr bundle, std::vector<GaugeChart> charts)
    : bundle_(std::move(bundle)), charts_(std::move(charts)) {
  if (!bundle_) throw Error(ErrorCode::InvalidArgument, "gauge transformation without bundle");
  if (static_cast<int>(charts_.size()) != bundle_->atlas().chart_count())
    throw Error(ErrorCode::InvalidArgument, "gauge transformation needs one entry per chart");
}

GaugeTransformation GaugeTransformation::identity(BundlePtr bundle) {
  return constant(bundle, GroupElement::identity(bundle->group()));
}

GaugeTransformation GaugeTransformation::constant(BundlePtr bundle, const GroupElement& z) {
  const Matrix zm = z.matrix();
  const int m = bundle->atlas().dim();
  GaugeChart c{[zm](const Eigen::VectorXd&) { return zm; },
               [zm, m](const Eigen::VectorXd&) {
                 return std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(zm.rows(), zm.cols()));
               }};
  std::vector<GaugeChart> charts(static_cast<std::size_t>(bundle->atlas().chart_count()), c);
  return GaugeTransformation(std::move(bundle), std::move(charts));
}

GroupElement GaugeTransformation::local(int chart, const Eigen::VectorXd& x) const {
  return GroupElement::projected(bundle_->group(), charts_.at(static_cast<std::size_t>(chart)).value(x));
}

std::vector<Matrix> GaugeTransformation::partials(int chart, const Eigen::VectorXd& x) const {
  const auto& c = charts_.at(static_cast<std::size_t>(chart));
  if (c.partials) return c.partials(x);
  return fd_partials(c.value, x);
}

GroupElement GaugeTransformation::g_sigma(const BundlePoint& p) const {
  return p.fiber.inverse() * local(p.chart, p.x) * p.fiber;
}

BundlePoint GaugeTransformation::apply(const BundlePoint& p) const {
  return BundlePoint{p.chart, p.x, local(p.chart, p.x) * p.fiber};
}

double GaugeTransformation::overlap_residual(const std::vector<ChartPoint>& samples) const {
  const auto& atlas = bundle_->atlas();
  double worst = 0.0;
  for (const auto& p : samples) {
    for (int v = 0; v < atlas.chart_count(); ++v) {
      auto xv = atlas.try_convert(p, v);
      if (!xv || v == p.chart) continue;
      const GroupElement t = bundle_->transition(p.chart, v, p.x);
      worst = std::max(worst, distance(local(v, *xv), t.inverse() * local(p.chart, p.x) * t));
    }
  }
  return worst;
}

GaugeTransformation compose(const GaugeTransformation& first, const GaugeTransformation& second) {
  if (first.bundle_ptr() != second.bundle_ptr())
    throw Error(ErrorCode::CompositionMismatch, "gauge transformations of different bundles");
  std::vector<GaugeChart> charts;
  for (int c = 0; c < first.bundle().atlas().chart_count(); ++c) {
    GaugeChart g;
    g.value = [first, second, c](const Eigen::VectorXd& x) {
      return Matrix(first.local(c, x).matrix() * second.local(c, x).matrix());
    };
    g.partials = [first, second, c](const Eigen::VectorXd& x) {
      const Matrix a = first.local(c, x).matrix(), b = second.local(c, x).matrix();
      const auto da = first.partials(c, x), db = second.partials(c, x);
      std::vector<Matrix> out;
      for (std::size_t k = 0; k < da.size(); ++k) out.push_back(da[k] * b + a * db[k]);
      return out;
    };
    charts.push_back(std::move(g));
  }
  return GaugeTransformation(first.bundle_ptr(), std::move(charts));
}

LocalConnection apply_gauge_to_connection(const LocalConnection& a, const GaugeTransformation& sigma) {
  if (a.bundle_ptr() != sigma.bundle_ptr())
    throw Error(ErrorCode::SpecMismatch, "connection and gauge transformation live on different bundles");
  std::vector<ConnectionChart> charts;
  for (int c = 0; c < a.bundle().atlas().chart_count(); ++c) {
    ConnectionChart out;
    out.components = [a, sigma, c](const Eigen::VectorXd& x) {
      const GroupElement s = sigma.local(c, x);
      const Matrix si = s.inverse().matrix();
      const auto comps = a.components(c, x);
      const auto ds = sigma.partials(c, x);
      std::vector<Matrix> r;
      for (std::size_t k = 0; k < comps.size(); ++k) r.push_back(si * comps[k] * s.matrix() + si * ds[k]);
      return r;
    };
    charts.push_back(std::move(out));
  }
  return LocalConnection(a.bundle_ptr(), std::move(charts));
}

AlgebraElement curvature(const LocalConnection& a, int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v) {
  const int m = static_cast<int>(x.size());
  const auto comps = a.components(chart, x);
  const auto d = a.partials(chart, x);
  const int n = a.bundle().group().matrix_dim();
  Matrix f = Matrix::Zero(n, n);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const double c = u[j] * v[k];
      if (c == 0.0) continue;
      f += c * (d[static_cast<std::size_t>(j * m + k)] - d[static_cast<std::size_t>(k * m + j)]);
    }
  Matrix au = Matrix::Zero(n, n), av = Matrix::Zero(n, n);
  for (int k = 0; k < m; ++k) {
    au += u[k] * comps[static_cast<std::size_t>(k)];
    av += v[k] * comps[static_cast<std::size_t>(k)];
  }
  f += commutator(au, av);
  return AlgebraElement::projected(a.bundle().group(), f);
}

double max_curvature(const LocalConnection& a, const std::vector<ChartPoint>& samples) {
  const int m = a.bundle().atlas().dim();
  double worst = 0.0;
  for (const auto& p : samples)
    for (int j = 0; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        worst = std::max(worst, curvature(a, p.chart, p.x, Eigen::VectorXd::Unit(m, j), Eigen::VectorXd::Unit(m, k)).norm());
  return worst;
}

GenGauge::GenGauge(BundlePtr source, BundlePtr target, LocalFn local)
    : source_(std::move(source)), target_(std::move(target)), local_(std::move(local)) {
  if (!source_ || !target_) throw Error(ErrorCode::InvalidArgument, "generalized gauge transformation without bundles");
  if (!(source_->group() == target_->group())) throw Error(ErrorCode::SpecMismatch, "bundles with different groups");
  if (source_->atlas().name() != target_->atlas().name())
    throw Error(ErrorCode::SpecMismatch, "bundles over different atlases");
}

GroupElement GenGauge::local(int chart, const Eigen::VectorXd& x) const {
  return GroupElement::projected(source_->group(), local_(chart, x));
}

GroupElement GenGauge::operator()(const BundlePoint& p1, const BundlePoint& p2) const {
  if (!(source_->atlas().distance(p1.base(), p2.base()) <= kBaseTol))
    throw Error(ErrorCode::BaseMismatch, "points lie over different base points");
  const BundlePoint q = change_chart(*target_, p2, p1.chart);
  return q.fiber.inverse() * local(p1.chart, p1.x) * p1.fiber;
}

double GenGauge::overlap_residual(const std::vector<ChartPoint>& samples) const {
  const auto& atlas = source_->atlas();
  double worst = 0.0;
  for (const auto& p : samples) {
    for (int v = 0; v < atlas.chart_count(); ++v) {
      auto xv = atlas.try_convert(p, v);
      if (!xv || v == p.chart) continue;
      const GroupElement t1 = source_->transition(p.chart, v, p.x);
      const GroupElement t2 = target_->transition(p.chart, v, p.x);
      worst = std::max(worst, distance(local(v, *xv), t2.inverse() * local(p.chart, p.x) * t1));
    }
  }
  return worst;
}

GenGauge identity_gen_gauge(BundlePtr bundle) {
  const int n = bundle->group().matrix_dim();
  return GenGauge(bundle, bundle, [n](int, const Eigen::VectorXd&) { return Matrix(Matrix::Identity(n, n)); });
}

GenGauge star(const GenGauge& k23, const GenGauge& k12) {
  if (k12.target() != k23.source())
    throw Error(ErrorCode::CompositionMismatch, "target of the first factor is not the source of the second");
  return GenGauge(k12.source(), k23.target(), [k23, k12](int c, const Eigen::VectorXd& x) {
    return Matrix(k23.local(c, x).matrix() * k12.local(c, x).matrix());
  });
}

GenGauge inverse_gen_gauge(const GenGauge& k) {
  return GenGauge(k.target(), k.source(),
                  [k](int c, const Eigen::VectorXd& x) { return Matrix(k.local(c, x).inverse().matrix()); });
}

GenGauge gen_gauge_from_morphism(BundlePtr source, BundlePtr target, BundleMorphism morphism,
                                 const std::vector<ChartPoint>& check_points, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (const auto& base : check_points) {
    const BundlePoint p = reference_point(*source, base);
    const GroupElement g = random_group_element(source->group(), rng);
    const BundlePoint lhs = morphism(p * g);
    const BundlePoint rhs = morphism(p) * g;
    worst = std::max(worst, source->atlas().distance(lhs.base(), p.base()));
    worst = std::max(worst, point_distance(*target, lhs, rhs));
  }
  if (worst > 1e-8)
    throw Error(ErrorCode::NotEquivariant, "sampled equivariance residual " + std::to_string(worst));
  return GenGauge(source, target, [source, target, morphism](int c, const Eigen::VectorXd& x) {
    const BundlePoint img = morphism(reference_point(*source, ChartPoint{c, x}));
    return Matrix(division_map(*target, reference_point(*target, ChartPoint{c, x}), img).matrix());
  });
}

BundleMorphism morphism_from_gen_gauge(const GenGauge& k) {
  return [k](const BundlePoint& p) { return BundlePoint{p.chart, p.x, k.local(p.chart, p.x) * p.fiber}; };
}

GaugeTransformation gauge_from_gen_gauge(const GenGauge& k) {
  if (k.source() != k.target())
    throw Error(ErrorCode::CompositionMismatch, "diagonal restriction needs a transformation of one bundle");
  std::vector<GaugeChart> charts;
  for (int c = 0; c < k.source()->atlas().chart_count(); ++c)
    charts.push_back(GaugeChart{[k, c](const Eigen::VectorXd& x) { return Matrix(k.local(c, x).matrix()); }, {}});
  return GaugeTransformation(k.source(), std::move(charts));
}

GenGauge gen_gauge_from_gauge(const GaugeTransformation& sigma) {
  return GenGauge(sigma.bundle_ptr(), sigma.bundle_ptr(),
                  [sigma](int c, const Eigen::VectorXd& x) { return Matrix(sigma.local(c, x).matrix()); });
}

FibredPoint fibred_change_chart(const PrincipalBundle& first, const PrincipalBundle& second, const FibredPoint& p,
                                int to) {
  const BundlePoint a = change_chart(first, BundlePoint{p.chart, p.x, p.first}, to);
  const BundlePoint b = change_chart(second, BundlePoint{p.chart, p.x, p.second}, to);
  return FibredPoint{to, a.x, a.fiber, b.fiber};
}

bool fibred_connection_flat(const LocalConnection& first, const LocalConnection& second,
                            const std::vector<ChartPoint>& samples, double tol) {
  return max_curvature(first, samples) <= tol && max_curvature(second, samples) <= tol;
}

}  // namespace holo
