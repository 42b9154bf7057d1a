#include "holo/chen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "holo/errors.hpp"
#include "holo/presets.hpp"
#include "holo/simplex.hpp"

namespace holo {

namespace {

double power(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

void require_planar_single_chart(const PrincipalBundle& bundle) {
  if (bundle.atlas().chart_count() != 1 || bundle.atlas().dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "form preset needs a single two-dimensional chart");
}

Matrix conjugate_by_inverse(const Matrix& g, const Matrix& x) { return g.inverse() * x * g; }

int sign_of_permutation(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

}  // namespace

AdjointForm::AdjointForm(BundlePtr bundle, int degree, std::vector<ChartComponentsFn> charts,
                         std::vector<ChartComponentsFn> partials)
    : bundle_(std::move(bundle)), degree_(degree), charts_(std::move(charts)), partials_(std::move(partials)) {
  if (degree_ < 1) throw Error(ErrorCode::InvalidArgument, "form degree must be positive");
  if (degree_ > 2) throw Error(ErrorCode::UnsupportedDegree, "forms of degree above 2 are not supported");
  if (static_cast<int>(charts_.size()) != bundle_->atlas().chart_count())
    throw Error(ErrorCode::InvalidArgument, "one component function per chart is required");
}

AdjointForm AdjointForm::zero(BundlePtr bundle, int degree) {
  const int n = bundle->group().matrix_dim();
  const int dim = bundle->atlas().dim();
  const std::size_t count = static_cast<std::size_t>(degree == 1 ? dim : dim * dim);
  std::vector<ChartComponentsFn> charts(static_cast<std::size_t>(bundle->atlas().chart_count()),
                                        [n, count](const Eigen::VectorXd&) {
                                          return std::vector<Matrix>(count, Matrix::Zero(n, n));
                                        });
  return AdjointForm(bundle, degree, charts);
}

std::vector<Matrix> AdjointForm::components(int chart, const Eigen::VectorXd& x) const {
  return charts_.at(static_cast<std::size_t>(chart))(x);
}

std::vector<Matrix> AdjointForm::partials(int chart, const Eigen::VectorXd& x) const {
  if (degree_ != 1) throw Error(ErrorCode::UnsupportedDegree, "partials are provided for degree 1 only");
  if (static_cast<std::size_t>(chart) < partials_.size() && partials_[static_cast<std::size_t>(chart)])
    return partials_[static_cast<std::size_t>(chart)](x);
  const int dim = static_cast<int>(x.size());
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(dim * dim));
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += kDerivativeStep;
    xm[j] -= kDerivativeStep;
    const auto cp = components(chart, xp), cm = components(chart, xm);
    for (int k = 0; k < dim; ++k)
      out.push_back((cp[static_cast<std::size_t>(k)] - cm[static_cast<std::size_t>(k)]) / (2.0 * kDerivativeStep));
  }
  return out;
}

Matrix AdjointForm::apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (degree_ != 1) throw Error(ErrorCode::InvalidArgument, "degree-2 form needs two tangent vectors");
  const auto c = components(chart, x);
  Matrix out = Matrix::Zero(c.front().rows(), c.front().cols());
  for (int k = 0; k < u.size(); ++k) out += u[k] * c[static_cast<std::size_t>(k)];
  return out;
}

Matrix AdjointForm::apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& v) const {
  if (degree_ != 2) throw Error(ErrorCode::InvalidArgument, "degree-1 form takes one tangent vector");
  const auto c = components(chart, x);
  const int dim = static_cast<int>(u.size());
  Matrix out = Matrix::Zero(c.front().rows(), c.front().cols());
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) out += (u[j] * v[k]) * c[static_cast<std::size_t>(j * dim + k)];
  return out;
}

double AdjointForm::overlap_residual(const std::vector<ChartPoint>& samples) const {
  const Atlas& atlas = bundle_->atlas();
  const int dim = atlas.dim();
  double worst = 0.0;
  for (const auto& p : samples)
    for (int to = 0; to < atlas.chart_count(); ++to) {
      if (to == p.chart) continue;
      const auto q = atlas.try_convert(p, to);
      if (!q) continue;
      const Matrix t = bundle_->transition_matrix(p.chart, to, p.x);
      for (int j = 0; j < dim; ++j) {
        const Eigen::VectorXd u = Eigen::VectorXd::Unit(dim, j);
        const Eigen::VectorXd u2 = atlas.push_tangent(p.chart, to, p.x, u);
        if (degree_ == 1) {
          worst = std::max(worst, (apply(to, *q, u2) - conjugate_by_inverse(t, apply(p.chart, p.x, u))).norm());
          continue;
        }
        for (int k = 0; k < dim; ++k) {
          const Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, k);
          const Eigen::VectorXd v2 = atlas.push_tangent(p.chart, to, p.x, v);
          worst = std::max(worst,
                           (apply(to, *q, u2, v2) - conjugate_by_inverse(t, apply(p.chart, p.x, u, v))).norm());
        }
      }
    }
  return worst;
}

AdjointForm AdjointForm::scaled(double c) const {
  std::vector<ChartComponentsFn> charts, partials;
  for (const auto& f : charts_)
    charts.push_back([f, c](const Eigen::VectorXd& x) {
      auto v = f(x);
      for (auto& m : v) m *= c;
      return v;
    });
  for (const auto& f : partials_)
    partials.push_back(f ? ChartComponentsFn([f, c](const Eigen::VectorXd& x) {
      auto v = f(x);
      for (auto& m : v) m *= c;
      return v;
    })
                         : ChartComponentsFn{});
  return AdjointForm(bundle_, degree_, charts, partials);
}

BFPair gauge_transform(const BFPair& pair, const GaugeTransformation& sigma) {
  std::vector<ChartComponentsFn> charts;
  const int count = pair.b.bundle().atlas().chart_count();
  for (int c = 0; c < count; ++c)
    charts.push_back([b = pair.b, sigma, c](const Eigen::VectorXd& x) {
      const Matrix s = sigma.local(c, x).matrix();
      auto v = b.components(c, x);
      for (auto& m : v) m = conjugate_by_inverse(s, m);
      return v;
    });
  return BFPair{apply_gauge_to_connection(pair.a, sigma), AdjointForm(pair.b.bundle_ptr(), pair.b.degree(), charts)};
}

LocalConnection shifted_connection(const BFPair& pair) {
  if (pair.b.degree() != 1) throw Error(ErrorCode::InvalidArgument, "only a 1-form can shift a connection");
  std::vector<ConnectionChart> charts;
  const int count = pair.a.bundle().atlas().chart_count();
  for (int c = 0; c < count; ++c) {
    ConnectionChart cc;
    cc.components = [a = pair.a, b = pair.b, c](const Eigen::VectorXd& x) {
      auto v = a.components(c, x);
      const auto w = b.components(c, x);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += w[k];
      return v;
    };
    cc.partials = [a = pair.a, b = pair.b, c](const Eigen::VectorXd& x) {
      auto v = a.partials(c, x);
      const auto w = b.partials(c, x);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += w[k];
      return v;
    };
    charts.push_back(std::move(cc));
  }
  return LocalConnection(pair.a.bundle_ptr(), charts);
}

AdjointForm constant_form(BundlePtr bundle, const std::vector<AlgebraElement>& coefficients) {
  if (static_cast<int>(coefficients.size()) != bundle->atlas().dim())
    throw Error(ErrorCode::InvalidArgument, "one coefficient per base direction is required");
  std::vector<Matrix> m;
  for (const auto& c : coefficients) m.push_back(c.matrix());
  const int n = bundle->group().matrix_dim();
  const std::size_t dim = m.size();
  std::vector<ChartComponentsFn> charts(static_cast<std::size_t>(bundle->atlas().chart_count()),
                                        [m](const Eigen::VectorXd&) { return m; });
  std::vector<ChartComponentsFn> partials(charts.size(), [n, dim](const Eigen::VectorXd&) {
    return std::vector<Matrix>(dim * dim, Matrix::Zero(n, n));
  });
  if (bundle->atlas().chart_count() != 1) throw Error(ErrorCode::InvalidArgument, "constant form needs one chart");
  return AdjointForm(bundle, 1, charts, partials);
}

AdjointForm angle_form(BundlePtr bundle, const AlgebraElement& eta) {
  require_planar_single_chart(*bundle);
  const Matrix m = eta.matrix();
  ChartComponentsFn c = [m](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm();
    return std::vector<Matrix>{(-x[1] / r2) * m, (x[0] / r2) * m};
  };
  ChartComponentsFn d = [m](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm(), r4 = r2 * r2;
    const double xy = 2.0 * x[0] * x[1] / r4, diff = (x[1] * x[1] - x[0] * x[0]) / r4;
    return std::vector<Matrix>{xy * m, diff * m, diff * m, -xy * m};
  };
  return AdjointForm(bundle, 1, {c}, {d});
}

AdjointForm x_dy_form(BundlePtr bundle, const AlgebraElement& eta) {
  require_planar_single_chart(*bundle);
  const Matrix m = eta.matrix();
  const Matrix z = Matrix::Zero(m.rows(), m.cols());
  ChartComponentsFn c = [m, z](const Eigen::VectorXd& x) { return std::vector<Matrix>{z, x[0] * m}; };
  ChartComponentsFn d = [m, z](const Eigen::VectorXd&) { return std::vector<Matrix>{z, m, z, z}; };
  return AdjointForm(bundle, 1, {c}, {d});
}

AdjointForm random_polynomial_form(BundlePtr bundle, std::uint64_t seed, int degree, double scale) {
  require_planar_single_chart(*bundle);
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  const GroupSpec spec = bundle->group();
  Rng rng(seed);
  const auto mono = monomials(degree);
  std::vector<std::vector<Matrix>> coeffs(2);
  for (int k = 0; k < 2; ++k)
    for (const auto& [a, b] : mono)
      coeffs[static_cast<std::size_t>(k)].push_back(random_algebra_element(spec, rng, scale / (1.0 + a + b)).matrix());
  const int n = spec.matrix_dim();
  ChartComponentsFn c = [coeffs, mono, n](const Eigen::VectorXd& x) {
    std::vector<Matrix> out(2, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const double w = power(x[0], mono[i].first) * power(x[1], mono[i].second);
      out[0] += w * coeffs[0][i];
      out[1] += w * coeffs[1][i];
    }
    return out;
  };
  ChartComponentsFn d = [coeffs, mono, n](const Eigen::VectorXd& x) {
    std::vector<Matrix> out(4, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto [a, b] = mono[i];
      const double wx = a == 0 ? 0.0 : a * power(x[0], a - 1) * power(x[1], b);
      const double wy = b == 0 ? 0.0 : b * power(x[0], a) * power(x[1], b - 1);
      for (std::size_t k = 0; k < 2; ++k) {
        out[k] += wx * coeffs[k][i];
        out[2 + k] += wy * coeffs[k][i];
      }
    }
    return out;
  };
  return AdjointForm(bundle, 1, {c}, {d});
}

AdjointForm area_form(BundlePtr bundle, const AlgebraElement& eta, double c) {
  require_planar_single_chart(*bundle);
  const Matrix m = eta.matrix();
  ChartComponentsFn f = [m, c](const Eigen::VectorXd& x) {
    const double w = 1.0 + c * x[0] + c * x[1] * x[1];
    const Matrix z = Matrix::Zero(m.rows(), m.cols());
    return std::vector<Matrix>{z, w * m, -w * m, z};
  };
  return AdjointForm(bundle, 2, {f});
}

double form_norm_along(const AdjointForm& b, const SampledCurve& curve, int samples) {
  if (b.degree() != 1) throw Error(ErrorCode::InvalidArgument, "norm along a curve needs a 1-form");
  if (samples < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least two samples");
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const CurveSample s = curve.at(t);
    const double w = (k == 0 || k == samples - 1) ? 0.5 : 1.0;
    sum += w * b.apply(s.point.chart, s.point.x, s.velocity).norm();
  }
  return sum / (samples - 1);
}

namespace {

Matrix covariant_derivative_matrix(const BFPair& pair, int chart, const Eigen::VectorXd& x) {
  if (pair.b.degree() != 1 || x.size() != 2)
    throw Error(ErrorCode::InvalidArgument, "covariant derivative is provided for 1-forms on surfaces");
  const auto a = pair.a.components(chart, x);
  const auto b = pair.b.components(chart, x);
  const auto db = pair.b.partials(chart, x);
  // db[j * 2 + k] = d_j B_k
  return db[1] - db[2] + commutator(a[0], b[1]) - commutator(a[1], b[0]);
}

}  // namespace

AlgebraElement covariant_derivative(const BFPair& pair, int chart, const Eigen::VectorXd& x) {
  return AlgebraElement::projected(pair.b.bundle().group(), covariant_derivative_matrix(pair, chart, x));
}

AlgebraElement maurer_cartan(const BFPair& pair, int chart, const Eigen::VectorXd& x) {
  const auto b = pair.b.components(chart, x);
  return AlgebraElement::projected(pair.b.bundle().group(),
                                   covariant_derivative_matrix(pair, chart, x) + commutator(b[0], b[1]));
}

double max_covariant_derivative(const BFPair& pair, const std::vector<ChartPoint>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, covariant_derivative_matrix(pair, p.chart, p.x).norm());
  return worst;
}

double max_maurer_cartan(const BFPair& pair, const std::vector<ChartPoint>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, maurer_cartan(pair, p.chart, p.x).norm());
  return worst;
}

Complex wilson_loop(const LocalConnection& a, const Representation& rho, const SampledCurve& loop,
                    const BundlePoint& p, const TransportOptions& opts) {
  return rho(holonomy(a, loop, p, opts)).trace();
}

LoopInsertions::LoopInsertions(const LocalConnection& a, const Representation& rho, const SampledCurve& loop,
                               const BundlePoint& p, const TransportOptions& opts)
    : a_(&a),
      loop_(&loop),
      rho_(rho),
      p_(p),
      lift_(a, loop, p, opts),
      hol_(GroupElement::identity(a.bundle().group())) {
  if (loop.is_loop()) hol_ = division_map(a.bundle(), p, lift_.end());
  rho_hol_inv_ = rho_(hol_.inverse());
}

BundlePoint LoopInsertions::lift(double t) const {
  const int native = loop_->at(t).point.chart;
  return change_chart(a_->bundle(), lift_.at(t), native);
}

Matrix LoopInsertions::represent(double t, int chart, const Matrix& algebra) const {
  int piece_chart = 0;
  Matrix g = lift_.fiber_at(t, &piece_chart);
  if (piece_chart != chart) {
    const Eigen::VectorXd x = loop_->at_in_chart(t, piece_chart).point.x;
    g = a_->bundle().transition_matrix(piece_chart, chart, x).inverse() * g;
  }
  return rho_.apply_algebra(conjugate_by_inverse(g, algebra));
}

Matrix LoopInsertions::along(const AdjointForm& form, double t) const {
  const CurveSample s = loop_->at(t);
  return represent(t, s.point.chart, form.apply(s.point.chart, s.point.x, s.velocity));
}

Matrix LoopInsertions::on_vector(const AdjointForm& form, double t, const Eigen::VectorXd& v) const {
  const CurveSample s = loop_->at(t);
  return represent(t, s.point.chart, form.apply(s.point.chart, s.point.x, v));
}

Matrix LoopInsertions::along_and(const AdjointForm& form, double t, const Eigen::VectorXd& v) const {
  const CurveSample s = loop_->at(t);
  return represent(t, s.point.chart, form.apply(s.point.chart, s.point.x, s.velocity, v));
}

Matrix pulled_back_form(const LocalConnection& a, const AdjointForm& omega, const Representation& rho,
                        const SampledCurve& loop, const BundlePoint& p, double t, bool on_velocity,
                        const Eigen::VectorXd& vector, const TransportOptions& opts) {
  const LoopInsertions ins(a, rho, loop, p, opts);
  if (omega.degree() == 2) return ins.along_and(omega, t, vector);
  return on_velocity ? ins.along(omega, t) : ins.on_vector(omega, t, vector);
}

namespace {

// Panels of Gauss-Legendre nodes covering [0, 1], aligned with segment and chart boundaries.
struct PanelGrid {
  std::vector<double> starts;
  std::vector<double> widths;
  GaussRule rule;
  // integral of the j-th Lagrange basis polynomial over [0, x_i], row-major m x m
  Eigen::MatrixXd cumulative;
};

PanelGrid make_panel_grid(const SampledCurve& loop, const ChenOptions& opts) {
  if (opts.panel_nodes < 2 || opts.panels_per_unit < 1)
    throw Error(ErrorCode::ResolutionTooSmall, "panel resolution too small");
  std::vector<double> cuts = loop.breakpoints();
  for (const auto& piece : loop.itinerary()) {
    cuts.push_back(piece.t0);
    cuts.push_back(piece.t1);
  }
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> unique;
  for (double c : cuts)
    if (unique.empty() || c - unique.back() > 1e-12) unique.push_back(c);
  PanelGrid grid;
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
    const double len = unique[i + 1] - unique[i];
    const int k = std::max(1, static_cast<int>(std::ceil(len * opts.panels_per_unit - 1e-9)));
    for (int j = 0; j < k; ++j) {
      grid.starts.push_back(unique[i] + len * j / k);
      grid.widths.push_back(len / k);
    }
  }
  grid.rule = gauss_legendre(opts.panel_nodes);
  const int m = opts.panel_nodes;
  const auto& x = grid.rule.nodes;
  std::vector<double> bary(static_cast<std::size_t>(m), 1.0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      if (k != j) bary[static_cast<std::size_t>(j)] /= (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(k)]);
  auto lagrange = [&](double s, int j) {
    double prod = 1.0;
    for (int k = 0; k < m; ++k)
      if (k != j) prod *= (s - x[static_cast<std::size_t>(k)]);
    return bary[static_cast<std::size_t>(j)] * prod;
  };
  grid.cumulative = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int q = 0; q < m; ++q)
        sum += grid.rule.weights[static_cast<std::size_t>(q)] *
               lagrange(x[static_cast<std::size_t>(i)] * grid.rule.nodes[static_cast<std::size_t>(q)], j);
      grid.cumulative(i, j) = x[static_cast<std::size_t>(i)] * sum;
    }
  return grid;
}

std::vector<double> panel_times(const PanelGrid& grid) {
  std::vector<double> t;
  for (std::size_t p = 0; p < grid.starts.size(); ++p)
    for (double x : grid.rule.nodes) t.push_back(grid.starts[p] + grid.widths[p] * x);
  return t;
}

// Returns G_1(1), ..., G_n(1) where G_k(tau) = int_0^tau G_{k-1}(t) f_k(t) dt, G_0 = I, and factors[k - 1]
// holds f_k at the panel nodes.
std::vector<Matrix> iterated_integrals(const PanelGrid& grid, const std::vector<const std::vector<Matrix>*>& factors,
                                       int dim_v) {
  const std::size_t n = factors.size();
  const std::size_t m = grid.rule.nodes.size();
  std::vector<Matrix> start(n + 1, Matrix::Zero(dim_v, dim_v));
  start[0] = Matrix::Identity(dim_v, dim_v);
  std::vector<std::vector<Matrix>> values(n + 1, std::vector<Matrix>(m));
  for (std::size_t p = 0; p < grid.starts.size(); ++p) {
    const double h = grid.widths[p];
    for (std::size_t i = 0; i < m; ++i) values[0][i] = start[0];
    for (std::size_t k = 1; k <= n; ++k) {
      const std::vector<Matrix>& f = *factors[k - 1];
      std::vector<Matrix> integrand(m);
      for (std::size_t j = 0; j < m; ++j) integrand[j] = values[k - 1][j] * f[p * m + j];
      Matrix end = start[k];
      for (std::size_t j = 0; j < m; ++j) end += (h * grid.rule.weights[j]) * integrand[j];
      for (std::size_t i = 0; i < m; ++i) {
        Matrix v = start[k];
        for (std::size_t j = 0; j < m; ++j)
          v += (h * grid.cumulative(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * integrand[j];
        values[k][i] = std::move(v);
      }
      start[k] = std::move(end);
    }
  }
  return std::vector<Matrix>(start.begin() + 1, start.end());
}

void require_loop_point(const PrincipalBundle& bundle, const SampledCurve& loop, const BundlePoint& p) {
  if (!loop.is_loop()) throw Error(ErrorCode::NotALoop, "curve is not closed");
  const BundlePoint q = reference_point(bundle, loop.at(0.0).point);
  if (base_distance(bundle, p, q) > kBaseTol)
    throw Error(ErrorCode::BasePointOffCurve, "base point is not over the loop start");
}

}  // namespace

Complex gen_wilson_term(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                        const BundlePoint& p, int n, const std::vector<VectorField>& variations,
                        const ChenOptions& opts) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  if (pair.b.degree() > 2) throw Error(ErrorCode::UnsupportedDegree, "form degree above 2");
  require_loop_point(pair.a.bundle(), loop, p);
  const LoopInsertions ins(pair.a, rho, loop, p, opts.transport);
  if (n == 0) return rho(ins.holonomy()).trace();
  const PanelGrid grid = make_panel_grid(loop, opts);
  const std::vector<double> times = panel_times(grid);
  if (pair.b.degree() == 1) {
    std::vector<Matrix> f;
    f.reserve(times.size());
    for (double t : times) f.push_back(ins.along(pair.b, t));
    const std::vector<const std::vector<Matrix>*> factors(static_cast<std::size_t>(n), &f);
    return (iterated_integrals(grid, factors, rho.dim_v).back() * ins.rho_hol_inverse()).trace();
  }
  if (static_cast<int>(variations.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "a degree-2 term needs one loop variation per insertion");
  std::vector<std::vector<Matrix>> f(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (double t : times) f[static_cast<std::size_t>(j)].push_back(ins.along_and(pair.b, t, variations[static_cast<std::size_t>(j)](t)));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    std::vector<const std::vector<Matrix>*> factors;
    for (int j : perm) factors.push_back(&f[static_cast<std::size_t>(j)]);
    total += static_cast<double>(sign_of_permutation(perm)) *
             (iterated_integrals(grid, factors, rho.dim_v).back() * ins.rho_hol_inverse()).trace();
  } while (std::next_permutation(perm.begin(), perm.end()));
  const int reorder = (n * (n - 1) / 2) % 2 == 0 ? 1 : -1;
  return static_cast<double>(reorder) * total;
}

Complex gen_wilson_term_simplex(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                                const BundlePoint& p, int n, const ChenOptions& opts) {
  if (pair.b.degree() != 1) throw Error(ErrorCode::InvalidArgument, "simplex quadrature term needs a 1-form");
  require_loop_point(pair.a.bundle(), loop, p);
  const LoopInsertions ins(pair.a, rho, loop, p, opts.transport);
  if (n == 0) return rho(ins.holonomy()).trace();
  Complex sum = 0.0;
  for_each_simplex_node(n, opts.simplex_nodes(n), [&](const Eigen::VectorXd& t, double w) {
    Matrix prod = ins.along(pair.b, t[0]);
    for (int i = 1; i < n; ++i) prod = prod * ins.along(pair.b, t[i]);
    sum += w * (prod * ins.rho_hol_inverse()).trace();
  });
  return sum;
}

WilsonSeries gen_wilson_series(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                               const BundlePoint& p, int order, int loop_id, const ChenOptions& opts) {
  if (order < 0 || order > 8) throw Error(ErrorCode::InvalidArgument, "series order must lie in 0..8");
  if (pair.b.degree() != 1) throw Error(ErrorCode::UnsupportedDegree, "scalar series needs a 1-form");
  require_loop_point(pair.a.bundle(), loop, p);
  const LoopInsertions ins(pair.a, rho, loop, p, opts.transport);
  WilsonSeries series;
  series.loop_id = loop_id;
  series.order = order;
  series.terms.push_back(rho(ins.holonomy()).trace());
  if (order > 0) {
    const PanelGrid grid = make_panel_grid(loop, opts);
    std::vector<Matrix> f;
    for (double t : panel_times(grid)) f.push_back(ins.along(pair.b, t));
    const std::vector<const std::vector<Matrix>*> factors(static_cast<std::size_t>(order), &f);
    for (const Matrix& g : iterated_integrals(grid, factors, rho.dim_v))
      series.terms.push_back((g * ins.rho_hol_inverse()).trace());
  }
  Complex running = 0.0;
  for (const Complex& term : series.terms) {
    running += term;
    series.partial_sums.push_back(running);
  }
  return series;
}

Complex dyson_oracle(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                     const BundlePoint& p, const TransportOptions& opts) {
  const GroupElement hol = holonomy(pair.a, loop, p, opts);
  const LocalConnection shifted = shifted_connection(pair);
  const GroupElement hol_shifted = holonomy(shifted, loop, p, opts);
  return rho(hol).trace() - rho(hol.inverse()).trace() + rho(hol_shifted.inverse()).trace();
}

namespace {

std::vector<ChartPoint> samples_along(const SampledCurve& curve, int count) {
  std::vector<ChartPoint> pts;
  for (int k = 0; k < count; ++k) pts.push_back(curve.at(static_cast<double>(k) / (count - 1)).point);
  return pts;
}

constexpr double kHypothesisTol = 1e-8;

}  // namespace

double series_family_deviation(const BFPair& pair, const Representation& rho, const LoopFamily& family, int order,
                               int slices, const ChenOptions& opts) {
  if (slices < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least two slices");
  Complex first = 0.0;
  double worst = 0.0;
  for (int i = 0; i < slices; ++i) {
    const SampledCurve loop = family.slice(static_cast<double>(i) / (slices - 1));
    const BundlePoint p = reference_point(pair.a.bundle(), loop.at(0.0).point);
    const Complex s = gen_wilson_series(pair, rho, loop, p, order, i, opts).partial_sums.back();
    if (i == 0)
      first = s;
    else
      worst = std::max(worst, std::abs(s - first));
  }
  return worst;
}

double local_constancy_check(const BFPair& pair, const Representation& rho, const LoopFamily& family, int order,
                             int slices, const ChenOptions& opts) {
  if (pair.b.degree() != 1) throw Error(ErrorCode::UnsupportedDegree, "local constancy needs a 1-form");
  for (int i = 0; i < slices; ++i) {
    const SampledCurve loop = family.slice(static_cast<double>(i) / std::max(1, slices - 1));
    if (curvature_along(pair.a, loop) > kHypothesisTol) throw Error(ErrorCode::NotFlat, "connection is not flat");
    if (max_maurer_cartan(pair, samples_along(loop, 33)) > kHypothesisTol)
      throw Error(ErrorCode::NotMaurerCartan, "form violates the covariant Maurer-Cartan equation");
  }
  return series_family_deviation(pair, rho, family, order, slices, opts);
}

double covariant_square_residual(const BFPair& pair, const Representation& rho, const SampledCurve& curve,
                                 const BundlePoint& p, const VectorField& field, const VectorField& field_dot,
                                 const std::vector<double>& times, const ChenOptions& opts, double eps) {
  if (pair.b.degree() != 1 || pair.a.bundle().atlas().dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "the commuting square is checked for 1-forms on surfaces");
  const double f = curvature_along(pair.a, curve);
  if (f > 1e-8) throw Error(ErrorCode::NotFlat, "sampled curvature " + std::to_string(f));
  const PrincipalBundle& bundle = pair.a.bundle();
  const BundlePoint start = change_chart(bundle, p, curve.at(0.0).point.chart);
  const SampledCurve plus = perturb(curve, field, field_dot, eps);
  const SampledCurve minus = perturb(curve, field, field_dot, -eps);
  auto moved = [&](double e) { return BundlePoint{start.chart, start.x + e * field(0.0), start.fiber}; };
  const LoopInsertions base(pair.a, rho, curve, start, opts.transport);
  const LoopInsertions up(pair.a, rho, plus, moved(eps), opts.transport);
  const LoopInsertions down(pair.a, rho, minus, moved(-eps), opts.transport);
  const Matrix xi0 = base.represent(0.0, start.chart, pair.a.apply(start.chart, start.x, field(0.0)));
  double worst = 0.0;
  for (double t : times) {
    if (!(t > eps && t < 1.0 - eps)) throw Error(ErrorCode::InvalidArgument, "sample time too close to the ends");
    const Matrix b = base.along(pair.b, t);
    const Matrix variation = (up.along(pair.b, t) - down.along(pair.b, t)) / (2.0 * eps);
    const Matrix drift =
        (base.on_vector(pair.b, t + eps, field(t + eps)) - base.on_vector(pair.b, t - eps, field(t - eps))) / (2.0 * eps);
    const CurveSample s = curve.at(t);
    const Eigen::VectorXd x = field(t);
    const double area = x[0] * s.velocity[1] - x[1] * s.velocity[0];
    const Matrix expected =
        base.represent(t, s.point.chart, area * covariant_derivative(pair, s.point.chart, s.point.x).matrix());
    worst = std::max(worst, (variation - drift + xi0 * b - b * xi0 - expected).norm());
  }
  return worst;
}

bool ClosednessReport::halving_ok() const { return residual_half <= std::max(residual, 1e-9); }

ClosednessReport wilson_closedness_check(const BFPair& pair, const Representation& rho, const LoopSurface& surface,
                                         int n, double a, double b, double step, const ChenOptions& opts) {
  if (n < 0 || n > 2) throw Error(ErrorCode::UnsupportedDegree, "closedness is checked for orders up to 2");
  ClosednessReport report;
  report.n = n;
  report.step = step;
  report.form_degree = n * (pair.b.degree() - 1);
  if (report.form_degree >= 2)
    throw Error(ErrorCode::UnsupportedDegree, "a 2-form on loop space needs a three-parameter family");
  const SampledCurve centre = surface.slice(a, b);
  if (curvature_along(pair.a, centre) > kHypothesisTol) throw Error(ErrorCode::NotFlat, "connection is not flat");
  if (pair.b.degree() == 1 && pair.b.bundle().atlas().dim() == 2 &&
      max_covariant_derivative(pair, samples_along(centre, 33)) > kHypothesisTol)
    throw Error(ErrorCode::NotCovClosed, "form is not covariantly closed");

  auto value = [&](double u, double v, int which) {
    const SampledCurve loop = surface.slice(u, v);
    const BundlePoint p = reference_point(pair.a.bundle(), loop.at(0.0).point);
    if (report.form_degree == 0) return gen_wilson_term(pair, rho, loop, p, n, {}, opts);
    return gen_wilson_term(pair, rho, loop, p, n, {surface.variation(u, v, which)}, opts);
  };
  auto residual = [&](double d) {
    if (report.form_degree == 0) {
      const double da = std::abs(value(a + d, b, 0) - value(a - d, b, 0)) / (2.0 * d);
      const double db = std::abs(value(a, b + d, 0) - value(a, b - d, 0)) / (2.0 * d);
      return std::max(da, db);
    }
    const Complex curl = value(a + d, b, 1) - value(a - d, b, 1) - value(a, b + d, 0) + value(a, b - d, 0);
    return std::abs(curl) / (2.0 * d);
  };
  report.residual = residual(step);
  report.residual_half = residual(step / 2.0);
  return report;
}

std::vector<FaceResidual> boundary_face_reduction_check(const BFPair& pair, const Representation& rho,
                                                        const SampledCurve& loop, const BundlePoint& p, int n,
                                                        const VectorField& variation, const ChenOptions& opts) {
  if (n < 1 || n > 3) throw Error(ErrorCode::InvalidArgument, "face reduction is checked for orders 1..3");
  if (pair.b.degree() != 1) throw Error(ErrorCode::UnsupportedDegree, "face reduction needs a 1-form");
  require_loop_point(pair.a.bundle(), loop, p);
  const LoopInsertions ins(pair.a, rho, loop, p, opts.transport);
  const Matrix& hol_inv = ins.rho_hol_inverse();
  auto beta = [&](double t) { return ins.along(pair.b, t); };
  auto lambda = [&](double t) { return ins.on_vector(pair.b, t, variation(t)); };
  const Matrix lambda0 = lambda(0.0);
  const int dim_v = rho.dim_v;
  const int res = opts.simplex_nodes(n);

  std::vector<FaceResidual> out;
  for (const BoundaryFace& face : boundary_faces(n)) {
    // Minors of the face embedding with row j removed.
    std::vector<double> minors(static_cast<std::size_t>(n), 1.0);
    for (int j = 0; j < n; ++j) {
      if (n == 1) break;
      Eigen::MatrixXd rest(n - 1, n - 1);
      for (int i = 0, r = 0; i < n; ++i)
        if (i != j) rest.row(r++) = face.jacobian.row(i);
      minors[static_cast<std::size_t>(j)] = rest.determinant();
    }
    Complex restricted = 0.0, predicted = 0.0;
    for_each_simplex_node(n - 1, res, [&](const Eigen::VectorXd& s, double w) {
      const Eigen::VectorXd t = face.embed(s);
      std::vector<Matrix> b(static_cast<std::size_t>(n)), l(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        b[static_cast<std::size_t>(i)] = beta(t[i]);
        l[static_cast<std::size_t>(i)] = lambda(t[i]);
      }
      for (int j = 0; j < n; ++j) {
        const double minor = minors[static_cast<std::size_t>(j)];
        if (std::abs(minor) < 1e-14) continue;
        Matrix prod = Matrix::Identity(dim_v, dim_v);
        for (int i = 0; i < n; ++i) prod = prod * (i == j ? l[static_cast<std::size_t>(i)] : b[static_cast<std::size_t>(i)]);
        const double slot_sign = j % 2 == 0 ? 1.0 : -1.0;
        restricted += w * slot_sign * minor * (prod * hol_inv).trace();
      }
      Matrix prod = Matrix::Identity(dim_v, dim_v);
      double sign = 1.0;
      if (face.alpha == 0) {
        prod = lambda0;
        for (int i = 0; i < n - 1; ++i) prod = prod * beta(s[i]);
        prod = prod * hol_inv;
      } else if (face.alpha == n) {
        for (int i = 0; i < n - 1; ++i) prod = prod * beta(s[i]);
        prod = prod * hol_inv * lambda0;
        sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
      } else {
        for (int i = 0; i < n - 1; ++i) {
          if (i == face.alpha - 1) {
            const Matrix bl = beta(s[i]), ll = lambda(s[i]);
            prod = prod * (ll * bl - bl * ll);
          } else {
            prod = prod * beta(s[i]);
          }
        }
        prod = prod * hol_inv;
        sign = (face.alpha - 1) % 2 == 0 ? 1.0 : -1.0;
      }
      predicted += w * sign * prod.trace();
    });
    FaceResidual r;
    r.alpha = face.alpha;
    r.sign = face.sign;
    r.restricted = static_cast<double>(face.sign) * restricted;
    r.predicted = static_cast<double>(face.sign) * predicted;
    r.residual = std::abs(r.restricted - r.predicted);
    out.push_back(r);
  }
  return out;
}

}  // namespace holo
