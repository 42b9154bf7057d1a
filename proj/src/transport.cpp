#include "holo/transport.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {

const double kSqrt3 = std::sqrt(3.0);
// Gauss nodes and the weights of the two-exponential fourth-order scheme.
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kWeightEarly = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kWeightLate = (3.0 + 2.0 * kSqrt3) / 12.0;
constexpr int kProjectionInterval = 32;

Matrix generator(const LocalConnection& a, const SampledCurve& curve, const ChartPiece& piece, double t) {
  const CurveSample s = curve.at_piece(piece, t);
  return -a.apply(piece.chart, s.point.x, s.velocity);
}

Matrix cf4_step(const LocalConnection& a, const SampledCurve& curve, const ChartPiece& piece, double t0, double h,
                const Matrix& g) {
  const GroupSpec& spec = a.bundle().group();
  const Matrix f1 = generator(a, curve, piece, t0 + kNode1 * h);
  const Matrix f2 = generator(a, curve, piece, t0 + kNode2 * h);
  const Matrix first = exp_matrix(spec, h * (kWeightLate * f1 + kWeightEarly * f2));
  const Matrix second = exp_matrix(spec, h * (kWeightEarly * f1 + kWeightLate * f2));
  return second * (first * g);
}

void keep_in_group(const GroupSpec& spec, Matrix& g, IntegratorStats& stats) {
  const double r = group_residual(spec, g);
  stats.max_membership_residual = std::max(stats.max_membership_residual, r);
  if (r > kMembershipTol) g = project_to_group(spec, g);
}

struct PieceRecord {
  ChartPiece span;
  double h;
  std::vector<Matrix> values;
};

// Integrates the lift over [s, t]; optionally records every step value per piece.
BundlePoint integrate(const LocalConnection& a, const SampledCurve& curve, double s, double t, const BundlePoint& p,
                      const TransportOptions& opts, IntegratorStats& stats, std::vector<LiftSample>* trace,
                      std::vector<PieceRecord>* record) {
  if (!(s >= 0.0 && t <= 1.0 && s < t)) throw Error(ErrorCode::ParameterOrder, "need 0 <= s < t <= 1");
  if (!(opts.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  const PrincipalBundle& bundle = a.bundle();
  const GroupSpec& spec = bundle.group();
  const CurveSample start = curve.at(s);
  if (!(curve.atlas().distance(p.base(), start.point) <= kBaseTol))
    throw Error(ErrorCode::BasePointOffCurve, "start point does not lie over the curve");

  const auto& pieces = curve.itinerary();
  int current_chart = -1;
  Matrix g;
  ChartPiece last{};
  const ChartPiece* previous = nullptr;
  double previous_end = s;
  std::size_t step_count = 0;
  for (const auto& piece : pieces) {
    const double lo = std::max(piece.t0, s);
    const double hi = std::min(piece.t1, t);
    if (!(hi > lo)) continue;
    if (current_chart < 0) {
      const CurveSample here = curve.at_piece(piece, lo);
      BundlePoint q = change_chart(bundle, p, piece.chart);
      q.x = here.point.x;
      g = q.fiber.matrix();
    } else if (piece.chart != current_chart) {
      const Eigen::VectorXd x = curve.at_piece(*previous, previous_end).point.x;
      const Matrix tr = bundle.transition_matrix(current_chart, piece.chart, x);
      g = (spec.kind() == GroupKind::GLn ? Matrix(tr.inverse()) : Matrix(tr.adjoint())) * g;
    }
    current_chart = piece.chart;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / opts.step - 1e-9)));
    const double h = (hi - lo) / n;
    PieceRecord rec{ChartPiece{lo, hi, piece.segment, piece.chart}, h, {}};
    if (record) rec.values.push_back(g);
    for (int k = 0; k < n; ++k) {
      const double t0 = lo + k * h;
      g = cf4_step(a, curve, piece, t0, h, g);
      if (++step_count % kProjectionInterval == 0) keep_in_group(spec, g, stats);
      if (record) rec.values.push_back(g);
      if (trace) {
        const double tk = k + 1 == n ? hi : t0 + h;
        trace->push_back(LiftSample{tk, BundlePoint{piece.chart, curve.at_piece(piece, tk).point.x,
                                                    GroupElement::projected(spec, g)}});
      }
    }
    if (record) record->push_back(std::move(rec));
    previous = &piece;
    previous_end = hi;
    last = piece;
  }
  if (current_chart < 0) throw Error(ErrorCode::ChartGap, "no chart covers the curve");
  keep_in_group(spec, g, stats);
  stats.steps += step_count;
  const Eigen::VectorXd x_end = curve.at_piece(last, t).point.x;
  return BundlePoint{current_chart, x_end, GroupElement::projected(spec, g)};
}

Matrix exp_vertical(const GroupSpec& spec, const Matrix& zeta, double e) {
  if (zeta.size() == 0) return Matrix::Identity(spec.matrix_dim(), spec.matrix_dim());
  return exp_matrix(spec, e * zeta);
}

// Base point of the perturbed curve at t, expressed in `chart`.
Eigen::VectorXd perturbed_base(const SampledCurve& curve, double t, int chart) {
  return curve.atlas().convert(curve.at(t).point, chart).x;
}

Matrix connection_on_variation(const LocalConnection& a, const SampledCurve& curve, const BundlePoint& p, double t,
                               const LoopVariation& x, const Matrix& vertical) {
  const CurveSample native = curve.at(t);
  const Eigen::VectorXd w = curve.atlas().push_tangent(native.point.chart, p.chart, native.point.x, x.field(t));
  Matrix xi = p.fiber.inverse().matrix() * a.apply(p.chart, p.x, w) * p.fiber.matrix();
  if (vertical.size() != 0) xi += vertical;
  return xi;
}

template <typename Fn>
Matrix richardson_derivative(const Fn& value, double amplitude) {
  const Matrix d1 = (value(amplitude) - value(-amplitude)) / (2.0 * amplitude);
  const Matrix d2 = (value(0.5 * amplitude) - value(-0.5 * amplitude)) / amplitude;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

TransportResult lift_between(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                             const BundlePoint& p, const TransportOptions& opts) {
  IntegratorStats stats;
  std::vector<LiftSample> trace;
  if (opts.record_trace) trace.push_back(LiftSample{s, p});
  BundlePoint end = integrate(a, curve, s, t, p, opts, stats, opts.record_trace ? &trace : nullptr, nullptr);
  GroupElement value = end.fiber;
  return TransportResult{value, std::move(end), std::move(trace), stats};
}

TransportResult horizontal_lift(const LocalConnection& a, const SampledCurve& curve, const BundlePoint& p,
                                double t_end, const TransportOptions& opts) {
  if (!(t_end > 0.0 && t_end <= 1.0)) throw Error(ErrorCode::ParameterOrder, "t_end must lie in (0, 1]");
  return lift_between(a, curve, 0.0, t_end, p, opts);
}

TransportResult parallel_transport_result(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                                          const BundlePoint& p, const BundlePoint& q, const TransportOptions& opts) {
  if (!(s < t)) throw Error(ErrorCode::ParameterOrder, "transport needs s < t");
  TransportResult r = lift_between(a, curve, s, t, p, opts);
  if (!(base_distance(a.bundle(), q, r.end) <= kBaseTol))
    throw Error(ErrorCode::BasePointOffCurve, "end point does not lie over the curve");
  r.value = division_map(a.bundle(), q, r.end);
  return r;
}

GroupElement parallel_transport(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                                const BundlePoint& p, const BundlePoint& q, const TransportOptions& opts) {
  return parallel_transport_result(a, curve, s, t, p, q, opts).value;
}

GroupElement holonomy(const LocalConnection& a, const SampledCurve& loop, const BundlePoint& p,
                      const TransportOptions& opts) {
  if (!loop.is_loop()) throw Error(ErrorCode::NotALoop, "curve is not closed");
  const TransportResult r = lift_between(a, loop, 0.0, 1.0, p, opts);
  return division_map(a.bundle(), p, r.end);
}

DenseLift::DenseLift(const LocalConnection& a, const SampledCurve& curve, const BundlePoint& p,
                     const TransportOptions& opts)
    : a_(&a), curve_(&curve), end_(p) {
  std::vector<PieceRecord> record;
  end_ = integrate(a, curve, 0.0, 1.0, p, opts, stats_, nullptr, &record);
  for (auto& r : record) pieces_.push_back(Piece{r.span, r.h, std::move(r.values)});
}

Matrix DenseLift::fiber_at(double t, int* chart) const {
  std::size_t i = 0;
  while (i + 1 < pieces_.size() && t >= pieces_[i + 1].span.t0) ++i;
  const Piece& piece = pieces_[i];
  const int n = static_cast<int>(piece.values.size()) - 1;
  int k = static_cast<int>(std::floor((t - piece.span.t0) / piece.h));
  k = std::clamp(k, 0, n);
  if (chart) *chart = piece.span.chart;
  const double tk = piece.span.t0 + k * piece.h;
  const double dt = t - tk;
  if (k == n || std::abs(dt) < 1e-15) return piece.values[static_cast<std::size_t>(k)];
  return cf4_step(*a_, *curve_, piece.span, tk, dt, piece.values[static_cast<std::size_t>(k)]);
}

BundlePoint DenseLift::at(double t) const {
  int chart = 0;
  Matrix g = fiber_at(t, &chart);
  const Eigen::VectorXd x = curve_->at_in_chart(t, chart).point.x;
  return BundlePoint{chart, x, GroupElement::projected(a_->bundle().group(), g)};
}

double EquivarianceReport::max() const { return std::max({lie_hol, gauge_hol, lie_partr, gauge_partr}); }

EquivarianceReport check_equivariance_laws(const LocalConnection& a, const GaugeTransformation& sigma,
                                           const SampledCurve& loop, double t, const BundlePoint& p,
                                           const BundlePoint& q, const GroupElement& g, const GroupElement& h,
                                           const TransportOptions& opts) {
  EquivarianceReport r;
  const LocalConnection as = apply_gauge_to_connection(a, sigma);
  const GroupElement hol = holonomy(a, loop, p, opts);
  r.lie_hol = distance(holonomy(a, loop, p * g, opts), g.inverse() * hol * g);
  const GroupElement gs = sigma.g_sigma(p);
  r.gauge_hol = distance(holonomy(as, loop, p, opts), gs.inverse() * hol * gs);
  const GroupElement tr = parallel_transport(a, loop, 0.0, t, p, q, opts);
  r.lie_partr = distance(parallel_transport(a, loop, 0.0, t, p * g, q * h, opts), h.inverse() * tr * g);
  r.gauge_partr = distance(parallel_transport(as, loop, 0.0, t, p, q, opts),
                           sigma.g_sigma(q).inverse() * tr * sigma.g_sigma(p));
  return r;
}

CompositionReport compose_invert_residuals(const LocalConnection& a, const SampledCurve& first,
                                           const SampledCurve& second, const BundlePoint& p,
                                           const TransportOptions& opts) {
  const SampledCurve joined = concat(first, second);
  const PrincipalBundle& bundle = a.bundle();
  const BundlePoint q = reference_point(bundle, first.at(1.0).point);
  const BundlePoint r = reference_point(bundle, second.at(1.0).point);
  const GroupElement t1 = parallel_transport(a, first, 0.0, 1.0, p, q, opts);
  const GroupElement t2 = parallel_transport(a, second, 0.0, 1.0, q, r, opts);
  CompositionReport out;
  out.composition = distance(parallel_transport(a, joined, 0.0, 1.0, p, r, opts), t2 * t1);
  out.inversion = distance(parallel_transport(a, reverse(first), 0.0, 1.0, q, p, opts), t1.inverse());
  return out;
}

BoundaryRestrictionReport boundary_restriction_check(const LocalConnection& a,
                                                     const std::vector<SampledCurve>& loops,
                                                     const std::vector<BundlePoint>& points,
                                                     const TransportOptions& opts) {
  if (loops.size() != points.size()) throw Error(ErrorCode::InvalidArgument, "one point per loop");
  BoundaryRestrictionReport out;
  const int n = a.bundle().group().matrix_dim();
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const SampledCurve& loop = loops[i];
    const BundlePoint& p = points[i];
    auto short_transport = [&](double t) {
      const BundlePoint q{p.chart, loop.at_in_chart(t, p.chart).point.x, p.fiber};
      return parallel_transport(a, loop, 0.0, t, p, q, opts).matrix();
    };
    // Quadratic Richardson extrapolation from t = 1e-4, 5e-5, 2.5e-5.
    const Matrix limit = (8.0 * short_transport(2.5e-5) - 6.0 * short_transport(5e-5) + short_transport(1e-4)) / 3.0;
    out.start = std::max(out.start, (limit - Matrix::Identity(n, n)).norm());
    out.full_loop =
        std::max(out.full_loop, distance(parallel_transport(a, loop, 0.0, 1.0, p, p, opts), holonomy(a, loop, p, opts)));
  }
  return out;
}

double curvature_along(const LocalConnection& a, const SampledCurve& curve, int samples) {
  std::vector<ChartPoint> pts;
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const CurveSample s = curve.at(t);
    const int c = curve.atlas().best_chart(s.point);
    pts.push_back(curve.atlas().convert(s.point, c));
  }
  return max_curvature(a, pts);
}

double flat_homotopy_invariance(const LocalConnection& a, const LoopFamily& family, const BundlePoint& p,
                                BasePointMode mode, const TransportOptions& opts) {
  std::vector<ChartPoint> grid;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j < 32; ++j) {
      const ChartPoint pt = family.at(i / 8.0, j / 32.0).point;
      grid.push_back(family.atlas().convert(pt, family.atlas().best_chart(pt)));
    }
  const double f = max_curvature(a, grid);
  if (f > 1e-8) throw Error(ErrorCode::NotFlat, "sampled curvature " + std::to_string(f));
  if (family.sweep_clearance() <= 0.0) throw Error(ErrorCode::ChartGap, "the family sweeps across a chart gap");

  const int ns = family.s_resolution();
  std::vector<BundlePoint> starts;
  if (mode == BasePointMode::Fixed) {
    for (int i = 0; i <= ns; ++i) {
      if (family.atlas().distance(family.at(i / static_cast<double>(ns), 0.0).point, p.base()) > kBaseTol)
        throw Error(ErrorCode::BasePointOffCurve, "family base point moves; use the moving mode");
      starts.push_back(p);
    }
  } else {
    const LoopFamily* fam = &family;
    SegmentEval track = [fam](double s) { return CurveSample{fam->at(s, 0.0).point, fam->variation(s, 0.0)}; };
    const SampledCurve path(family.atlas_ptr(), {0.0, 1.0}, {track}, 64);
    const DenseLift lift(a, path, p, opts);
    for (int i = 0; i <= ns; ++i) starts.push_back(i == 0 ? p : lift.at(i / static_cast<double>(ns)));
  }
  const GroupElement reference = holonomy(a, family.slice(0.0), starts[0], opts);
  double worst = 0.0;
  for (int i = 1; i <= ns; ++i) {
    const double s = i / static_cast<double>(ns);
    worst = std::max(worst, distance(holonomy(a, family.slice(s), starts[static_cast<std::size_t>(i)], opts), reference));
  }
  return worst;
}

Matrix horizontality_residual(const LocalConnection& a, const SampledCurve& loop, const BundlePoint& p,
                              const LoopVariation& x, const TransportOptions& opts, double amplitude) {
  const GroupSpec& spec = a.bundle().group();
  auto value = [&](double e) {
    const SampledCurve moved = perturb(loop, x.field, x.field_dot, e);
    const BundlePoint pe{p.chart, perturbed_base(moved, 0.0, p.chart),
                         GroupElement::projected(spec, p.fiber.matrix() * exp_vertical(spec, x.vertical_start, e))};
    return holonomy(a, moved, pe, opts).matrix();
  };
  const Matrix dhol = richardson_derivative(value, amplitude);
  const Matrix hol = holonomy(a, loop, p, opts).matrix();
  const Matrix xi = connection_on_variation(a, loop, p, 0.0, x, x.vertical_start);
  return hol.inverse() * (dhol + xi * hol - hol * xi);
}

Matrix transport_intertwine_residual(const LocalConnection& a, const SampledCurve& curve, double t,
                                     const BundlePoint& p, const BundlePoint& q, const LoopVariation& x,
                                     const TransportOptions& opts, double amplitude) {
  const GroupSpec& spec = a.bundle().group();
  auto value = [&](double e) {
    const SampledCurve moved = perturb(curve, x.field, x.field_dot, e);
    const BundlePoint pe{p.chart, perturbed_base(moved, 0.0, p.chart),
                         GroupElement::projected(spec, p.fiber.matrix() * exp_vertical(spec, x.vertical_start, e))};
    const BundlePoint qe{q.chart, perturbed_base(moved, t, q.chart),
                         GroupElement::projected(spec, q.fiber.matrix() * exp_vertical(spec, x.vertical_end, e))};
    return parallel_transport(a, moved, 0.0, t, pe, qe, opts).matrix();
  };
  const Matrix dt = richardson_derivative(value, amplitude);
  const Matrix tr = parallel_transport(a, curve, 0.0, t, p, q, opts).matrix();
  const Matrix xi_p = connection_on_variation(a, curve, p, 0.0, x, x.vertical_start);
  const Matrix xi_q = connection_on_variation(a, curve, q, t, x, x.vertical_end);
  return tr.inverse() * (dt + xi_q * tr - tr * xi_p);
}

Matrix flat_transport_intertwine(const LocalConnection& a, const SampledCurve& curve, double t,
                                 const BundlePoint& p, const BundlePoint& q, const LoopVariation& x,
                                 const TransportOptions& opts, double amplitude) {
  const double f = curvature_along(a, curve);
  if (f > 1e-8) throw Error(ErrorCode::NotFlat, "sampled curvature " + std::to_string(f));
  return transport_intertwine_residual(a, curve, t, p, q, x, opts, amplitude);
}

SmallLoopEstimate curvature_small_loop(const LocalConnection& a, int chart, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& u, const Eigen::VectorXd& v, double eps,
                                       const TransportOptions& opts) {
  const auto& atlas = a.bundle().atlas_ptr();
  const Eigen::VectorXd c0 = x - 0.5 * eps * (u + v);
  const std::vector<Eigen::VectorXd> corners{c0, c0 + eps * u, c0 + eps * (u + v), c0 + eps * v, c0};
  for (std::size_t k = 0; k + 1 < corners.size(); ++k)
    for (int j = 0; j <= 8; ++j) {
      const Eigen::VectorXd pt = corners[k] + (j / 8.0) * (corners[k + 1] - corners[k]);
      if (!atlas->contains(chart, pt)) throw Error(ErrorCode::LoopLeftChart, "the small loop leaves the chart");
    }
  if (!atlas->contains(chart, x)) throw Error(ErrorCode::LoopLeftChart, "centre outside the chart");
  const PrincipalBundle& bundle = a.bundle();
  const BundlePoint start = reference_point(bundle, ChartPoint{chart, c0});
  const SampledCurve loop = SampledCurve::polygon(atlas, chart, corners);
  const GroupElement hol = holonomy(a, loop, start, opts);
  const SampledCurve spoke = SampledCurve::polygon(atlas, chart, {x, c0});
  const GroupElement to_corner =
      parallel_transport(a, spoke, 0.0, 1.0, reference_point(bundle, ChartPoint{chart, x}), start, opts);
  const GroupElement centred = to_corner.inverse() * hol * to_corner;
  const AlgebraElement log = group_log(centred);
  return SmallLoopEstimate{(-1.0 / (eps * eps)) * log, eps};
}

}  // namespace holo
