#pragma once

#include <vector>

#include "holo/bundle.hpp"
#include "holo/geometry.hpp"

namespace holo {

struct TransportOptions {
  double step = 1e-3;
  bool record_trace = false;
};

struct LiftSample {
  double t = 0.0;
  BundlePoint point;
};

struct IntegratorStats {
  std::size_t steps = 0;
  double max_membership_residual = 0.0;
};

struct TransportResult {
  GroupElement value;
  BundlePoint end;
  std::vector<LiftSample> trace;
  IntegratorStats stats;
};

// Horizontal lift over [0, t_end] starting at p over curve(0); value is the fibre coordinate of the endpoint.
TransportResult horizontal_lift(const LocalConnection& a, const SampledCurve& curve, const BundlePoint& p,
                                double t_end, const TransportOptions& opts = {});
// Lift over [s, t] starting at p over curve(s).
TransportResult lift_between(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                             const BundlePoint& p, const TransportOptions& opts = {});
// The element T with lift_p(t) = q * T.
TransportResult parallel_transport_result(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                                          const BundlePoint& p, const BundlePoint& q,
                                          const TransportOptions& opts = {});
GroupElement parallel_transport(const LocalConnection& a, const SampledCurve& curve, double s, double t,
                                const BundlePoint& p, const BundlePoint& q, const TransportOptions& opts = {});
GroupElement holonomy(const LocalConnection& a, const SampledCurve& loop, const BundlePoint& p,
                      const TransportOptions& opts = {});

// Horizontal lift over [0, 1] that can be evaluated at any parameter.
class DenseLift {
 public:
  DenseLift(const LocalConnection& a, const SampledCurve& curve, const BundlePoint& p,
            const TransportOptions& opts = {});

  // The lift at t, in the chart of the itinerary piece covering t.
  BundlePoint at(double t) const;
  // Fibre matrix of at(t) together with its chart.
  Matrix fiber_at(double t, int* chart) const;
  const BundlePoint& end() const { return end_; }
  const IntegratorStats& stats() const { return stats_; }

 private:
  struct Piece {
    ChartPiece span;
    double h = 0.0;
    std::vector<Matrix> values;
  };
  const LocalConnection* a_;
  const SampledCurve* curve_;
  std::vector<Piece> pieces_;
  BundlePoint end_;
  IntegratorStats stats_;
};

struct EquivarianceReport {
  double lie_hol = 0.0;
  double gauge_hol = 0.0;
  double lie_partr = 0.0;
  double gauge_partr = 0.0;
  double max() const;
};

// Right-translation and gauge laws for holonomy at p and for transport from p (over loop(0)) to q (over loop(t)).
EquivarianceReport check_equivariance_laws(const LocalConnection& a, const GaugeTransformation& sigma,
                                           const SampledCurve& loop, double t, const BundlePoint& p,
                                           const BundlePoint& q, const GroupElement& g, const GroupElement& h,
                                           const TransportOptions& opts = {});

struct CompositionReport {
  double composition = 0.0;
  double inversion = 0.0;
};

// Transport along concat(first, second) against the product of the two transports, and along reverse(first)
// against the inverse; intermediate points are reference points.
CompositionReport compose_invert_residuals(const LocalConnection& a, const SampledCurve& first,
                                           const SampledCurve& second, const BundlePoint& p,
                                           const TransportOptions& opts = {});

struct BoundaryRestrictionReport {
  double start = 0.0;
  double full_loop = 0.0;
};

// Transport over [0, t] as t -> 0 (Richardson limit from t = 1e-4, 5e-5, 2.5e-5) and over the full loop with q = p.
BoundaryRestrictionReport boundary_restriction_check(const LocalConnection& a,
                                                     const std::vector<SampledCurve>& loops,
                                                     const std::vector<BundlePoint>& points,
                                                     const TransportOptions& opts = {});

enum class BasePointMode { Fixed, Moving };

// Largest deviation of the holonomy over the family from that of slice 0.
double flat_homotopy_invariance(const LocalConnection& a, const LoopFamily& family, const BundlePoint& p,
                                BasePointMode mode = BasePointMode::Moving, const TransportOptions& opts = {});

// A tangent vector to loop space at (loop, p): a field along the loop plus vertical directions at the ends.
struct LoopVariation {
  VectorField field;
  VectorField field_dot;
  Matrix vertical_start;
  Matrix vertical_end;
};

constexpr double kVariationAmplitude = 1e-4;

// d hol(X) + xi hol - hol xi with xi = A_p(X_p), returned as hol^{-1} times the residual.
Matrix horizontality_residual(const LocalConnection& a, const SampledCurve& loop, const BundlePoint& p,
                              const LoopVariation& x, const TransportOptions& opts = {},
                              double amplitude = kVariationAmplitude);
// d T(X) + xi_q T - T xi_p for the transport T from p (over curve(0)) to q (over curve(t)), as T^{-1} times it.
Matrix transport_intertwine_residual(const LocalConnection& a, const SampledCurve& curve, double t,
                                     const BundlePoint& p, const BundlePoint& q, const LoopVariation& x,
                                     const TransportOptions& opts = {}, double amplitude = kVariationAmplitude);
// As above after checking flatness along the curve (NotFlat otherwise).
Matrix flat_transport_intertwine(const LocalConnection& a, const SampledCurve& curve, double t,
                                 const BundlePoint& p, const BundlePoint& q, const LoopVariation& x,
                                 const TransportOptions& opts = {}, double amplitude = kVariationAmplitude);

// Largest curvature norm at `samples` points along the curve.
double curvature_along(const LocalConnection& a, const SampledCurve& curve, int samples = 33);

struct SmallLoopEstimate {
  AlgebraElement value;
  double eps;
};

// -log(holonomy around the eps-parallelogram centred at x) / eps^2, conjugated back to the centre.
SmallLoopEstimate curvature_small_loop(const LocalConnection& a, int chart, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& u, const Eigen::VectorXd& v, double eps,
                                       const TransportOptions& opts = {});

}  // namespace holo
