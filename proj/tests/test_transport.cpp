#include <gtest/gtest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "holo/errors.hpp"
#include "holo/presets.hpp"
#include "holo/transport.hpp"

using namespace holo;

namespace {

constexpr Complex kI(0.0, 1.0);

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

BundlePoint start_of(const BundleSetup& s, const SampledCurve& c) {
  return reference_point(*s.bundle, c.at(0.0).point);
}

AlgebraElement su2(double a, double b, double c) {
  return AlgebraElement::from_coords(GroupSpec::su2(), Eigen::Vector3d(a, b, c));
}

// Exact U1 phase around a cap of polar radius theta for a charge-q monopole.
Complex cap_phase(int q, double theta) { return std::exp(-kI * double(q) * M_PI * (1.0 - std::cos(theta))); }

}  // namespace

TEST(Holonomy, TrivialConnectionGivesIdentity) {
  const BundleSetup s = trivial_setup(GroupSpec::su2());
  for (const SampledCurve& c : {circle_loop(make_plane(), {0.2, 0.1}, 0.7), ellipse_loop(make_plane(), {0, 0}, 1, 0.3)}) {
    const GroupElement h = holonomy(s.connection, c, start_of(s, c));
    EXPECT_LT(distance(h, GroupElement::identity(GroupSpec::su2())), 1e-12);
  }
}

TEST(Holonomy, FlatAngleIsExponentialOfWinding) {
  const AlgebraElement xi = su2(0.3, 0.1, -0.2);
  const BundleSetup s = flat_angle_setup(xi);
  for (int w : {1, 2, -1}) {
    const SampledCurve c = circle_loop(make_punctured_plane(), {0.1, 0.0}, 0.8, w);
    const GroupElement h = holonomy(s.connection, c, start_of(s, c), {1e-3});
    // The lift solves g' = -A(v) g, and A(v) = xi dphi(v) integrates to 2 pi w xi.
    const Matrix expected = Matrix((-2.0 * M_PI * w) * xi.matrix()).exp();
    EXPECT_LT(max_abs(h.matrix() - expected), 1e-9) << "winding " << w;
  }
  // A loop that does not enclose the puncture has trivial holonomy.
  const SampledCurve away = circle_loop(make_punctured_plane(), {2.0, 0.0}, 0.5);
  EXPECT_LT(distance(holonomy(s.connection, away, start_of(s, away)), GroupElement::identity(GroupSpec::su2())), 1e-9);
}

TEST(Holonomy, MonopoleLatitudes) {
  for (int q : {1, 2, -1}) {
    const BundleSetup s = monopole_setup(q);
    for (double theta : {0.4, 1.0, 2.5}) {
      const SampledCurve c = latitude_loop(make_sphere(), theta);
      const GroupElement h = holonomy(s.connection, c, start_of(s, c));
      EXPECT_LT(std::abs(h.matrix()(0, 0) - cap_phase(q, theta)), 1e-9) << "q " << q << " theta " << theta;
    }
  }
}

TEST(Holonomy, MonopoleTiltedCircleCrossingCharts) {
  const BundleSetup s = monopole_setup(1);
  for (double tilt : {0.0, 1.4, 2.0}) {
    const SampledCurve c = tilted_circle(make_sphere(), 0.6, tilt);
    const GroupElement h = holonomy(s.connection, c, start_of(s, c));
    EXPECT_LT(std::abs(h.matrix()(0, 0) - cap_phase(1, 0.6)), 1e-8) << "tilt " << tilt;
  }
}

TEST(Holonomy, FourthOrderConvergence) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 11, 2, 0.8);
  const SampledCurve c = ellipse_loop(make_plane(), {0.1, -0.2}, 1.0, 0.6);
  const BundlePoint p = start_of(s, c);
  const Matrix ref = holonomy(s.connection, c, p, {0.05 / 8}).matrix();
  const double e1 = max_abs(holonomy(s.connection, c, p, {0.05}).matrix() - ref);
  const double e2 = max_abs(holonomy(s.connection, c, p, {0.025}).matrix() - ref);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Holonomy, RejectsOpenCurves) {
  const BundleSetup s = trivial_setup(GroupSpec::su2());
  const SampledCurve arc = circle_arc(make_plane(), {0, 0}, 1.0, 0.0, 2.0);
  try {
    holonomy(s.connection, arc, start_of(s, arc));
    FAIL() << "expected NotALoop";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotALoop);
  }
}

TEST(Transport, ParameterOrderAndOffCurveErrors) {
  const BundleSetup s = trivial_setup(GroupSpec::su2());
  const SampledCurve c = circle_loop(make_plane(), {0, 0}, 1.0);
  const BundlePoint p = start_of(s, c);
  const BundlePoint q = reference_point(*s.bundle, c.at(0.5).point);
  auto code = [&](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([&] { parallel_transport(s.connection, c, 0.5, 0.2, q, p); }), ErrorCode::ParameterOrder);
  EXPECT_EQ(code([&] { parallel_transport(s.connection, c, 0.0, 0.5, q, q); }), ErrorCode::BasePointOffCurve);
  EXPECT_EQ(code([&] { parallel_transport(s.connection, c, 0.0, 0.5, p, p); }), ErrorCode::BasePointOffCurve);
}

TEST(Transport, EquivarianceLaws) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 12, 2);
  const GaugeTransformation sigma = random_polynomial_gauge(s.bundle, 13, 2);
  const SampledCurve c = ellipse_loop(make_plane(), {0.0, 0.1}, 0.9, 0.6, 0.3);
  Rng rng(14);
  for (int k = 0; k < 3; ++k) {
    const BundlePoint p = start_of(s, c) * random_group_element(GroupSpec::su2(), rng);
    const BundlePoint q = reference_point(*s.bundle, c.at(0.4).point) * random_group_element(GroupSpec::su2(), rng);
    const EquivarianceReport r =
        check_equivariance_laws(s.connection, sigma, c, 0.4, p, q, random_group_element(GroupSpec::su2(), rng),
                                random_group_element(GroupSpec::su2(), rng));
    EXPECT_LT(r.max(), 1e-7);
  }
}

TEST(Transport, MonopoleGaugeAcrossCharts) {
  const BundleSetup s = monopole_setup(2);
  const SampledCurve c = tilted_circle(make_sphere(), 0.6, 1.4);
  const BundlePoint p = start_of(s, c) * GroupElement::u1_phase(0.4);
  // Start and end in the other chart.
  const BundlePoint p1 = change_chart(*s.bundle, p, 1);
  const GroupElement h0 = holonomy(s.connection, c, p);
  const GroupElement h1 = holonomy(s.connection, c, p1);
  EXPECT_LT(distance(h0, h1), 1e-8);
}

TEST(Transport, CompositionAndInversion) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 15, 2);
  const SampledCurve first = circle_arc(make_plane(), {0, 0}, 1.0, 0.0, 2.0);
  const SampledCurve second = SampledCurve::polygon(make_plane(), 0, {first.at(1.0).point.x, Eigen::Vector2d(0.3, 0.4)});
  const CompositionReport r = compose_invert_residuals(s.connection, first, second, start_of(s, first));
  EXPECT_LT(r.composition, 1e-8);
  EXPECT_LT(r.inversion, 1e-8);
}

TEST(Transport, BoundaryRestriction) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 16, 2);
  std::vector<SampledCurve> loops{circle_loop(make_plane(), {0.1, 0}, 0.8), ellipse_loop(make_plane(), {0, 0}, 1, 0.5)};
  std::vector<BundlePoint> points{start_of(s, loops[0]), start_of(s, loops[1])};
  const BoundaryRestrictionReport r = boundary_restriction_check(s.connection, loops, points);
  EXPECT_LT(r.start, 1e-7);
  EXPECT_LT(r.full_loop, 1e-7);
}

TEST(FlatHomotopy, HolonomyIsConstantAlongFamilies) {
  const BundleSetup s = flat_angle_setup(su2(0.3, 0.1, -0.2));
  const LoopFamily radial = radial_family(make_punctured_plane(), 0.5, 1.5);
  const BundlePoint p = reference_point(*s.bundle, radial.at(0.0, 0.0).point);
  EXPECT_LT(flat_homotopy_invariance(s.connection, radial, p, BasePointMode::Fixed), 1e-8);
  const LoopFamily wobble = wobble_family(make_punctured_plane());
  const BundlePoint w = reference_point(*s.bundle, wobble.at(0.0, 0.0).point);
  EXPECT_LT(flat_homotopy_invariance(s.connection, wobble, w, BasePointMode::Moving), 1e-8);
}

TEST(FlatHomotopy, CrossingThePunctureIsRejected) {
  const BundleSetup s = flat_angle_setup(su2(0.3, 0.1, -0.2));
  const LoopFamily crossing = crossing_family(make_punctured_plane());
  const BundlePoint p = reference_point(*s.bundle, crossing.at(0.0, 0.0).point);
  try {
    flat_homotopy_invariance(s.connection, crossing, p);
    FAIL() << "expected ChartGap";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChartGap);
  }
}

TEST(FlatHomotopy, CurvedConnectionIsRejected) {
  const BundleSetup s = monopole_setup(1);
  const LoopFamily fam = latitude_family(make_sphere(), 0.5, 1.0);
  const BundlePoint p = reference_point(*s.bundle, fam.at(0.0, 0.0).point);
  try {
    flat_homotopy_invariance(s.connection, fam, p);
    FAIL() << "expected NotFlat";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFlat);
  }
}

TEST(Horizontality, FlatHolonomyIsHorizontal) {
  const BundleSetup s = flat_angle_setup(su2(0.3, 0.1, -0.2));
  const SampledCurve c = circle_loop(make_punctured_plane(), {0.1, 0.0}, 0.8);
  const double w = 2.0 * M_PI;
  const Matrix vert = su2(0.2, -0.5, 0.1).matrix();
  LoopVariation x{[w](double t) { return Eigen::VectorXd(Eigen::Vector2d(0.3 * std::cos(w * t), 0.2 * std::sin(2 * w * t))); },
                  [w](double t) { return Eigen::VectorXd(Eigen::Vector2d(-0.3 * w * std::sin(w * t), 0.4 * w * std::cos(2 * w * t))); },
                  vert, vert};
  EXPECT_LT(max_abs(horizontality_residual(s.connection, c, start_of(s, c), x)), 1e-6);
  const BundlePoint q = reference_point(*s.bundle, c.at(0.3).point);
  EXPECT_LT(max_abs(flat_transport_intertwine(s.connection, c, 0.3, start_of(s, c), q, x)), 1e-6);
}

TEST(Horizontality, CurvatureBreaksHorizontality) {
  const BundleSetup s = monopole_setup(1);
  const SampledCurve c = latitude_loop(make_sphere(), 1.0);
  LoopVariation x{[](double) { return Eigen::VectorXd(Eigen::Vector2d(0.0, 0.0)); },
                  [](double) { return Eigen::VectorXd(Eigen::Vector2d(0.0, 0.0)); }, Matrix::Zero(1, 1),
                  Matrix::Zero(1, 1)};
  const double w = 2.0 * M_PI;
  // Radial dilation of the latitude in chart coordinates changes the enclosed flux.
  const double rho = std::tan(0.5);
  x.field = [=](double t) { return Eigen::VectorXd(0.2 * rho * Eigen::Vector2d(std::cos(w * t), std::sin(w * t))); };
  x.field_dot = [=](double t) { return Eigen::VectorXd(0.2 * rho * w * Eigen::Vector2d(-std::sin(w * t), std::cos(w * t))); };
  const Matrix r = horizontality_residual(s.connection, c, start_of(s, c), x);
  // d/de of -i pi (1 - cos theta) with rho -> (1 + 0.2 e) rho is -i 2 pi 0.2 rho^2 2 / (1 + rho^2)^2.
  const double flux = 2.0 * M_PI * 0.2 * 2.0 * rho * rho / ((1 + rho * rho) * (1 + rho * rho));
  EXPECT_NEAR(std::abs(r(0, 0)), flux, 1e-5);
  const BundlePoint q = reference_point(*s.bundle, c.at(0.3).point);
  try {
    flat_transport_intertwine(s.connection, c, 0.3, start_of(s, c), q, x);
    FAIL() << "expected NotFlat";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFlat);
  }
}

TEST(Curvature, SmallLoopMatchesAnalytic) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 17, 2);
  const Eigen::Vector2d x(0.2, -0.3), u(1, 0), v(0, 1);
  const AlgebraElement f = curvature(s.connection, 0, x, u, v);
  const double e1 = (curvature_small_loop(s.connection, 0, x, u, v, 0.02, {1e-4}).value - f).norm();
  const double e2 = (curvature_small_loop(s.connection, 0, x, u, v, 0.01, {1e-4}).value - f).norm();
  EXPECT_LT(e2, 1e-3);
  // The centred estimate has an O(eps^2) error.
  EXPECT_GT(e1 / e2, 3.0);
}

TEST(Curvature, CurvatureAlongFlatAndCurved) {
  const BundleSetup flat = flat_angle_setup(su2(0.3, 0.1, -0.2));
  const BundleSetup mono = monopole_setup(1);
  EXPECT_LT(curvature_along(flat.connection, circle_loop(make_punctured_plane(), {0, 0}, 1.0)), 1e-10);
  EXPECT_GT(curvature_along(mono.connection, latitude_loop(make_sphere(), 1.0)), 0.1);
}

TEST(DenseLift, MatchesPointwiseLift) {
  const BundleSetup s = monopole_setup(1);
  const SampledCurve c = tilted_circle(make_sphere(), 0.6, 1.4);
  const BundlePoint p = start_of(s, c);
  const DenseLift lift(s.connection, c, p);
  for (double t : {0.13, 0.5, 0.87}) {
    const BundlePoint a = lift.at(t);
    const BundlePoint b = horizontal_lift(s.connection, c, p, t).end;
    EXPECT_LT(point_distance(*s.bundle, a, b), 1e-8) << t;
  }
}
