#include <gtest/gtest.h>

#include <cmath>

#include "holo/bundle.hpp"
#include "holo/errors.hpp"
#include "holo/presets.hpp"

using namespace holo;

namespace {

std::vector<ChartPoint> sphere_samples() {
  std::vector<ChartPoint> pts;
  for (int i = 1; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pts.push_back(ChartPoint{0, sphere_chart_coords(0, 0.35 * i, 0.8 * j)});
  return pts;
}

std::vector<ChartPoint> plane_samples() {
  std::vector<ChartPoint> pts;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) pts.push_back(ChartPoint{0, Eigen::Vector2d(-1.0 + 0.5 * i, -1.0 + 0.5 * j)});
  return pts;
}

GenGauge random_gen_gauge(BundlePtr bundle, std::uint64_t seed) {
  Rng rng(seed);
  const AlgebraElement a = random_algebra_element(bundle->group(), rng);
  const AlgebraElement b = random_algebra_element(bundle->group(), rng);
  const GroupElement c = random_group_element(bundle->group(), rng);
  const GroupSpec spec = bundle->group();
  return GenGauge(bundle, bundle, [a, b, c, spec](int, const Eigen::VectorXd& x) {
    return Matrix(c.matrix() * exp_matrix(spec, x[0] * a.matrix() + x[1] * x[1] * b.matrix()));
  });
}

}  // namespace

TEST(Monopole, CocycleAndConnectionOverlap) {
  const BundleSetup m = monopole_setup(2);
  EXPECT_LT(m.bundle->cocycle_residual(sphere_samples()), 1e-12);
  // The transition derivative is taken by central differences.
  EXPECT_LT(m.connection.overlap_residual(sphere_samples()), 1e-6);
}

TEST(Monopole, CurvatureClosedForm) {
  for (int q : {1, -2}) {
    const BundleSetup m = monopole_setup(q);
    const Eigen::Vector2d x(0.3, -0.6);
    const double r2 = x.squaredNorm();
    // d of i q (X dY - Y dX) / (1 + r^2) is 2 i q / (1 + r^2)^2 dX ^ dY; the other chart flips the sign.
    const AlgebraElement f0 = curvature(m.connection, 0, x, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1));
    const AlgebraElement f1 = curvature(m.connection, 1, x, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1));
    EXPECT_NEAR(f0.matrix()(0, 0).imag(), 2.0 * q / ((1 + r2) * (1 + r2)), 1e-9);
    EXPECT_NEAR(f1.matrix()(0, 0).imag(), -2.0 * q / ((1 + r2) * (1 + r2)), 1e-9);
  }
}

TEST(FlatAngle, HasNoCurvature) {
  const BundleSetup s = flat_angle_setup(AlgebraElement::from_coords(GroupSpec::su2(), Eigen::Vector3d(0.2, -0.4, 0.1)));
  std::vector<ChartPoint> pts;
  for (const auto& p : plane_samples())
    if (p.x.norm() > 0.1) pts.push_back(p);
  EXPECT_LT(max_curvature(s.connection, pts), 1e-12);
}

TEST(DivisionMap, CanonicalIdentities) {
  const BundleSetup m = monopole_setup(1);
  Rng rng(21);
  for (const auto& base : sphere_samples()) {
    const BundlePoint p = reference_point(*m.bundle, base) * random_group_element(GroupSpec::u1(), rng);
    const BundlePoint q = change_chart(*m.bundle, p * random_group_element(GroupSpec::u1(), rng), 1);
    const GroupElement g = random_group_element(GroupSpec::u1(), rng), h = random_group_element(GroupSpec::u1(), rng);
    EXPECT_LT(distance(division_map(*m.bundle, p, p), GroupElement::identity(GroupSpec::u1())), 1e-12);
    EXPECT_LT(distance(division_map(*m.bundle, q, p), division_map(*m.bundle, p, q).inverse()), 1e-12);
    EXPECT_LT(distance(division_map(*m.bundle, p * g, q * h), g.inverse() * division_map(*m.bundle, p, q) * h), 1e-12);
    EXPECT_LT(point_distance(*m.bundle, p * division_map(*m.bundle, p, q), q), 1e-12);
  }
  const BundlePoint a = reference_point(*m.bundle, sphere_samples()[0]);
  const BundlePoint b = reference_point(*m.bundle, sphere_samples()[9]);
  try {
    division_map(*m.bundle, a, b);
    FAIL() << "expected BaseMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaseMismatch);
  }
}

TEST(Gauge, CurvatureTransformsByAdjoint) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 3, 2);
  const GaugeTransformation sigma = random_polynomial_gauge(s.bundle, 4, 2);
  const LocalConnection as = apply_gauge_to_connection(s.connection, sigma);
  for (const auto& p : plane_samples()) {
    const Eigen::Vector2d u(1, 0), v(0, 1);
    const AlgebraElement f = curvature(s.connection, 0, p.x, u, v);
    const AlgebraElement fs = curvature(as, 0, p.x, u, v);
    EXPECT_LT((fs.matrix() - adjoint(sigma.local(0, p.x).inverse(), f).matrix()).norm(), 1e-7);
  }
}

TEST(Gauge, AnalyticPartialsMatchDifferences) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 5, 2);
  const GaugeTransformation sigma = random_polynomial_gauge(s.bundle, 6, 2);
  const Eigen::Vector2d x(0.4, -0.3);
  const auto d = sigma.partials(0, x);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Matrix fd = (sigma.local(0, xp).matrix() - sigma.local(0, xm).matrix()) / (2 * h);
    EXPECT_LT((d[static_cast<std::size_t>(k)] - fd).norm(), 1e-8);
  }
}

TEST(GenGauge, StarIsPointwiseComposition) {
  const auto setup = trivial_setup(GroupSpec::su2());
  const GenGauge k12 = random_gen_gauge(setup.bundle, 1), k23 = random_gen_gauge(setup.bundle, 2);
  const GenGauge k13 = star(k23, k12);
  Rng rng(30);
  for (const auto& base : plane_samples()) {
    const BundlePoint s = reference_point(*setup.bundle, base);
    const BundlePoint p1 = s * random_group_element(GroupSpec::su2(), rng);
    const BundlePoint p2 = s * random_group_element(GroupSpec::su2(), rng);
    const BundlePoint p3 = s * random_group_element(GroupSpec::su2(), rng);
    EXPECT_LT(distance(k13(p1, p3), k23(p2, p3) * k12(p1, p2)), 1e-12);
  }
}

TEST(GenGauge, AssociativityUnitAndInverse) {
  const auto setup = trivial_setup(GroupSpec::su2());
  const GenGauge a = random_gen_gauge(setup.bundle, 3), b = random_gen_gauge(setup.bundle, 4),
                 c = random_gen_gauge(setup.bundle, 5);
  const GenGauge unit = identity_gen_gauge(setup.bundle);
  Rng rng(31);
  for (const auto& base : plane_samples()) {
    const BundlePoint s = reference_point(*setup.bundle, base);
    const BundlePoint p = s * random_group_element(GroupSpec::su2(), rng);
    const BundlePoint q = s * random_group_element(GroupSpec::su2(), rng);
    EXPECT_LT(distance(star(star(a, b), c)(p, q), star(a, star(b, c))(p, q)), 1e-10);
    EXPECT_LT(distance(star(unit, a)(p, q), a(p, q)), 1e-12);
    EXPECT_LT(distance(star(a, unit)(p, q), a(p, q)), 1e-12);
    // The unit is the inverse division map.
    EXPECT_LT(distance(unit(p, q), division_map(*setup.bundle, p, q).inverse()), 1e-12);
    EXPECT_LT(distance(star(a, inverse_gen_gauge(a))(p, q), unit(p, q)), 1e-10);
    EXPECT_LT(distance(star(inverse_gen_gauge(a), a)(p, q), unit(p, q)), 1e-10);
  }
}

TEST(GenGauge, MorphismRoundTrip) {
  const auto setup = trivial_setup(GroupSpec::su2());
  const GenGauge k = random_gen_gauge(setup.bundle, 7);
  const BundleMorphism f = morphism_from_gen_gauge(k);
  const GenGauge back = gen_gauge_from_morphism(setup.bundle, setup.bundle, f, plane_samples());
  for (const auto& p : plane_samples()) EXPECT_LT(distance(back.local(0, p.x), k.local(0, p.x)), 1e-10);
  // A morphism that is not equivariant is rejected.
  BundleMorphism bad = [](const BundlePoint& p) {
    return BundlePoint{p.chart, p.x, GroupElement::projected(GroupSpec::su2(), p.fiber.matrix() * p.fiber.matrix())};
  };
  try {
    gen_gauge_from_morphism(setup.bundle, setup.bundle, bad, plane_samples());
    FAIL() << "expected NotEquivariant";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotEquivariant);
  }
}

TEST(GenGauge, GaugeRoundTrip) {
  const BundleSetup s = random_polynomial_setup(GroupSpec::su2(), 8, 1);
  const GaugeTransformation sigma = random_polynomial_gauge(s.bundle, 9, 2);
  const GaugeTransformation back = gauge_from_gen_gauge(gen_gauge_from_gauge(sigma));
  Rng rng(32);
  for (const auto& base : plane_samples()) {
    EXPECT_LT(distance(back.local(0, base.x), sigma.local(0, base.x)), 1e-10);
    const BundlePoint p = reference_point(*s.bundle, base) * random_group_element(GroupSpec::su2(), rng);
    EXPECT_LT(point_distance(*s.bundle, back.apply(p), sigma.apply(p)), 1e-10);
  }
}

TEST(GenGauge, StarRejectsMismatchedBundles) {
  const auto a = trivial_setup(GroupSpec::su2());
  const auto b = trivial_setup(GroupSpec::su2());
  try {
    star(identity_gen_gauge(a.bundle), identity_gen_gauge(b.bundle));
    FAIL() << "expected CompositionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CompositionMismatch);
  }
}

TEST(FibredProduct, FlatIffBothFactorsFlat) {
  const AlgebraElement xi = AlgebraElement::from_coords(GroupSpec::su2(), Eigen::Vector3d(0.1, 0.2, 0.3));
  const BundleSetup f1 = flat_angle_setup(xi), f2 = flat_angle_setup(2.0 * xi);
  std::vector<ChartPoint> pts;
  for (const auto& p : plane_samples())
    if (p.x.norm() > 0.1) pts.push_back(p);
  EXPECT_TRUE(fibred_connection_flat(f1.connection, f2.connection, pts));
  const BundleSetup curved = random_polynomial_setup(GroupSpec::su2(), 10, 2);
  const BundleSetup trivial = trivial_setup(GroupSpec::su2());
  EXPECT_FALSE(fibred_connection_flat(trivial.connection, curved.connection, plane_samples()));
}
