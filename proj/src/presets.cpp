#include "holo/presets.hpp"

#include <cmath>

namespace holo {

namespace {

constexpr Complex kI(0.0, 1.0);

double power(double x, int k) { return k == 0 ? 1.0 : std::pow(x, k); }

Eigen::Vector2d stereo(int chart, const Eigen::Vector3d& p) {
  const double d = chart == 0 ? 1.0 + p.z() : 1.0 - p.z();
  return Eigen::Vector2d(p.x() / d, p.y() / d);
}

Eigen::Vector2d stereo_velocity(int chart, const Eigen::Vector3d& p, const Eigen::Vector3d& dp) {
  const double sign = chart == 0 ? 1.0 : -1.0;
  const double d = 1.0 + sign * p.z();
  return Eigen::Vector2d(dp.x() / d - sign * p.x() * dp.z() / (d * d), dp.y() / d - sign * p.y() * dp.z() / (d * d));
}

}  // namespace

std::vector<std::pair<int, int>> monomials(int degree) {
  std::vector<std::pair<int, int>> out;
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) out.emplace_back(a, total - a);
  return out;
}

BundleSetup trivial_setup(const GroupSpec& spec, std::shared_ptr<const Atlas> atlas) {
  auto bundle = std::make_shared<const PrincipalBundle>(std::move(atlas), spec, std::vector<Transition>{}, "trivial");
  return BundleSetup{bundle, LocalConnection::zero(bundle), "trivial", true};
}

BundleSetup flat_angle_setup(const AlgebraElement& xi) {
  const GroupSpec spec = xi.spec();
  auto bundle = std::make_shared<const PrincipalBundle>(make_punctured_plane(), spec, std::vector<Transition>{},
                                                        "flat-angle");
  const Matrix m = xi.matrix();
  ConnectionChart c;
  c.components = [m](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm();
    return std::vector<Matrix>{(-x[1] / r2) * m, (x[0] / r2) * m};
  };
  c.partials = [m](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm(), r4 = r2 * r2;
    const double xy = 2.0 * x[0] * x[1] / r4, diff = (x[1] * x[1] - x[0] * x[0]) / r4;
    // index j * 2 + k holds d_j A_k
    return std::vector<Matrix>{xy * m, diff * m, diff * m, -xy * m};
  };
  return BundleSetup{bundle, LocalConnection(bundle, {c}), "flat-angle", true};
}

BundleSetup monopole_setup(int charge) {
  const double q = charge;
  Transition t{0, 1, [q](const Eigen::VectorXd& x) {
                 Matrix m(1, 1);
                 m(0, 0) = std::polar(1.0, -q * std::atan2(x[1], x[0]));
                 return m;
               }};
  auto bundle = std::make_shared<const PrincipalBundle>(make_sphere(), GroupSpec::u1(), std::vector<Transition>{t},
                                                        "monopole");
  auto chart_connection = [q](double sign) {
    ConnectionChart c;
    c.components = [q, sign](const Eigen::VectorXd& x) {
      const double d = 1.0 + x.squaredNorm();
      Matrix ax(1, 1), ay(1, 1);
      ax(0, 0) = sign * kI * q * (-x[1] / d);
      ay(0, 0) = sign * kI * q * (x[0] / d);
      return std::vector<Matrix>{ax, ay};
    };
    c.partials = [q, sign](const Eigen::VectorXd& x) {
      const double d = 1.0 + x.squaredNorm(), d2 = d * d;
      const Complex s = sign * kI * q;
      Matrix dxax(1, 1), dxay(1, 1), dyax(1, 1), dyay(1, 1);
      dxax(0, 0) = s * (2.0 * x[0] * x[1] / d2);
      dxay(0, 0) = s * (1.0 / d - 2.0 * x[0] * x[0] / d2);
      dyax(0, 0) = s * (-1.0 / d + 2.0 * x[1] * x[1] / d2);
      dyay(0, 0) = s * (-2.0 * x[0] * x[1] / d2);
      return std::vector<Matrix>{dxax, dxay, dyax, dyay};
    };
    return c;
  };
  return BundleSetup{bundle, LocalConnection(bundle, {chart_connection(1.0), chart_connection(-1.0)}), "monopole",
                     false};
}

BundleSetup random_polynomial_setup(const GroupSpec& spec, std::uint64_t seed, int degree, double scale) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  Rng rng(seed);
  const auto mono = monomials(degree);
  std::vector<std::vector<Matrix>> coeffs(2);
  for (int k = 0; k < 2; ++k)
    for (const auto& [a, b] : mono)
      coeffs[static_cast<std::size_t>(k)].push_back(random_algebra_element(spec, rng, scale / (1.0 + a + b)).matrix());
  auto bundle = std::make_shared<const PrincipalBundle>(make_plane(), spec, std::vector<Transition>{},
                                                        "random-polynomial");
  const int n = spec.matrix_dim();
  ConnectionChart c;
  c.components = [coeffs, mono, n](const Eigen::VectorXd& x) {
    std::vector<Matrix> out(2, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const double w = power(x[0], mono[i].first) * power(x[1], mono[i].second);
      out[0] += w * coeffs[0][i];
      out[1] += w * coeffs[1][i];
    }
    return out;
  };
  c.partials = [coeffs, mono, n](const Eigen::VectorXd& x) {
    std::vector<Matrix> out(4, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto [a, b] = mono[i];
      const double wx = a == 0 ? 0.0 : a * power(x[0], a - 1) * power(x[1], b);
      const double wy = b == 0 ? 0.0 : b * power(x[0], a) * power(x[1], b - 1);
      for (int k = 0; k < 2; ++k) {
        out[static_cast<std::size_t>(k)] += wx * coeffs[static_cast<std::size_t>(k)][i];
        out[static_cast<std::size_t>(2 + k)] += wy * coeffs[static_cast<std::size_t>(k)][i];
      }
    }
    return out;
  };
  return BundleSetup{bundle, LocalConnection(bundle, {c}), "random-polynomial", false};
}

GaugeTransformation random_polynomial_gauge(BundlePtr bundle, std::uint64_t seed, int degree, double scale) {
  if (bundle->atlas().chart_count() != 1 || bundle->atlas().dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "polynomial gauge transformations need a single planar chart");
  const GroupSpec spec = bundle->group();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto mono = monomials(degree);
  constexpr int kFactors = 3;
  std::vector<Matrix> gens;
  std::vector<std::vector<double>> polys;
  for (int j = 0; j < kFactors; ++j) {
    gens.push_back(random_algebra_element(spec, rng, 1.0).matrix());
    std::vector<double> p;
    for (const auto& [a, b] : mono) p.push_back(scale * normal(rng) / (1.0 + a + b));
    polys.push_back(std::move(p));
  }
  auto eval = [mono, polys](int j, const Eigen::VectorXd& x, int dir) {
    double v = 0.0;
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto [a, b] = mono[i];
      double w;
      if (dir < 0)
        w = power(x[0], a) * power(x[1], b);
      else if (dir == 0)
        w = a == 0 ? 0.0 : a * power(x[0], a - 1) * power(x[1], b);
      else
        w = b == 0 ? 0.0 : b * power(x[0], a) * power(x[1], b - 1);
      v += polys[static_cast<std::size_t>(j)][i] * w;
    }
    return v;
  };
  GaugeChart c;
  c.value = [spec, gens, eval](const Eigen::VectorXd& x) {
    Matrix m = Matrix::Identity(spec.matrix_dim(), spec.matrix_dim());
    for (int j = 0; j < kFactors; ++j) m = m * exp_matrix(spec, eval(j, x, -1) * gens[static_cast<std::size_t>(j)]);
    return m;
  };
  c.partials = [spec, gens, eval](const Eigen::VectorXd& x) {
    std::vector<Matrix> factors;
    for (int j = 0; j < kFactors; ++j) factors.push_back(exp_matrix(spec, eval(j, x, -1) * gens[static_cast<std::size_t>(j)]));
    std::vector<Matrix> out;
    for (int dir = 0; dir < 2; ++dir) {
      Matrix sum = Matrix::Zero(spec.matrix_dim(), spec.matrix_dim());
      for (int j = 0; j < kFactors; ++j) {
        Matrix term = Matrix::Identity(spec.matrix_dim(), spec.matrix_dim());
        for (int i = 0; i < kFactors; ++i) {
          if (i == j) term = term * (eval(j, x, dir) * gens[static_cast<std::size_t>(j)]);
          term = term * factors[static_cast<std::size_t>(i)];
        }
        sum += term;
      }
      out.push_back(sum);
    }
    return out;
  };
  return GaugeTransformation(std::move(bundle), {c});
}

SampledCurve circle_loop(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double radius,
                         int winding, double phase) {
  const double w = 2.0 * M_PI * winding;
  return SampledCurve::from_chart(
      std::move(atlas), 0,
      [=](double t) {
        return Eigen::VectorXd(centre + radius * Eigen::Vector2d(std::cos(w * t + phase), std::sin(w * t + phase)));
      },
      [=](double t) {
        return Eigen::VectorXd(radius * w * Eigen::Vector2d(-std::sin(w * t + phase), std::cos(w * t + phase)));
      });
}

SampledCurve ellipse_loop(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double a, double b,
                          double phase) {
  const double w = 2.0 * M_PI;
  return SampledCurve::from_chart(
      std::move(atlas), 0,
      [=](double t) {
        return Eigen::VectorXd(centre + Eigen::Vector2d(a * std::cos(w * t + phase), b * std::sin(w * t + phase)));
      },
      [=](double t) {
        return Eigen::VectorXd(w * Eigen::Vector2d(-a * std::sin(w * t + phase), b * std::cos(w * t + phase)));
      });
}

SampledCurve circle_arc(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double radius,
                        double from_angle, double to_angle) {
  const double span = to_angle - from_angle;
  return SampledCurve::from_chart(
      std::move(atlas), 0,
      [=](double t) {
        const double ang = from_angle + span * t;
        return Eigen::VectorXd(centre + radius * Eigen::Vector2d(std::cos(ang), std::sin(ang)));
      },
      [=](double t) {
        const double ang = from_angle + span * t;
        return Eigen::VectorXd(radius * span * Eigen::Vector2d(-std::sin(ang), std::cos(ang)));
      });
}

SampledCurve circle_angle_loop(std::shared_ptr<const Atlas> circle, int winding) {
  const double w = 2.0 * M_PI * winding;
  return SampledCurve::from_chart(
      std::move(circle), 0, [w](double t) { return Eigen::VectorXd(Eigen::VectorXd::Constant(1, w * t)); },
      [w](double) { return Eigen::VectorXd(Eigen::VectorXd::Constant(1, w)); });
}

SampledCurve latitude_loop(std::shared_ptr<const Atlas> sphere, double theta, int winding) {
  const int chart = theta <= M_PI / 2 ? 0 : 1;
  const double rho = chart == 0 ? std::tan(theta / 2.0) : 1.0 / std::tan(theta / 2.0);
  const double w = 2.0 * M_PI * winding;
  return SampledCurve::from_chart(
      std::move(sphere), chart,
      [=](double t) { return Eigen::VectorXd(rho * Eigen::Vector2d(std::cos(w * t), std::sin(w * t))); },
      [=](double t) { return Eigen::VectorXd(rho * w * Eigen::Vector2d(-std::sin(w * t), std::cos(w * t))); });
}

SampledCurve tilted_circle(std::shared_ptr<const Atlas> sphere, double radius, double tilt, double phase) {
  const Eigen::Vector3d axis(std::sin(tilt), 0.0, std::cos(tilt));
  const Eigen::Vector3d e1(std::cos(tilt), 0.0, -std::sin(tilt));
  const Eigen::Vector3d e2(0.0, 1.0, 0.0);
  const double w = 2.0 * M_PI;
  // The native chart avoids the pole the circle comes closest to.
  const double lowest = std::cos(std::min(M_PI, tilt + radius));
  const int chart = lowest > -0.9 ? 0 : 1;
  SegmentEval seg = [=](double t) {
    const double a = w * t + phase;
    const Eigen::Vector3d p = std::cos(radius) * axis + std::sin(radius) * (std::cos(a) * e1 + std::sin(a) * e2);
    const Eigen::Vector3d dp = w * std::sin(radius) * (-std::sin(a) * e1 + std::cos(a) * e2);
    return CurveSample{ChartPoint{chart, stereo(chart, p)}, stereo_velocity(chart, p, dp)};
  };
  return SampledCurve(std::move(sphere), {0.0, 1.0}, {seg}, 64);
}

LoopFamily radial_family(std::shared_ptr<const Atlas> atlas, double r0, double r1, int winding) {
  const double w = 2.0 * M_PI * winding;
  return LoopFamily(std::move(atlas), [=](double s, double t) {
    const double bump = std::sin(M_PI * t);
    const double r = r0 + (r1 - r0) * s * bump * bump;
    const double dr = (r1 - r0) * s * M_PI * std::sin(2.0 * M_PI * t);
    const double c = std::cos(w * t), sn = std::sin(w * t);
    return CurveSample{ChartPoint{0, Eigen::Vector2d(r * c, r * sn)},
                       Eigen::Vector2d(dr * c - r * w * sn, dr * sn + r * w * c)};
  });
}

LoopFamily wobble_family(std::shared_ptr<const Atlas> atlas) {
  const double w = 2.0 * M_PI;
  return LoopFamily(std::move(atlas), [w](double s, double t) {
    const Eigen::Vector2d centre(0.3 * s, -0.2 * s);
    const double a = 1.0 + 0.5 * s, b = 0.8 + 0.3 * s * s, psi = 0.7 * s;
    const double ang = w * t + psi;
    return CurveSample{ChartPoint{0, centre + Eigen::Vector2d(a * std::cos(ang), b * std::sin(ang))},
                       w * Eigen::Vector2d(-a * std::sin(ang), b * std::cos(ang))};
  });
}

LoopFamily crossing_family(std::shared_ptr<const Atlas> atlas) {
  const double w = 2.0 * M_PI;
  return LoopFamily(std::move(atlas), [w](double s, double t) {
    const Eigen::Vector2d centre(2.0 - 2.0 * s, 0.0);
    return CurveSample{ChartPoint{0, centre + Eigen::Vector2d(std::cos(w * t), std::sin(w * t))},
                       w * Eigen::Vector2d(-std::sin(w * t), std::cos(w * t))};
  });
}

LoopFamily latitude_family(std::shared_ptr<const Atlas> sphere, double theta0, double theta1) {
  const double w = 2.0 * M_PI;
  return LoopFamily(std::move(sphere), [=](double s, double t) {
    const double theta = theta0 + s * (theta1 - theta0);
    const int chart = theta <= M_PI / 2 ? 0 : 1;
    const double rho = chart == 0 ? std::tan(theta / 2.0) : 1.0 / std::tan(theta / 2.0);
    return CurveSample{ChartPoint{chart, rho * Eigen::Vector2d(std::cos(w * t), std::sin(w * t))},
                       rho * w * Eigen::Vector2d(-std::sin(w * t), std::cos(w * t))};
  });
}

}  // namespace holo
