#pragma once

#include <cstdint>
#include <string>

#include "holo/bundle.hpp"
#include "holo/geometry.hpp"

namespace holo {

struct BundleSetup {
  BundlePtr bundle;
  LocalConnection connection;
  std::string name;
  bool flat = false;
};

BundleSetup trivial_setup(const GroupSpec& spec, std::shared_ptr<const Atlas> atlas = make_plane());
// A = xi dphi on the punctured plane.
BundleSetup flat_angle_setup(const AlgebraElement& xi);
// Charge-q monopole on the sphere: A_N = iq (X dY - Y dX) / (1 + |X|^2), A_S = -iq (X dY - Y dX) / (1 + |X|^2),
// glued by t_NS = exp(-i q phi).
BundleSetup monopole_setup(int charge);
// Polynomial connection on the plane with random algebra coefficients.
BundleSetup random_polynomial_setup(const GroupSpec& spec, std::uint64_t seed, int degree, double scale = 0.5);

// Product of exponentials exp(p_j(x) xi_j) with random polynomials p_j and algebra elements xi_j (single chart).
GaugeTransformation random_polynomial_gauge(BundlePtr bundle, std::uint64_t seed, int degree, double scale = 0.5);

// Monomials x^a y^b with a + b <= degree, in a fixed order.
std::vector<std::pair<int, int>> monomials(int degree);

SampledCurve circle_loop(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double radius,
                         int winding = 1, double phase = 0.0);
SampledCurve ellipse_loop(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double a, double b,
                          double phase = 0.0);
// Open arc of a circle between two angles.
SampledCurve circle_arc(std::shared_ptr<const Atlas> atlas, const Eigen::Vector2d& centre, double radius,
                        double from_angle, double to_angle);
SampledCurve circle_angle_loop(std::shared_ptr<const Atlas> circle, int winding = 1);
// Latitude at polar angle theta, traversed with increasing longitude.
SampledCurve latitude_loop(std::shared_ptr<const Atlas> sphere, double theta, int winding = 1);
// Circle of angular radius `radius` around the axis tilted from the north pole by `tilt`.
SampledCurve tilted_circle(std::shared_ptr<const Atlas> sphere, double radius, double tilt, double phase = 0.0);

// Circles around the origin with radius from r0 to r1.
LoopFamily radial_family(std::shared_ptr<const Atlas> atlas, double r0, double r1, int winding = 1);
// Ellipses with shifting centre, axes and starting phase (moving base point).
LoopFamily wobble_family(std::shared_ptr<const Atlas> atlas);
// Unit circles whose centre slides from (2, 0) to (0, 0) across the puncture.
LoopFamily crossing_family(std::shared_ptr<const Atlas> atlas);
LoopFamily latitude_family(std::shared_ptr<const Atlas> sphere, double theta0, double theta1);

}  // namespace holo
