#pragma once

#include <cstdint>
#include <vector>

#include "holo/bundle.hpp"
#include "holo/geometry.hpp"
#include "holo/lie.hpp"
#include "holo/transport.hpp"

namespace holo {

// Adjoint-valued form of degree 1 or 2 given by local components in each chart.
// Degree 1: components[k] = B(e_k). Degree 2: components[j * dim + k] = B(e_j, e_k), antisymmetric.
class AdjointForm {
 public:
  AdjointForm(BundlePtr bundle, int degree, std::vector<ChartComponentsFn> charts,
              std::vector<ChartComponentsFn> partials = {});
  static AdjointForm zero(BundlePtr bundle, int degree);

  const PrincipalBundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }
  int degree() const { return degree_; }

  std::vector<Matrix> components(int chart, const Eigen::VectorXd& x) const;
  // d_j of component k at index j * dim + k (degree 1 only), analytic or by central differences.
  std::vector<Matrix> partials(int chart, const Eigen::VectorXd& x) const;
  Matrix apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Matrix apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  // Worst violation of B_V = Ad(t_UV^{-1}) B_U over sampled overlap points.
  double overlap_residual(const std::vector<ChartPoint>& samples) const;

  AdjointForm scaled(double c) const;

 private:
  BundlePtr bundle_;
  int degree_;
  std::vector<ChartComponentsFn> charts_;
  std::vector<ChartComponentsFn> partials_;
};

struct BFPair {
  LocalConnection a;
  AdjointForm b;
};

// (A, B) -> (A^sigma, Ad(sigma^{-1}) B)
BFPair gauge_transform(const BFPair& pair, const GaugeTransformation& sigma);
// The connection A + B (degree 1 only).
LocalConnection shifted_connection(const BFPair& pair);

// Degree-1 form presets on the plane or punctured plane (single chart).
AdjointForm constant_form(BundlePtr bundle, const std::vector<AlgebraElement>& coefficients);
// eta dphi on the punctured plane.
AdjointForm angle_form(BundlePtr bundle, const AlgebraElement& eta);
// eta x dy.
AdjointForm x_dy_form(BundlePtr bundle, const AlgebraElement& eta);
AdjointForm random_polynomial_form(BundlePtr bundle, std::uint64_t seed, int degree, double scale = 0.5);
// Degree-2 form f(x) eta dx ^ dy with f = 1 + c x + c y^2 on a 2-dimensional single-chart base.
AdjointForm area_form(BundlePtr bundle, const AlgebraElement& eta, double c = 0.0);

// Integral of |B(curve')| (Frobenius) over the curve.
double form_norm_along(const AdjointForm& b, const SampledCurve& curve, int samples = 257);

// (d_A B)(e_1, e_2) and (d_A B + [B, B] / 2)(e_1, e_2) for degree-1 B on a 2-dimensional base.
AlgebraElement covariant_derivative(const BFPair& pair, int chart, const Eigen::VectorXd& x);
AlgebraElement maurer_cartan(const BFPair& pair, int chart, const Eigen::VectorXd& x);
double max_covariant_derivative(const BFPair& pair, const std::vector<ChartPoint>& samples);
double max_maurer_cartan(const BFPair& pair, const std::vector<ChartPoint>& samples);

struct ChenOptions {
  TransportOptions transport;
  // Tensor Gauss nodes per simplex axis for direct simplex quadrature.
  int simplex_nodes_low = 24;
  int simplex_nodes_high = 12;
  // Panel collocation used by the iterated-integral recursion.
  int panel_nodes = 16;
  int panels_per_unit = 64;

  int simplex_nodes(int n) const { return n <= 3 ? simplex_nodes_low : simplex_nodes_high; }
};

Complex wilson_loop(const LocalConnection& a, const Representation& rho, const SampledCurve& loop,
                    const BundlePoint& p, const TransportOptions& opts = {});

// Insertions along one lifted loop: rho-hat(Ad(g(t)^{-1}) omega(...)) with g the horizontal lift from p.
class LoopInsertions {
 public:
  LoopInsertions(const LocalConnection& a, const Representation& rho, const SampledCurve& loop,
                 const BundlePoint& p, const TransportOptions& opts = {});

  const GroupElement& holonomy() const { return hol_; }
  const Matrix& rho_hol_inverse() const { return rho_hol_inv_; }
  // Lift at t in the native chart of the loop sample at t.
  BundlePoint lift(double t) const;
  // Form evaluated on the loop velocity (degree 1), on a given vector (degree 1), or on (velocity, vector).
  Matrix along(const AdjointForm& form, double t) const;
  Matrix on_vector(const AdjointForm& form, double t, const Eigen::VectorXd& v) const;
  Matrix along_and(const AdjointForm& form, double t, const Eigen::VectorXd& v) const;
  // Conjugated and represented algebra element at t, in the native chart.
  Matrix represent(double t, int chart, const Matrix& algebra) const;

 private:
  const LocalConnection* a_;
  const SampledCurve* loop_;
  Representation rho_;
  BundlePoint p_;
  DenseLift lift_;
  GroupElement hol_;
  Matrix rho_hol_inv_;
};

// rho-hat(Ad(hol(0 -> t)^{-1}) omega_{loop(t)}(args)) with args = (velocity) or (velocity, vector) by degree;
// `vector` alone is used for degree 1 when `on_velocity` is false.
Matrix pulled_back_form(const LocalConnection& a, const AdjointForm& omega, const Representation& rho,
                        const SampledCurve& loop, const BundlePoint& p, double t, bool on_velocity = true,
                        const Eigen::VectorXd& vector = {}, const TransportOptions& opts = {});

// Term n of the generalized Wilson loop: iterated integral over t_1 <= ... <= t_n of
// tr[b(t_1) ... b(t_n) rho(hol)^{-1}]. Degree 2 needs n variations (vector fields in native coordinates);
// the value is then (-1)^{n(n-1)/2} sum over permutations of sgn times the iterated integral.
Complex gen_wilson_term(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                        const BundlePoint& p, int n, const std::vector<VectorField>& variations = {},
                        const ChenOptions& opts = {});
// The same term by tensor Gauss quadrature on the simplex (degree 1 only).
Complex gen_wilson_term_simplex(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                                const BundlePoint& p, int n, const ChenOptions& opts = {});

struct WilsonSeries {
  int loop_id = 0;
  int order = 0;
  std::vector<Complex> terms;
  std::vector<Complex> partial_sums;
};

// Terms 0..order (order <= 8, degree 1).
WilsonSeries gen_wilson_series(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                               const BundlePoint& p, int order, int loop_id = 0, const ChenOptions& opts = {});

// tr rho(hol_A) - tr rho(hol_A^{-1}) + tr rho(hol_{A+B}^{-1}), the limit of the series.
Complex dyson_oracle(const BFPair& pair, const Representation& rho, const SampledCurve& loop,
                     const BundlePoint& p, const TransportOptions& opts = {});

// Largest |S_N(slice s) - S_N(slice 0)| over `slices` evenly spaced slices, with p the reference point over
// each slice's start. No hypothesis checks.
double series_family_deviation(const BFPair& pair, const Representation& rho, const LoopFamily& family, int order,
                               int slices = 9, const ChenOptions& opts = {});
// As above after checking flatness of A (NotFlat) and the covariant Maurer-Cartan equation (NotMaurerCartan).
double local_constancy_check(const BFPair& pair, const Representation& rho, const LoopFamily& family, int order,
                             int slices = 9, const ChenOptions& opts = {});

// Commuting square for flat A and a degree-1 form omega on a 2-dimensional base. With b(t) the insertion on the
// velocity, b_X(t) the insertion on X(t) and xi_0 the insertion of A(X(0)) at t = 0 (fibre coordinates of p held
// fixed): D_X b - d/dt b_X + [xi_0, b] = rho-hat(Ad(g^{-1}) (d_A omega)(X, velocity)). Returns the largest norm of
// the difference over `times` (central differences with step eps in the variation and in t). NotFlat otherwise.
double covariant_square_residual(const BFPair& pair, const Representation& rho, const SampledCurve& curve,
                                 const BundlePoint& p, const VectorField& field, const VectorField& field_dot,
                                 const std::vector<double>& times, const ChenOptions& opts = {}, double eps = 1e-4);

struct ClosednessReport {
  int n = 0;
  int form_degree = 0;
  double residual = 0.0;
  double residual_half = 0.0;
  double step = 0.0;
  bool halving_ok() const;
};

// Term n <= 2 as a form of degree n(deg B - 1) on loop space, pulled back to the surface of loops; the
// residual is the antisymmetrized difference quotient of d (the gradient for a 0-form) at (a, b).
// Checks F_A = 0 (NotFlat) and d_A B = 0 (NotCovClosed); form degree >= 2 is UnsupportedDegree.
ClosednessReport wilson_closedness_check(const BFPair& pair, const Representation& rho, const LoopSurface& surface,
                                         int n, double a = 0.0, double b = 0.0, double step = 1e-3,
                                         const ChenOptions& opts = {});

struct FaceResidual {
  int alpha = 0;
  int sign = 0;
  Complex restricted;
  Complex predicted;
  double residual = 0.0;
};

// For degree-1 B and a loop variation X: the integrand of term n, restricted to each boundary face and
// evaluated with one slot on X, against the (n-1)-integrand with the prepended, merged or appended insertion.
std::vector<FaceResidual> boundary_face_reduction_check(const BFPair& pair, const Representation& rho,
                                                        const SampledCurve& loop, const BundlePoint& p, int n,
                                                        const VectorField& variation, const ChenOptions& opts = {});

}  // namespace holo
