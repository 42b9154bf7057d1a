#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "holo/geometry.hpp"
#include "holo/lie.hpp"

namespace holo {

constexpr double kDerivativeStep = 1e-5;
constexpr double kBaseTol = 1e-8;

// Matrix-valued function of chart coordinates.
using ChartMatrixFn = std::function<Matrix(const Eigen::VectorXd&)>;
// Components along the coordinate directions (or their partials, index j * dim + k for d_j of component k).
using ChartComponentsFn = std::function<std::vector<Matrix>(const Eigen::VectorXd&)>;

struct Transition {
  int from = 0;
  int to = 0;
  // t_{from,to} in the `from` chart coordinates; reference sections satisfy s_to = s_from * t_{from,to}.
  ChartMatrixFn value;
};

class PrincipalBundle {
 public:
  // Only one direction per chart pair is needed; the reverse is derived. Missing pairs are trivial.
  PrincipalBundle(std::shared_ptr<const Atlas> atlas, GroupSpec group, std::vector<Transition> transitions = {},
                  std::string name = {});

  const Atlas& atlas() const { return *atlas_; }
  const std::shared_ptr<const Atlas>& atlas_ptr() const { return atlas_; }
  const GroupSpec& group() const { return group_; }
  const std::string& name() const { return name_; }

  Matrix transition_matrix(int from, int to, const Eigen::VectorXd& x_from) const;
  GroupElement transition(int from, int to, const Eigen::VectorXd& x_from) const;
  // d_k t_{from,to} by central differences.
  std::vector<Matrix> transition_partials(int from, int to, const Eigen::VectorXd& x_from) const;
  // Worst violation of t_UV t_VW = t_UW over sampled points and chart triples.
  double cocycle_residual(const std::vector<ChartPoint>& samples) const;

 private:
  std::shared_ptr<const Atlas> atlas_;
  GroupSpec group_;
  std::vector<Transition> transitions_;
  std::string name_;
};

using BundlePtr = std::shared_ptr<const PrincipalBundle>;

// p = s_chart(x) * fiber
struct BundlePoint {
  int chart = 0;
  Eigen::VectorXd x;
  GroupElement fiber;

  ChartPoint base() const { return ChartPoint{chart, x}; }
};

BundlePoint reference_point(const PrincipalBundle& bundle, const ChartPoint& base);
BundlePoint change_chart(const PrincipalBundle& bundle, const BundlePoint& p, int to);
BundlePoint operator*(const BundlePoint& p, const GroupElement& g);
// The element d with q = p * d. Throws BaseMismatch if the fibres differ.
GroupElement division_map(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q);
double base_distance(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q);
// Distance between two points over the same base, measured in p's chart.
double point_distance(const PrincipalBundle& bundle, const BundlePoint& p, const BundlePoint& q);

struct ConnectionChart {
  ChartComponentsFn components;
  // Optional analytic partials.
  ChartComponentsFn partials;
};

class LocalConnection {
 public:
  LocalConnection(BundlePtr bundle, std::vector<ConnectionChart> charts);
  static LocalConnection zero(BundlePtr bundle);

  const PrincipalBundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }
  const std::vector<ConnectionChart>& charts() const { return charts_; }

  std::vector<Matrix> components(int chart, const Eigen::VectorXd& x) const;
  std::vector<Matrix> partials(int chart, const Eigen::VectorXd& x) const;
  Matrix apply(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  AlgebraElement evaluate(int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  // Worst violation of A_V = Ad(t^{-1}) A_U + t^{-1} dt over sampled overlap points.
  double overlap_residual(const std::vector<ChartPoint>& samples) const;

 private:
  BundlePtr bundle_;
  std::vector<ConnectionChart> charts_;
};

struct GaugeChart {
  ChartMatrixFn value;
  ChartComponentsFn partials;
};

class GaugeTransformation {
 public:
  GaugeTransformation(BundlePtr bundle, std::vector<GaugeChart> charts);
  static GaugeTransformation identity(BundlePtr bundle);
  static GaugeTransformation constant(BundlePtr bundle, const GroupElement& z);

  const PrincipalBundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }

  GroupElement local(int chart, const Eigen::VectorXd& x) const;
  std::vector<Matrix> partials(int chart, const Eigen::VectorXd& x) const;
  // g with sigma(p) = p * g.
  GroupElement g_sigma(const BundlePoint& p) const;
  BundlePoint apply(const BundlePoint& p) const;
  // sigma_V = t^{-1} sigma_U t over sampled overlap points.
  double overlap_residual(const std::vector<ChartPoint>& samples) const;

 private:
  BundlePtr bundle_;
  std::vector<GaugeChart> charts_;
};

// Local representatives multiply: (first * second)_U = first_U second_U.
GaugeTransformation compose(const GaugeTransformation& first, const GaugeTransformation& second);
LocalConnection apply_gauge_to_connection(const LocalConnection& a, const GaugeTransformation& sigma);

// F(u, v) = dA(u, v) + [A(u), A(v)]
AlgebraElement curvature(const LocalConnection& a, int chart, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v);
// Largest |F(e_j, e_k)| over the sample points.
double max_curvature(const LocalConnection& a, const std::vector<ChartPoint>& samples);

using BundleMorphism = std::function<BundlePoint(const BundlePoint&)>;

class GenGauge {
 public:
  // k(chart, x) = K(s1(x), s2(x))
  using LocalFn = std::function<Matrix(int, const Eigen::VectorXd&)>;

  GenGauge(BundlePtr source, BundlePtr target, LocalFn local);

  const BundlePtr& source() const { return source_; }
  const BundlePtr& target() const { return target_; }
  GroupElement local(int chart, const Eigen::VectorXd& x) const;
  // K(s1 g, s2 h) = h^{-1} k g, with p2 aligned to p1's chart.
  GroupElement operator()(const BundlePoint& p1, const BundlePoint& p2) const;
  // k_V = t2^{-1} k_U t1 over sampled overlap points.
  double overlap_residual(const std::vector<ChartPoint>& samples) const;

 private:
  BundlePtr source_;
  BundlePtr target_;
  LocalFn local_;
};

GenGauge identity_gen_gauge(BundlePtr bundle);
GenGauge star(const GenGauge& k23, const GenGauge& k12);
GenGauge inverse_gen_gauge(const GenGauge& k);
// K(p, q) = division_map(q, morphism(p)); equivariance is sampled at the given points.
GenGauge gen_gauge_from_morphism(BundlePtr source, BundlePtr target, BundleMorphism morphism,
                                 const std::vector<ChartPoint>& check_points, std::uint64_t seed = 7);
BundleMorphism morphism_from_gen_gauge(const GenGauge& k);
// Diagonal restriction of a generalized gauge transformation of P to itself.
GaugeTransformation gauge_from_gen_gauge(const GenGauge& k);
GenGauge gen_gauge_from_gauge(const GaugeTransformation& sigma);

// A point of the fibred product of two bundles over one base point.
struct FibredPoint {
  int chart = 0;
  Eigen::VectorXd x;
  GroupElement first;
  GroupElement second;
};

FibredPoint fibred_change_chart(const PrincipalBundle& first, const PrincipalBundle& second, const FibredPoint& p,
                                int to);
// The product connection is flat iff both factors are.
bool fibred_connection_flat(const LocalConnection& first, const LocalConnection& second,
                            const std::vector<ChartPoint>& samples, double tol = 1e-8);

}  // namespace holo
