#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holo/errors.hpp"

namespace holo {

struct ChartPoint {
  int chart = 0;
  Eigen::VectorXd x;
};

struct Chart {
  std::string name;
  // Positive inside the chart domain; larger means further from its edge.
  std::function<double(const Eigen::VectorXd&)> margin;
  // Per-coordinate period (0 for a non-periodic coordinate).
  Eigen::VectorXd periods;
};

struct ChartChange {
  int from = 0;
  int to = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
  // Optional; central differences otherwise.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

class Atlas {
 public:
  Atlas(std::string name, int dim, std::vector<Chart> charts, std::vector<ChartChange> changes);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int chart_count() const { return static_cast<int>(charts_.size()); }
  const Chart& chart(int id) const;

  double margin(int chart, const Eigen::VectorXd& x) const;
  bool contains(int chart, const Eigen::VectorXd& x) const;
  // Coordinates of p in chart `to`, or nothing if p is outside that chart.
  std::optional<Eigen::VectorXd> try_convert(const ChartPoint& p, int to) const;
  ChartPoint convert(const ChartPoint& p, int to) const;
  Eigen::MatrixXd jacobian(int from, int to, const Eigen::VectorXd& x) const;
  Eigen::VectorXd push_tangent(int from, int to, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  // Chart with maximal margin, ties to the lowest id; -1 if no chart contains p.
  int best_chart(const ChartPoint& p) const;
  // Euclidean distance in a's chart, periodic coordinates reduced.
  double distance(const ChartPoint& a, const ChartPoint& b) const;
  Eigen::VectorXd reduce_periodic(int chart, Eigen::VectorXd dx) const;

 private:
  const ChartChange* find_change(int from, int to) const;
  std::string name_;
  int dim_;
  std::vector<Chart> charts_;
  std::vector<ChartChange> changes_;
};

std::shared_ptr<const Atlas> make_plane();
// R^2 minus the origin; the margin is the distance to the origin.
std::shared_ptr<const Atlas> make_punctured_plane();
std::shared_ptr<const Atlas> make_circle();
std::shared_ptr<const Atlas> make_torus();
// Chart 0 projects from the south pole (x, y) / (1 + z), chart 1 from the north pole (x, y) / (1 - z).
std::shared_ptr<const Atlas> make_sphere();
std::shared_ptr<const Atlas> make_atlas(const std::string& name);

Eigen::Vector2d sphere_chart_coords(int chart, double theta, double phi);
// Returns (theta, phi).
Eigen::Vector2d sphere_angles(int chart, const Eigen::VectorXd& x);

struct CurveSample {
  ChartPoint point;
  Eigen::VectorXd velocity;
};

using SegmentEval = std::function<CurveSample(double)>;
using VectorField = std::function<Eigen::VectorXd(double)>;

struct ChartPiece {
  double t0 = 0.0;
  double t1 = 1.0;
  int segment = 0;
  int chart = 0;
};

class SampledCurve {
 public:
  SampledCurve(std::shared_ptr<const Atlas> atlas, std::vector<double> breakpoints,
               std::vector<SegmentEval> segments, int samples_per_segment = 64);

  static SampledCurve from_chart(std::shared_ptr<const Atlas> atlas, int chart,
                                 std::function<Eigen::VectorXd(double)> x,
                                 std::function<Eigen::VectorXd(double)> v, int samples_per_segment = 64);
  static SampledCurve constant(std::shared_ptr<const Atlas> atlas, const ChartPoint& p);
  // Straight segments through the given chart points.
  static SampledCurve polygon(std::shared_ptr<const Atlas> atlas, int chart,
                              const std::vector<Eigen::VectorXd>& vertices);

  const Atlas& atlas() const { return *atlas_; }
  const std::shared_ptr<const Atlas>& atlas_ptr() const { return atlas_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<SegmentEval>& segments() const { return segments_; }
  int samples_per_segment() const { return samples_; }
  int segment_index(double t) const;

  CurveSample at(double t) const;
  CurveSample at_segment(int segment, double t) const;
  CurveSample at_piece(const ChartPiece& piece, double t) const;
  CurveSample to_chart(const CurveSample& s, int chart) const;
  // Sample at t expressed in the given chart.
  CurveSample at_in_chart(double t, int chart) const;
  const std::vector<ChartPiece>& itinerary() const { return itinerary_; }
  bool is_loop(double tol = 1e-8) const;

 private:
  void build_itinerary();
  std::shared_ptr<const Atlas> atlas_;
  std::vector<double> breakpoints_;
  std::vector<SegmentEval> segments_;
  int samples_;
  std::vector<ChartPiece> itinerary_;
};

SampledCurve concat(const SampledCurve& first, const SampledCurve& second);
SampledCurve reverse(const SampledCurve& curve);
// Adds eps * field(t) to the native coordinates of every sample.
SampledCurve perturb(const SampledCurve& curve, const VectorField& field, const VectorField& field_dot, double eps);

class LoopFamily {
 public:
  using Eval = std::function<CurveSample(double s, double t)>;

  LoopFamily(std::shared_ptr<const Atlas> atlas, Eval eval, int s_resolution = 64, int t_resolution = 256);

  const Atlas& atlas() const { return *atlas_; }
  const std::shared_ptr<const Atlas>& atlas_ptr() const { return atlas_; }
  int s_resolution() const { return s_res_; }
  int t_resolution() const { return t_res_; }
  CurveSample at(double s, double t) const { return eval_(s, t); }
  SampledCurve slice(double s) const;
  // d/ds of the family at (s, t), in the chart of at(s, t).
  Eigen::VectorXd variation(double s, double t) const;
  // Minimum over the grid of (chart margin - local cell diameter); negative means the sweep may cross a gap.
  double sweep_clearance() const;

 private:
  std::shared_ptr<const Atlas> atlas_;
  Eval eval_;
  int s_res_;
  int t_res_;
};

// Two-parameter family of loops (a, b, t).
class LoopSurface {
 public:
  using Eval = std::function<CurveSample(double a, double b, double t)>;

  LoopSurface(std::shared_ptr<const Atlas> atlas, Eval eval) : atlas_(std::move(atlas)), eval_(std::move(eval)) {}

  const Atlas& atlas() const { return *atlas_; }
  SampledCurve slice(double a, double b) const;
  // Derivative along parameter `which` (0 for a, 1 for b) as a field in the slice's native charts.
  VectorField variation(double a, double b, int which) const;
  VectorField variation_dot(double a, double b, int which) const;

 private:
  std::shared_ptr<const Atlas> atlas_;
  Eval eval_;
};

}  // namespace holo
