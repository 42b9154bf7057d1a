#include "holo/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kContinuityTol = 1e-8;

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size();
  Eigen::MatrixXd j(f(x).size(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += kFdStep;
    xm[k] -= kFdStep;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * kFdStep);
  }
  return j;
}

Eigen::VectorXd sphere_inversion(const Eigen::VectorXd& x) { return x / x.squaredNorm(); }

Eigen::MatrixXd sphere_inversion_jacobian(const Eigen::VectorXd& x) {
  const double r2 = x.squaredNorm();
  return Eigen::MatrixXd::Identity(2, 2) / r2 - 2.0 * x * x.transpose() / (r2 * r2);
}

}  // namespace

Atlas::Atlas(std::string name, int dim, std::vector<Chart> charts, std::vector<ChartChange> changes)
    : name_(std::move(name)), dim_(dim), charts_(std::move(charts)), changes_(std::move(changes)) {
  if (dim_ < 1 || charts_.empty()) throw Error(ErrorCode::InvalidArgument, "atlas needs a chart and dim >= 1");
  for (auto& c : charts_)
    if (c.periods.size() == 0) c.periods = Eigen::VectorXd::Zero(dim_);
}

const Chart& Atlas::chart(int id) const {
  if (id < 0 || id >= chart_count()) throw Error(ErrorCode::InvalidArgument, "no chart " + std::to_string(id));
  return charts_[static_cast<std::size_t>(id)];
}

double Atlas::margin(int chart_id, const Eigen::VectorXd& x) const {
  if (!x.allFinite()) return -1.0;
  return chart(chart_id).margin(x);
}

bool Atlas::contains(int chart_id, const Eigen::VectorXd& x) const { return margin(chart_id, x) > 0.0; }

const ChartChange* Atlas::find_change(int from, int to) const {
  for (const auto& c : changes_)
    if (c.from == from && c.to == to) return &c;
  return nullptr;
}

std::optional<Eigen::VectorXd> Atlas::try_convert(const ChartPoint& p, int to) const {
  if (p.chart == to) return p.x;
  if (!contains(p.chart, p.x)) return std::nullopt;
  const ChartChange* c = find_change(p.chart, to);
  if (c == nullptr) return std::nullopt;
  Eigen::VectorXd y = c->map(p.x);
  if (!y.allFinite() || !contains(to, y)) return std::nullopt;
  return y;
}

ChartPoint Atlas::convert(const ChartPoint& p, int to) const {
  auto y = try_convert(p, to);
  if (!y) throw Error(ErrorCode::ChartGap, "point not in chart " + std::to_string(to));
  return ChartPoint{to, *y};
}

Eigen::MatrixXd Atlas::jacobian(int from, int to, const Eigen::VectorXd& x) const {
  if (from == to) return Eigen::MatrixXd::Identity(dim_, dim_);
  const ChartChange* c = find_change(from, to);
  if (c == nullptr) throw Error(ErrorCode::ChartGap, "no chart change");
  if (c->jacobian) return c->jacobian(x);
  return fd_jacobian(c->map, x);
}

Eigen::VectorXd Atlas::push_tangent(int from, int to, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  if (from == to) return v;
  return jacobian(from, to, x) * v;
}

int Atlas::best_chart(const ChartPoint& p) const {
  int best = -1;
  double best_margin = 0.0;
  for (int c = 0; c < chart_count(); ++c) {
    auto y = try_convert(p, c);
    if (!y) continue;
    const double m = margin(c, *y);
    if (m > 0.0 && (best < 0 || m > best_margin)) {
      best = c;
      best_margin = m;
    }
  }
  return best;
}

Eigen::VectorXd Atlas::reduce_periodic(int chart_id, Eigen::VectorXd dx) const {
  const auto& periods = chart(chart_id).periods;
  for (Eigen::Index k = 0; k < dx.size(); ++k)
    if (periods[k] > 0.0) dx[k] = std::remainder(dx[k], periods[k]);
  return dx;
}

double Atlas::distance(const ChartPoint& a, const ChartPoint& b) const {
  auto y = try_convert(b, a.chart);
  if (!y) {
    auto z = try_convert(a, b.chart);
    if (!z) return INFINITY;
    return reduce_periodic(b.chart, *z - b.x).norm();
  }
  return reduce_periodic(a.chart, *y - a.x).norm();
}

std::shared_ptr<const Atlas> make_plane() {
  Chart c{"plane", [](const Eigen::VectorXd&) { return 1.0; }, Eigen::VectorXd::Zero(2)};
  return std::make_shared<const Atlas>("plane", 2, std::vector<Chart>{c}, std::vector<ChartChange>{});
}

std::shared_ptr<const Atlas> make_punctured_plane() {
  Chart c{"punctured", [](const Eigen::VectorXd& x) { return x.norm(); }, Eigen::VectorXd::Zero(2)};
  return std::make_shared<const Atlas>("punctured-plane", 2, std::vector<Chart>{c}, std::vector<ChartChange>{});
}

std::shared_ptr<const Atlas> make_circle() {
  Chart c{"angle", [](const Eigen::VectorXd&) { return 1.0; }, Eigen::VectorXd::Constant(1, 2.0 * M_PI)};
  return std::make_shared<const Atlas>("circle", 1, std::vector<Chart>{c}, std::vector<ChartChange>{});
}

std::shared_ptr<const Atlas> make_torus() {
  Chart c{"angles", [](const Eigen::VectorXd&) { return 1.0; }, Eigen::VectorXd::Constant(2, 2.0 * M_PI)};
  return std::make_shared<const Atlas>("torus", 2, std::vector<Chart>{c}, std::vector<ChartChange>{});
}

std::shared_ptr<const Atlas> make_sphere() {
  // In either chart 1 -+ z = 2 / (1 + |X|^2), so both margins are comparable.
  auto margin = [](const Eigen::VectorXd& x) { return 2.0 / (1.0 + x.squaredNorm()); };
  std::vector<Chart> charts{{"north", margin, Eigen::VectorXd::Zero(2)},
                            {"south", margin, Eigen::VectorXd::Zero(2)}};
  std::vector<ChartChange> changes{{0, 1, sphere_inversion, sphere_inversion_jacobian},
                                   {1, 0, sphere_inversion, sphere_inversion_jacobian}};
  return std::make_shared<const Atlas>("sphere", 2, std::move(charts), std::move(changes));
}

std::shared_ptr<const Atlas> make_atlas(const std::string& name) {
  if (name == "plane") return make_plane();
  if (name == "punctured-plane") return make_punctured_plane();
  if (name == "circle") return make_circle();
  if (name == "torus") return make_torus();
  if (name == "sphere") return make_sphere();
  throw Error(ErrorCode::InvalidArgument, "unknown atlas '" + name + "'");
}

Eigen::Vector2d sphere_chart_coords(int chart, double theta, double phi) {
  const double rho = chart == 0 ? std::tan(theta / 2.0) : 1.0 / std::tan(theta / 2.0);
  return Eigen::Vector2d(rho * std::cos(phi), rho * std::sin(phi));
}

Eigen::Vector2d sphere_angles(int chart, const Eigen::VectorXd& x) {
  const double rho = x.norm();
  const double theta = chart == 0 ? 2.0 * std::atan(rho) : 2.0 * std::atan2(1.0, rho);
  return Eigen::Vector2d(theta, std::atan2(x[1], x[0]));
}

SampledCurve::SampledCurve(std::shared_ptr<const Atlas> atlas, std::vector<double> breakpoints,
                           std::vector<SegmentEval> segments, int samples_per_segment)
    : atlas_(std::move(atlas)),
      breakpoints_(std::move(breakpoints)),
      segments_(std::move(segments)),
      samples_(samples_per_segment) {
  if (!atlas_) throw Error(ErrorCode::InvalidArgument, "curve without atlas");
  if (breakpoints_.size() != segments_.size() + 1 || segments_.empty())
    throw Error(ErrorCode::InvalidArgument, "breakpoints must bracket every segment");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    throw Error(ErrorCode::InvalidArgument, "breakpoints must run from 0 to 1");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k)
    if (!(breakpoints_[k] > breakpoints_[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "breakpoints must increase strictly");
  if (samples_ < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least 2 samples per segment");
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    const double s = breakpoints_[k];
    const auto left = segments_[k - 1](s);
    const auto right = segments_[k](s);
    if (atlas_->distance(left.point, right.point) > kContinuityTol)
      throw Error(ErrorCode::EndpointMismatch, "curve is discontinuous at breakpoint " + std::to_string(s));
  }
  build_itinerary();
}

SampledCurve SampledCurve::from_chart(std::shared_ptr<const Atlas> atlas, int chart,
                                      std::function<Eigen::VectorXd(double)> x,
                                      std::function<Eigen::VectorXd(double)> v, int samples_per_segment) {
  SegmentEval seg = [chart, x = std::move(x), v = std::move(v)](double t) {
    return CurveSample{ChartPoint{chart, x(t)}, v(t)};
  };
  return SampledCurve(std::move(atlas), {0.0, 1.0}, {seg}, samples_per_segment);
}

SampledCurve SampledCurve::constant(std::shared_ptr<const Atlas> atlas, const ChartPoint& p) {
  const auto dim = atlas->dim();
  SegmentEval seg = [p, dim](double) { return CurveSample{p, Eigen::VectorXd::Zero(dim)}; };
  return SampledCurve(std::move(atlas), {0.0, 1.0}, {seg}, 2);
}

SampledCurve SampledCurve::polygon(std::shared_ptr<const Atlas> atlas, int chart,
                                   const std::vector<Eigen::VectorXd>& vertices) {
  if (vertices.size() < 2) throw Error(ErrorCode::InvalidArgument, "polygon needs two vertices");
  const std::size_t n = vertices.size() - 1;
  std::vector<double> bps(n + 1);
  std::vector<SegmentEval> segs;
  for (std::size_t k = 0; k <= n; ++k) bps[k] = static_cast<double>(k) / static_cast<double>(n);
  bps.back() = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s0 = bps[k], s1 = bps[k + 1];
    const Eigen::VectorXd a = vertices[k], b = vertices[k + 1];
    segs.push_back([=](double t) {
      const double u = (t - s0) / (s1 - s0);
      return CurveSample{ChartPoint{chart, a + u * (b - a)}, (b - a) / (s1 - s0)};
    });
  }
  return SampledCurve(std::move(atlas), std::move(bps), std::move(segs), 8);
}

int SampledCurve::segment_index(double t) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  int k = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(segments_.size()) - 1);
}

CurveSample SampledCurve::at(double t) const { return at_segment(segment_index(t), t); }

CurveSample SampledCurve::at_segment(int segment, double t) const {
  return segments_[static_cast<std::size_t>(segment)](t);
}

CurveSample SampledCurve::to_chart(const CurveSample& s, int chart) const {
  if (s.point.chart == chart) return s;
  ChartPoint p = atlas_->convert(s.point, chart);
  return CurveSample{p, atlas_->push_tangent(s.point.chart, chart, s.point.x, s.velocity)};
}

CurveSample SampledCurve::at_piece(const ChartPiece& piece, double t) const {
  return to_chart(at_segment(piece.segment, t), piece.chart);
}

CurveSample SampledCurve::at_in_chart(double t, int chart) const { return to_chart(at(t), chart); }

bool SampledCurve::is_loop(double tol) const {
  return atlas_->distance(at_segment(0, 0.0).point,
                          at_segment(static_cast<int>(segments_.size()) - 1, 1.0).point) <= tol;
}

void SampledCurve::build_itinerary() {
  itinerary_.clear();
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const double s0 = breakpoints_[k], s1 = breakpoints_[k + 1];
    auto chart_at = [&](double t) {
      const int c = atlas_->best_chart(segments_[k](t).point);
      if (c < 0) throw Error(ErrorCode::ChartGap, "no chart covers the curve at t=" + std::to_string(t));
      return c;
    };
    double piece_start = s0;
    int current = chart_at(s0);
    double prev = s0;
    for (int j = 1; j <= samples_; ++j) {
      const double t = j == samples_ ? s1 : s0 + (s1 - s0) * j / samples_;
      const int c = chart_at(t);
      if (c != current) {
        double lo = prev, hi = t;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (chart_at(mid) == current)
            lo = mid;
          else
            hi = mid;
        }
        const double seam = 0.5 * (lo + hi);
        if (seam > piece_start) itinerary_.push_back(ChartPiece{piece_start, seam, static_cast<int>(k), current});
        piece_start = seam;
        current = c;
      }
      prev = t;
    }
    itinerary_.push_back(ChartPiece{piece_start, s1, static_cast<int>(k), current});
  }
}

SampledCurve concat(const SampledCurve& first, const SampledCurve& second) {
  if (first.atlas().name() != second.atlas().name())
    throw Error(ErrorCode::EndpointMismatch, "curves live on different atlases");
  const auto end = first.at_segment(static_cast<int>(first.segments().size()) - 1, 1.0).point;
  const auto start = second.at_segment(0, 0.0).point;
  if (first.atlas().distance(end, start) > kContinuityTol)
    throw Error(ErrorCode::EndpointMismatch, "first curve does not end where the second starts");
  std::vector<double> bps;
  std::vector<SegmentEval> segs;
  for (double b : first.breakpoints()) bps.push_back(0.5 * b);
  for (std::size_t k = 1; k < second.breakpoints().size(); ++k) bps.push_back(0.5 + 0.5 * second.breakpoints()[k]);
  for (const auto& seg : first.segments())
    segs.push_back([seg](double t) {
      auto s = seg(2.0 * t);
      s.velocity *= 2.0;
      return s;
    });
  for (const auto& seg : second.segments())
    segs.push_back([seg](double t) {
      auto s = seg(2.0 * t - 1.0);
      s.velocity *= 2.0;
      return s;
    });
  return SampledCurve(first.atlas_ptr(), std::move(bps), std::move(segs),
                      std::max(first.samples_per_segment(), second.samples_per_segment()));
}

SampledCurve reverse(const SampledCurve& curve) {
  std::vector<double> bps;
  std::vector<SegmentEval> segs;
  const auto& src = curve.breakpoints();
  for (auto it = src.rbegin(); it != src.rend(); ++it) bps.push_back(1.0 - *it);
  bps.front() = 0.0;
  bps.back() = 1.0;
  for (auto it = curve.segments().rbegin(); it != curve.segments().rend(); ++it) {
    auto seg = *it;
    segs.push_back([seg](double t) {
      auto s = seg(1.0 - t);
      s.velocity = -s.velocity;
      return s;
    });
  }
  return SampledCurve(curve.atlas_ptr(), std::move(bps), std::move(segs), curve.samples_per_segment());
}

SampledCurve perturb(const SampledCurve& curve, const VectorField& field, const VectorField& field_dot, double eps) {
  std::vector<SegmentEval> segs;
  for (const auto& seg : curve.segments()) {
    segs.push_back([seg, field, field_dot, eps](double t) {
      auto s = seg(t);
      s.point.x += eps * field(t);
      if (field_dot) {
        s.velocity += eps * field_dot(t);
      } else {
        const double d = 1e-6;
        s.velocity += eps * (field(t + d) - field(t - d)) / (2.0 * d);
      }
      return s;
    });
  }
  return SampledCurve(curve.atlas_ptr(), curve.breakpoints(), std::move(segs), curve.samples_per_segment());
}

LoopFamily::LoopFamily(std::shared_ptr<const Atlas> atlas, Eval eval, int s_resolution, int t_resolution)
    : atlas_(std::move(atlas)), eval_(std::move(eval)), s_res_(s_resolution), t_res_(t_resolution) {
  if (s_res_ < 1 || t_res_ < 2) throw Error(ErrorCode::ResolutionTooSmall, "family grid too coarse");
}

SampledCurve LoopFamily::slice(double s) const {
  auto eval = eval_;
  SegmentEval seg = [eval, s](double t) { return eval(s, t); };
  SampledCurve c(atlas_, {0.0, 1.0}, {seg}, std::max(16, t_res_ / 4));
  if (!c.is_loop()) throw Error(ErrorCode::NotALoop, "family slice is not closed");
  return c;
}

Eigen::VectorXd LoopFamily::variation(double s, double t) const {
  const CurveSample c = eval_(s, t);
  const double d = kFdStep;
  const double sp = std::min(1.0, s + d), sm = std::max(0.0, s - d);
  auto coords = [&](double ss) {
    return atlas_->reduce_periodic(c.point.chart, atlas_->convert(eval_(ss, t).point, c.point.chart).x - c.point.x);
  };
  return (coords(sp) - coords(sm)) / (sp - sm);
}

double LoopFamily::sweep_clearance() const {
  double clearance = INFINITY;
  std::vector<ChartPoint> row_prev, row;
  for (int i = 0; i <= s_res_; ++i) {
    const double s = static_cast<double>(i) / s_res_;
    row.clear();
    for (int j = 0; j <= t_res_; ++j) row.push_back(eval_(s, static_cast<double>(j) / t_res_).point);
    for (int j = 0; j <= t_res_; ++j) {
      const ChartPoint& p = row[static_cast<std::size_t>(j)];
      const int c = atlas_->best_chart(p);
      if (c < 0) return -INFINITY;
      const ChartPoint q = atlas_->convert(p, c);
      double diam = 0.0;
      auto neighbour = [&](const ChartPoint& r) { diam = std::max(diam, atlas_->distance(q, r)); };
      if (j > 0) neighbour(row[static_cast<std::size_t>(j - 1)]);
      if (j < t_res_) neighbour(row[static_cast<std::size_t>(j + 1)]);
      if (i > 0) {
        neighbour(row_prev[static_cast<std::size_t>(j)]);
        if (j > 0) neighbour(row_prev[static_cast<std::size_t>(j - 1)]);
        if (j < t_res_) neighbour(row_prev[static_cast<std::size_t>(j + 1)]);
      }
      clearance = std::min(clearance, atlas_->margin(c, q.x) - diam);
    }
    std::swap(row_prev, row);
  }
  return clearance;
}

SampledCurve LoopSurface::slice(double a, double b) const {
  auto eval = eval_;
  SegmentEval seg = [eval, a, b](double t) { return eval(a, b, t); };
  return SampledCurve(atlas_, {0.0, 1.0}, {seg}, 64);
}

VectorField LoopSurface::variation(double a, double b, int which) const {
  auto eval = eval_;
  auto atlas = atlas_;
  return [eval, atlas, a, b, which](double t) {
    const CurveSample c = eval(a, b, t);
    const double d = kFdStep;
    auto coords = [&](double sign) {
      const double aa = which == 0 ? a + sign * d : a;
      const double bb = which == 1 ? b + sign * d : b;
      return atlas->reduce_periodic(c.point.chart, atlas->convert(eval(aa, bb, t).point, c.point.chart).x - c.point.x);
    };
    Eigen::VectorXd v = (coords(1.0) - coords(-1.0)) / (2.0 * d);
    return v;
  };
}

VectorField LoopSurface::variation_dot(double a, double b, int which) const {
  auto eval = eval_;
  auto atlas = atlas_;
  return [eval, atlas, a, b, which](double t) {
    const CurveSample c = eval(a, b, t);
    const double d = kFdStep;
    auto vel = [&](double sign) {
      const double aa = which == 0 ? a + sign * d : a;
      const double bb = which == 1 ? b + sign * d : b;
      const CurveSample s = eval(aa, bb, t);
      return Eigen::VectorXd(atlas->push_tangent(s.point.chart, c.point.chart, s.point.x, s.velocity));
    };
    Eigen::VectorXd v = (vel(1.0) - vel(-1.0)) / (2.0 * d);
    return v;
  };
}

}  // namespace holo
