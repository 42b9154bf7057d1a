#include "holo/simplex.hpp"

#include <cmath>

#include "holo/errors.hpp"

namespace holo {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::ResolutionTooSmall, "Gauss rule needs a node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const std::size_t lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

namespace {

void visit_down(int k, double upper, double weight, const GaussRule& rule, Eigen::VectorXd& t,
                const std::function<void(const Eigen::VectorXd&, double)>& visit) {
  if (k == 0) {
    visit(t, weight);
    return;
  }
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    t[k - 1] = upper * rule.nodes[j];
    visit_down(k - 1, t[k - 1], weight * upper * rule.weights[j], rule, t, visit);
  }
}

void check_resolution(int resolution) {
  if (resolution < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least 2 nodes per axis");
}

}  // namespace

void for_each_simplex_node(int n, int resolution, const std::function<void(const Eigen::VectorXd&, double)>& visit) {
  check_resolution(resolution);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative simplex dimension");
  const GaussRule rule = gauss_legendre(resolution);
  Eigen::VectorXd t(n);
  visit_down(n, 1.0, 1.0, rule, t, visit);
}

double simplex_integrate(int n, const std::function<double(const Eigen::VectorXd&)>& f, int resolution) {
  double sum = 0.0;
  for_each_simplex_node(n, resolution, [&](const Eigen::VectorXd& t, double w) { sum += w * f(t); });
  return sum;
}

double simplex_integrate_pivot(int n, const std::function<double(const Eigen::VectorXd&)>& f, int resolution,
                               int pivot) {
  check_resolution(resolution);
  if (pivot < 1 || pivot > n) throw Error(ErrorCode::InvalidArgument, "pivot out of range");
  const GaussRule rule = gauss_legendre(resolution);
  Eigen::VectorXd t(n);
  const int p = pivot - 1;
  double sum = 0.0;
  // Later times, outermost t_n in [t_p, 1], then t_k in [t_p, t_{k+1}].
  std::function<void(int, double, double)> upper_block = [&](int k, double upper, double weight) {
    if (k == p) {
      visit_down(p, t[p], weight, rule, t, [&](const Eigen::VectorXd& s, double w) { sum += w * f(s); });
      return;
    }
    const double lo = t[p];
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      t[k] = lo + (upper - lo) * rule.nodes[j];
      upper_block(k - 1, t[k], weight * (upper - lo) * rule.weights[j]);
    }
  };
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    t[p] = rule.nodes[j];
    upper_block(n - 1, 1.0, rule.weights[j]);
  }
  return sum;
}

SimplexGrid make_simplex_grid(int n, int resolution) {
  SimplexGrid grid;
  grid.n = n;
  for_each_simplex_node(n, resolution, [&](const Eigen::VectorXd& t, double w) {
    grid.nodes.push_back(t);
    grid.weights.push_back(w);
  });
  return grid;
}

std::vector<BoundaryFace> boundary_faces(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "boundary faces need n >= 1");
  std::vector<BoundaryFace> faces;
  for (int alpha = 0; alpha <= n; ++alpha) {
    BoundaryFace f;
    f.alpha = alpha;
    f.sign = alpha % 2 == 0 ? -1 : 1;
    f.jacobian = Eigen::MatrixXd::Zero(n, n - 1);
    f.offset = Eigen::VectorXd::Zero(n);
    if (alpha == 0) {
      for (int i = 1; i < n; ++i) f.jacobian(i, i - 1) = 1.0;
    } else if (alpha == n) {
      for (int i = 0; i < n - 1; ++i) f.jacobian(i, i) = 1.0;
      f.offset[n - 1] = 1.0;
    } else {
      // t_i = s_i for i <= alpha, t_{alpha+1} = s_alpha, t_i = s_{i-1} beyond.
      for (int i = 0; i < n; ++i) f.jacobian(i, i < alpha ? i : i - 1) = 1.0;
    }
    faces.push_back(std::move(f));
  }
  return faces;
}

}  // namespace holo
