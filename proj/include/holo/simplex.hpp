#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace holo {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes on [0, 1].
GaussRule gauss_legendre(int n);

// Visits the quadrature nodes of {0 <= t_1 <= ... <= t_n <= 1}, iterating t_n outermost.
// n = 0 visits the single point of the 0-simplex with weight 1.
void for_each_simplex_node(int n, int resolution, const std::function<void(const Eigen::VectorXd&, double)>& visit);

double simplex_integrate(int n, const std::function<double(const Eigen::VectorXd&)>& f, int resolution);

// Same integral with t_pivot outermost: t_pivot in [0,1], the later times in [t_pivot, ...], the earlier in [0, ...].
double simplex_integrate_pivot(int n, const std::function<double(const Eigen::VectorXd&)>& f, int resolution,
                               int pivot);

struct SimplexGrid {
  int n = 0;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  int orientation_sign = 1;
};

SimplexGrid make_simplex_grid(int n, int resolution);

struct BoundaryFace {
  int alpha = 0;
  int sign = 1;
  // Affine embedding of the (n-1)-simplex: t = jacobian * s + offset.
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd offset;

  Eigen::VectorXd embed(const Eigen::VectorXd& s) const { return jacobian * s + offset; }
};

// Face 0 is t_1 = 0, face a in 1..n-1 is t_a = t_{a+1}, face n is t_n = 1; sign (-1)^(a+1).
std::vector<BoundaryFace> boundary_faces(int n);

}  // namespace holo
