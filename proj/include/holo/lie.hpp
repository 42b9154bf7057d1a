#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "holo/errors.hpp"

namespace holo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

constexpr double kMembershipTol = 1e-10;

enum class GroupKind { U1, SU2, SO3, GLn };

class GroupSpec {
 public:
  static GroupSpec u1() { return GroupSpec(GroupKind::U1, 1); }
  static GroupSpec su2() { return GroupSpec(GroupKind::SU2, 2); }
  static GroupSpec so3() { return GroupSpec(GroupKind::SO3, 3); }
  static GroupSpec gl(int n);
  // "U1", "SU2", "SO3", "GL<n>"
  static GroupSpec parse(std::string_view name);

  GroupKind kind() const { return kind_; }
  int matrix_dim() const { return dim_; }
  bool is_complex() const { return kind_ == GroupKind::U1 || kind_ == GroupKind::SU2; }
  bool is_abelian() const { return kind_ == GroupKind::U1 || (kind_ == GroupKind::GLn && dim_ == 1); }
  int algebra_dim() const;
  std::string name() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  GroupSpec(GroupKind kind, int dim) : kind_(kind), dim_(dim) {}
  GroupKind kind_;
  int dim_;
};

// Scalar-generic kernels.

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  return (x * y - y * x).eval();
}

// exp of a traceless anti-Hermitian 2x2 matrix: cos(r) I + sin(r)/r x with r^2 = -det x.
template <typename Derived>
typename Derived::PlainObject expm_su2(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  const double r2 = std::norm(x(0, 0)) + std::norm(x(0, 1));
  const double r = std::sqrt(r2);
  const double c = std::cos(r);
  const double s = r < 1e-8 ? 1.0 - r2 / 6.0 : std::sin(r) / r;
  Plain out = s * x;
  out(0, 0) += c;
  out(1, 1) += c;
  return out;
}

// Rodrigues formula for an antisymmetric 3x3 matrix (real part is used).
template <typename Derived>
typename Derived::PlainObject expm_so3(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  const double wx = std::real(x(2, 1)), wy = std::real(x(0, 2)), wz = std::real(x(1, 0));
  const double r2 = wx * wx + wy * wy + wz * wz;
  const double r = std::sqrt(r2);
  double a, b;
  if (r < 1e-6) {
    a = 1.0 - r2 / 6.0;
    b = 0.5 - r2 / 24.0;
  } else {
    a = std::sin(r) / r;
    b = (1.0 - std::cos(r)) / r2;
  }
  Plain out = Plain::Identity(3, 3) + a * x + b * (x * x);
  return out;
}

// Nearest unitary matrix (polar factor).
template <typename Derived>
typename Derived::PlainObject polar_unitary(const Eigen::MatrixBase<Derived>& m) {
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double group_residual(const GroupSpec& spec, const Matrix& m);
double algebra_residual(const GroupSpec& spec, const Matrix& m);

// Maps a near-member onto the group (polar factor, determinant fix, phase normalisation).
Matrix project_to_group(const GroupSpec& spec, const Matrix& m);
Matrix project_to_algebra(const GroupSpec& spec, const Matrix& m);

class GroupElement {
 public:
  // Throws NotInGroup if the residual exceeds the membership tolerance.
  GroupElement(GroupSpec spec, Matrix m);

  static GroupElement identity(const GroupSpec& spec);
  // Repairs drift by projection when the residual exceeds the tolerance.
  static GroupElement projected(const GroupSpec& spec, const Matrix& m);
  static GroupElement u1_phase(double angle);

  const GroupSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return m_; }
  GroupElement inverse() const;

 private:
  struct Trusted {};
  GroupElement(Trusted, GroupSpec spec, Matrix m) : spec_(spec), m_(std::move(m)) {}
  GroupSpec spec_;
  Matrix m_;
};

class AlgebraElement {
 public:
  AlgebraElement(GroupSpec spec, Matrix m);

  static AlgebraElement zero(const GroupSpec& spec);
  static AlgebraElement projected(const GroupSpec& spec, const Matrix& m);
  static AlgebraElement from_coords(const GroupSpec& spec, const Eigen::VectorXd& coords);

  const GroupSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return m_; }
  Eigen::VectorXd coords() const;
  double norm() const { return m_.norm(); }

 private:
  struct Trusted {};
  AlgebraElement(Trusted, GroupSpec spec, Matrix m) : spec_(spec), m_(std::move(m)) {}
  GroupSpec spec_;
  Matrix m_;
  friend AlgebraElement operator+(const AlgebraElement&, const AlgebraElement&);
  friend AlgebraElement operator-(const AlgebraElement&, const AlgebraElement&);
  friend AlgebraElement operator*(double, const AlgebraElement&);
};

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(double s, const AlgebraElement& a);

// Basis of the Lie algebra: U1 {i}, SU2 {i sigma_k / 2}, SO3 {L_x, L_y, L_z}, GLn {E_ij}.
std::vector<Matrix> algebra_basis(const GroupSpec& spec);
// Coordinates of an algebra matrix in algebra_basis.
Eigen::VectorXd algebra_coords(const GroupSpec& spec, const Matrix& m);

GroupElement group_mul(const GroupElement& a, const GroupElement& b);
GroupElement operator*(const GroupElement& a, const GroupElement& b);
GroupElement group_exp(const AlgebraElement& x);
// exp of a raw algebra matrix, closed forms where available.
Matrix exp_matrix(const GroupSpec& spec, const Matrix& x);
// Principal matrix logarithm mapped back into the algebra.
AlgebraElement group_log(const GroupElement& g);
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x);
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);
// h k g^{-1}
GroupElement generalized_conjugation(const GroupElement& g, const GroupElement& h, const GroupElement& k);

double distance(const GroupElement& a, const GroupElement& b);

struct Representation {
  GroupSpec spec;
  int dim_v;
  std::function<Matrix(const Matrix&)> apply_group;
  std::function<Matrix(const Matrix&)> apply_algebra;
  std::string name;

  Matrix operator()(const GroupElement& g) const { return apply_group(g.matrix()); }
  Matrix derived(const AlgebraElement& x) const { return apply_algebra(x.matrix()); }
};

Representation fundamental_rep(const GroupSpec& spec);
// Adjoint representation on algebra coordinates.
Representation adjoint_rep(const GroupSpec& spec);
// U1 character z -> z^charge.
Representation u1_charge_rep(int charge);
// "fundamental", "adjoint", "charge(<n>)"
Representation parse_representation(const GroupSpec& spec, std::string_view name);

using Rng = std::mt19937_64;

AlgebraElement random_algebra_element(const GroupSpec& spec, Rng& rng, double scale = 1.0);
GroupElement random_group_element(const GroupSpec& spec, Rng& rng);

}  // namespace holo
