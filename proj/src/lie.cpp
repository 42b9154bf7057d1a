#include "holo/lie.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <charconv>
#include <cmath>

namespace holo {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_same(const GroupSpec& a, const GroupSpec& b) {
  if (!(a == b)) throw Error(ErrorCode::SpecMismatch, a.name() + " vs " + b.name());
}

void require_shape(const GroupSpec& spec, const Matrix& m) {
  if (m.rows() != spec.matrix_dim() || m.cols() != spec.matrix_dim())
    throw Error(ErrorCode::SpecMismatch, "matrix shape does not match " + spec.name());
}

std::array<Matrix, 3> pauli() {
  Matrix s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

double imag_norm(const Matrix& m) { return m.imag().norm(); }

}  // namespace

GroupSpec GroupSpec::gl(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "GLn needs n >= 1");
  return GroupSpec(GroupKind::GLn, n);
}

GroupSpec GroupSpec::parse(std::string_view name) {
  if (name == "U1") return u1();
  if (name == "SU2") return su2();
  if (name == "SO3") return so3();
  if (name.size() > 2 && name.substr(0, 2) == "GL") {
    int n = 0;
    auto rest = name.substr(2);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
    if (ec == std::errc() && ptr == rest.data() + rest.size()) return gl(n);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown group '" + std::string(name) + "'");
}

int GroupSpec::algebra_dim() const {
  switch (kind_) {
    case GroupKind::U1: return 1;
    case GroupKind::SU2: return 3;
    case GroupKind::SO3: return 3;
    case GroupKind::GLn: return dim_ * dim_;
  }
  return 0;
}

std::string GroupSpec::name() const {
  switch (kind_) {
    case GroupKind::U1: return "U1";
    case GroupKind::SU2: return "SU2";
    case GroupKind::SO3: return "SO3";
    case GroupKind::GLn: return "GL" + std::to_string(dim_);
  }
  return "?";
}

double group_residual(const GroupSpec& spec, const Matrix& m) {
  if (m.rows() != spec.matrix_dim() || m.cols() != spec.matrix_dim()) return INFINITY;
  if (!m.allFinite()) return INFINITY;
  const int n = spec.matrix_dim();
  switch (spec.kind()) {
    case GroupKind::U1: return std::abs(std::abs(m(0, 0)) - 1.0);
    case GroupKind::SU2: {
      double r = (m.adjoint() * m - Matrix::Identity(n, n)).norm();
      return r + std::abs(m.determinant() - 1.0);
    }
    case GroupKind::SO3: {
      double r = (m.transpose() * m - Matrix::Identity(n, n)).norm();
      return r + std::abs(m.determinant() - 1.0) + imag_norm(m);
    }
    case GroupKind::GLn: {
      double r = imag_norm(m);
      return std::abs(m.determinant()) > 1e-12 ? r : INFINITY;
    }
  }
  return INFINITY;
}

double algebra_residual(const GroupSpec& spec, const Matrix& m) {
  if (m.rows() != spec.matrix_dim() || m.cols() != spec.matrix_dim()) return INFINITY;
  if (!m.allFinite()) return INFINITY;
  switch (spec.kind()) {
    case GroupKind::U1: return std::abs(m(0, 0).real());
    case GroupKind::SU2: return (m + m.adjoint()).norm() + std::abs(m.trace());
    case GroupKind::SO3: return (m + m.transpose()).norm() + imag_norm(m);
    case GroupKind::GLn: return imag_norm(m);
  }
  return INFINITY;
}

Matrix project_to_group(const GroupSpec& spec, const Matrix& m) {
  require_shape(spec, m);
  switch (spec.kind()) {
    case GroupKind::U1: {
      Matrix out(1, 1);
      const double a = std::abs(m(0, 0));
      if (a == 0.0) throw Error(ErrorCode::NotInGroup, "cannot project 0 onto U1");
      out(0, 0) = m(0, 0) / a;
      return out;
    }
    case GroupKind::SU2: {
      Matrix u = polar_unitary(m);
      // divide out the square root of the determinant phase
      const Complex d = u.determinant();
      return u / std::sqrt(d);
    }
    case GroupKind::SO3: {
      Eigen::Matrix3d r = m.real();
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix3d u = svd.matrixU();
      const Eigen::Matrix3d v = svd.matrixV();
      if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
      return (u * v.transpose()).cast<Complex>();
    }
    case GroupKind::GLn: {
      Matrix out = m.real().cast<Complex>();
      if (std::abs(out.determinant()) <= 1e-12) throw Error(ErrorCode::NotInGroup, "singular matrix");
      return out;
    }
  }
  return m;
}

Matrix project_to_algebra(const GroupSpec& spec, const Matrix& m) {
  require_shape(spec, m);
  switch (spec.kind()) {
    case GroupKind::U1: {
      Matrix out(1, 1);
      out(0, 0) = Complex(0.0, m(0, 0).imag());
      return out;
    }
    case GroupKind::SU2: {
      Matrix a = 0.5 * (m - m.adjoint());
      const Complex tr = a.trace() / 2.0;
      a(0, 0) -= tr;
      a(1, 1) -= tr;
      return a;
    }
    case GroupKind::SO3: {
      Eigen::Matrix3d r = m.real();
      return (0.5 * (r - r.transpose())).cast<Complex>();
    }
    case GroupKind::GLn: return m.real().cast<Complex>();
  }
  return m;
}

GroupElement::GroupElement(GroupSpec spec, Matrix m) : spec_(spec), m_(std::move(m)) {
  require_shape(spec_, m_);
  const double r = group_residual(spec_, m_);
  if (!(r <= kMembershipTol)) throw Error(ErrorCode::NotInGroup, spec_.name() + " residual " + std::to_string(r));
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
  const int n = spec.matrix_dim();
  return GroupElement(Trusted{}, spec, Matrix::Identity(n, n));
}

GroupElement GroupElement::projected(const GroupSpec& spec, const Matrix& m) {
  require_shape(spec, m);
  if (group_residual(spec, m) <= kMembershipTol) return GroupElement(Trusted{}, spec, m);
  Matrix p = project_to_group(spec, m);
  if (!(group_residual(spec, p) <= kMembershipTol)) throw Error(ErrorCode::NotInGroup, "projection failed");
  return GroupElement(Trusted{}, spec, std::move(p));
}

GroupElement GroupElement::u1_phase(double angle) {
  Matrix m(1, 1);
  m(0, 0) = std::polar(1.0, angle);
  return GroupElement(Trusted{}, GroupSpec::u1(), m);
}

GroupElement GroupElement::inverse() const {
  switch (spec_.kind()) {
    case GroupKind::U1:
    case GroupKind::SU2: return GroupElement(Trusted{}, spec_, m_.adjoint());
    case GroupKind::SO3: return GroupElement(Trusted{}, spec_, m_.transpose());
    case GroupKind::GLn: return GroupElement(Trusted{}, spec_, m_.inverse());
  }
  return *this;
}

AlgebraElement::AlgebraElement(GroupSpec spec, Matrix m) : spec_(spec), m_(std::move(m)) {
  require_shape(spec_, m_);
  const double r = algebra_residual(spec_, m_);
  if (!(r <= kMembershipTol * std::max(1.0, m_.norm())))
    throw Error(ErrorCode::NotInAlgebra, spec_.name() + " residual " + std::to_string(r));
}

AlgebraElement AlgebraElement::zero(const GroupSpec& spec) {
  const int n = spec.matrix_dim();
  return AlgebraElement(Trusted{}, spec, Matrix::Zero(n, n));
}

AlgebraElement AlgebraElement::projected(const GroupSpec& spec, const Matrix& m) {
  return AlgebraElement(Trusted{}, spec, project_to_algebra(spec, m));
}

AlgebraElement AlgebraElement::from_coords(const GroupSpec& spec, const Eigen::VectorXd& coords) {
  const auto basis = algebra_basis(spec);
  if (coords.size() != static_cast<Eigen::Index>(basis.size()))
    throw Error(ErrorCode::SpecMismatch, "coordinate count does not match algebra dimension");
  const int n = spec.matrix_dim();
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < basis.size(); ++k) m += coords[static_cast<Eigen::Index>(k)] * basis[k];
  return AlgebraElement(Trusted{}, spec, m);
}

Eigen::VectorXd AlgebraElement::coords() const { return algebra_coords(spec_, m_); }

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a.spec(), b.spec());
  return AlgebraElement(AlgebraElement::Trusted{}, a.spec(), a.matrix() + b.matrix());
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a.spec(), b.spec());
  return AlgebraElement(AlgebraElement::Trusted{}, a.spec(), a.matrix() - b.matrix());
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
  return AlgebraElement(AlgebraElement::Trusted{}, a.spec(), s * a.matrix());
}

std::vector<Matrix> algebra_basis(const GroupSpec& spec) {
  const int n = spec.matrix_dim();
  std::vector<Matrix> out;
  switch (spec.kind()) {
    case GroupKind::U1: {
      Matrix m(1, 1);
      m(0, 0) = kI;
      out.push_back(m);
      break;
    }
    case GroupKind::SU2:
      for (const auto& s : pauli()) out.push_back(0.5 * kI * s);
      break;
    case GroupKind::SO3: {
      // (L_k)_{ij} = -epsilon_{kij}
      for (int k = 0; k < 3; ++k) {
        Matrix m = Matrix::Zero(3, 3);
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        m(i, j) = -1.0;
        m(j, i) = 1.0;
        out.push_back(m);
      }
      break;
    }
    case GroupKind::GLn:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Matrix m = Matrix::Zero(n, n);
          m(i, j) = 1.0;
          out.push_back(m);
        }
      break;
  }
  return out;
}

Eigen::VectorXd algebra_coords(const GroupSpec& spec, const Matrix& m) {
  require_shape(spec, m);
  const int n = spec.matrix_dim();
  Eigen::VectorXd c(spec.algebra_dim());
  switch (spec.kind()) {
    case GroupKind::U1: c[0] = m(0, 0).imag(); break;
    case GroupKind::SU2: {
      const auto s = pauli();
      for (int k = 0; k < 3; ++k) c[k] = ((s[static_cast<std::size_t>(k)] * m).trace() / kI).real();
      break;
    }
    case GroupKind::SO3:
      c[0] = m(2, 1).real();
      c[1] = m(0, 2).real();
      c[2] = m(1, 0).real();
      break;
    case GroupKind::GLn:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c[i * n + j] = m(i, j).real();
      break;
  }
  return c;
}

GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
  require_same(a.spec(), b.spec());
  return GroupElement::projected(a.spec(), a.matrix() * b.matrix());
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) { return group_mul(a, b); }

Matrix exp_matrix(const GroupSpec& spec, const Matrix& x) {
  switch (spec.kind()) {
    case GroupKind::U1: {
      Matrix out(1, 1);
      out(0, 0) = std::exp(x(0, 0));
      return out;
    }
    case GroupKind::SU2: return expm_su2(x);
    case GroupKind::SO3: return expm_so3(x);
    case GroupKind::GLn: {
      const Eigen::MatrixXd r = x.real();
      return r.exp().cast<Complex>();
    }
  }
  return x;
}

GroupElement group_exp(const AlgebraElement& x) {
  return GroupElement::projected(x.spec(), exp_matrix(x.spec(), x.matrix()));
}

AlgebraElement group_log(const GroupElement& g) {
  const GroupSpec& spec = g.spec();
  if (spec.kind() == GroupKind::U1) {
    Matrix m(1, 1);
    m(0, 0) = Complex(0.0, std::arg(g.matrix()(0, 0)));
    return AlgebraElement(spec, m);
  }
  Matrix l = g.matrix().log();
  return AlgebraElement::projected(spec, l);
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
  require_same(g.spec(), x.spec());
  return AlgebraElement::projected(g.spec(), g.matrix() * x.matrix() * g.inverse().matrix());
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x.spec(), y.spec());
  return AlgebraElement::projected(x.spec(), commutator(x.matrix(), y.matrix()));
}

GroupElement generalized_conjugation(const GroupElement& g, const GroupElement& h, const GroupElement& k) {
  require_same(g.spec(), h.spec());
  require_same(g.spec(), k.spec());
  return GroupElement::projected(g.spec(), h.matrix() * k.matrix() * g.inverse().matrix());
}

double distance(const GroupElement& a, const GroupElement& b) {
  require_same(a.spec(), b.spec());
  return (a.matrix() - b.matrix()).norm();
}

Representation fundamental_rep(const GroupSpec& spec) {
  return Representation{spec, spec.matrix_dim(), [](const Matrix& g) { return g; },
                        [](const Matrix& x) { return x; }, "fundamental"};
}

Representation adjoint_rep(const GroupSpec& spec) {
  const auto basis = algebra_basis(spec);
  const int d = spec.algebra_dim();
  auto group = [spec, basis, d](const Matrix& g) {
    const Matrix gi = g.inverse();
    Matrix r(d, d);
    for (int k = 0; k < d; ++k)
      r.col(k) = algebra_coords(spec, g * basis[static_cast<std::size_t>(k)] * gi).cast<Complex>();
    return r;
  };
  auto algebra = [spec, basis, d](const Matrix& x) {
    Matrix r(d, d);
    for (int k = 0; k < d; ++k)
      r.col(k) = algebra_coords(spec, commutator(x, basis[static_cast<std::size_t>(k)])).cast<Complex>();
    return r;
  };
  return Representation{spec, d, group, algebra, "adjoint"};
}

Representation u1_charge_rep(int charge) {
  auto group = [charge](const Matrix& g) {
    Matrix r(1, 1);
    r(0, 0) = std::pow(g(0, 0), charge);
    return r;
  };
  auto algebra = [charge](const Matrix& x) { return Matrix(static_cast<double>(charge) * x); };
  return Representation{GroupSpec::u1(), 1, group, algebra, "charge(" + std::to_string(charge) + ")"};
}

Representation parse_representation(const GroupSpec& spec, std::string_view name) {
  if (name == "fundamental") return fundamental_rep(spec);
  if (name == "adjoint") return adjoint_rep(spec);
  if (spec.kind() == GroupKind::U1 && name.starts_with("charge(") && name.ends_with(")")) {
    auto body = name.substr(7, name.size() - 8);
    int q = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), q);
    if (ec == std::errc() && ptr == body.data() + body.size()) return u1_charge_rep(q);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown representation '" + std::string(name) + "'");
}

AlgebraElement random_algebra_element(const GroupSpec& spec, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(spec.algebra_dim());
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = scale * normal(rng);
  return AlgebraElement::from_coords(spec, c);
}

GroupElement random_group_element(const GroupSpec& spec, Rng& rng) {
  if (spec.kind() == GroupKind::GLn) return group_exp(random_algebra_element(spec, rng, 0.5));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (spec.kind() == GroupKind::U1) return GroupElement::u1_phase(2.0 * M_PI * unit(rng) - M_PI);
  // Haar-like sample: exponential of a large random algebra element.
  return group_exp(random_algebra_element(spec, rng, 2.0));
}

}  // namespace holo
