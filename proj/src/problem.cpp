#include "proxmin/problem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <utility>

namespace proxmin {

SmoothPart SmoothPart::zero() { return SmoothPart{}; }

SmoothPart SmoothPart::quadratic(Matrix H, Vector h, double c0) {
  require(H.rows() == H.cols(), "quadratic g: H must be square");
  require(H.rows() == h.size(), "quadratic g: H and h dimensions differ");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();

  SmoothPart g;
  auto Hs = std::make_shared<Matrix>(std::move(H));
  auto hs = std::make_shared<Vector>(std::move(h));
  g.value = [Hs, hs, c0](const Vector& x) {
    return 0.5 * x.dot(*Hs * x) + hs->dot(x) + c0;
  };
  g.gradient = [Hs, hs](const Vector& x) -> Vector { return *Hs * x + *hs; };
  g.hessian = [Hs](const Vector&) -> Matrix { return *Hs; };
  g.is_quadratic = true;
  g.lipschitz_grad = std::max(std::abs(lmin), std::abs(lmax));
  g.is_convex = lmin >= -1e-12;
  g.strong_convexity = std::max(0.0, lmin);
  if (g.is_convex) {
    g.prox = [Hs, hs](const Vector& v, double t) -> Vector {
      const int n = static_cast<int>(v.size());
      Matrix M = Matrix::Identity(n, n) + t * (*Hs);
      return M.ldlt().solve(v - t * (*hs));
    };
  }
  return g;
}

InnerMap InnerMap::identity(int n) {
  InnerMap F;
  F.value = [](const Vector& x) { return x; };
  F.jacobian = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
  F.lipschitz_jac = 0.0;
  return F;
}

InnerMap InnerMap::affine(Matrix A, Vector b) {
  require(A.rows() == b.size(), "affine F: A and b dimensions differ");
  InnerMap F;
  auto As = std::make_shared<Matrix>(std::move(A));
  auto bs = std::make_shared<Vector>(std::move(b));
  F.value = [As, bs](const Vector& x) -> Vector { return *As * x + *bs; };
  F.jacobian = [As](const Vector&) -> Matrix { return *As; };
  F.lipschitz_jac = 0.0;
  return F;
}

InnerMap InnerMap::quadratic(Matrix A, Vector b, std::vector<Matrix> Q) {
  require(A.rows() == b.size(), "quadratic F: A and b dimensions differ");
  require(static_cast<int>(Q.size()) == A.rows(), "quadratic F: one Q per output");
  double sq = 0.0;
  for (const auto& Qi : Q) {
    require(Qi.rows() == A.cols() && Qi.cols() == A.cols(), "quadratic F: Q dimension");
    Eigen::SelfAdjointEigenSolver<Matrix> es(Qi);
    const double op = std::max(std::abs(es.eigenvalues().minCoeff()),
                               std::abs(es.eigenvalues().maxCoeff()));
    sq += op * op;
  }
  InnerMap F;
  auto As = std::make_shared<Matrix>(std::move(A));
  auto bs = std::make_shared<Vector>(std::move(b));
  auto Qs = std::make_shared<std::vector<Matrix>>(std::move(Q));
  F.value = [As, bs, Qs](const Vector& x) -> Vector {
    Vector v = *As * x + *bs;
    for (int i = 0; i < v.size(); ++i) v[i] += 0.5 * x.dot((*Qs)[i] * x);
    return v;
  };
  F.jacobian = [As, Qs](const Vector& x) -> Matrix {
    Matrix J = *As;
    for (int i = 0; i < J.rows(); ++i) J.row(i) += (x.transpose() * (*Qs)[i]);
    return J;
  };
  F.lipschitz_jac = std::sqrt(sq);
  return F;
}

CompositeProblem::CompositeProblem(SmoothPart g, InnerMap F, OuterConvex phi,
                                   ConvexSet omega, int n, int m)
    : g_(std::move(g)), F_(std::move(F)), phi_(std::move(phi)),
      omega_(std::move(omega)), n_(n), m_(m) {
  require(n_ > 0, "problem: n must be positive");
  require(m_ >= 0, "problem: m must be nonnegative");
  require(g_.lipschitz_grad >= 0 && F_.lipschitz_jac >= 0, "problem: negative constant");
  L_phi_ = phi_.lipschitz(m_);
  if (!phi_.is_zero()) {
    require(F_.value && F_.jacobian, "problem: F required when phi is nonzero");
  }
}

void CompositeProblem::check_dim(const Vector& x) const {
  if (x.size() != n_)
    throw InputError("point has dimension " + std::to_string(x.size()) +
                     ", expected " + std::to_string(n_));
}

double CompositeProblem::g_value(const Vector& x) const {
  check_dim(x);
  return g_.value_at(x);
}

Vector CompositeProblem::g_gradient(const Vector& x) const {
  check_dim(x);
  Vector grad = g_.gradient_at(x);
  if (grad.size() != n_) throw InputError("gradient dimension mismatch");
  return grad;
}

Vector CompositeProblem::F_value(const Vector& x) const {
  check_dim(x);
  if (!F_.value) return Vector::Zero(m_);
  Vector v = F_.value(x);
  if (v.size() != m_) throw InputError("F output dimension mismatch");
  return v;
}

Matrix CompositeProblem::F_jacobian(const Vector& x) const {
  check_dim(x);
  if (!F_.jacobian) return Matrix::Zero(m_, n_);
  Matrix J = F_.jacobian(x);
  if (J.rows() != m_ || J.cols() != n_) throw InputError("Jacobian dimension mismatch");
  return J;
}

double CompositeProblem::objective(const Vector& x) const {
  check_dim(x);
  double v = g_.value_at(x);
  if (!phi_.is_zero()) v += phi_.value(F_value(x));
  if (!std::isfinite(v)) throw EvaluationError("objective is not finite", x);
  return v;
}

double CompositeProblem::directional_derivative(const Vector& x, const Vector& d,
                                                const Vector& xi) const {
  check_dim(x);
  check_dim(d);
  if (xi.size() != m_) throw InputError("certificate has wrong dimension");
  double v = g_gradient(x).dot(d);
  if (!phi_.is_zero()) v += xi.dot(F_jacobian(x) * d);
  return v;
}

void CompositeProblem::set_known_solution(Vector x_star, double f_star,
                                          bool reference_only) {
  check_dim(x_star);
  x_star_ = std::move(x_star);
  f_star_ = f_star;
  f_star_is_reference_ = reference_only;
}

}  // namespace proxmin
