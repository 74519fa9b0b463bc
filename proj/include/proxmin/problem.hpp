#pragma once

#include <functional>
#include <optional>
#include <string>

#include "proxmin/convex.hpp"
#include "proxmin/types.hpp"

namespace proxmin {

// Smooth (or convex) part g. Null value/gradient mean g == 0. The Lipschitz
// and strong-convexity constants are required inputs, not estimated.
struct SmoothPart {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz_grad = 0.0;    // L_g
  double strong_convexity = 0.0;  // tau_g
  bool is_convex = false;
  // argmin_z g(z) + 1/(2t)||z - v||^2; null when no closed form is known.
  std::function<Vector(const Vector&, double)> prox;
  // Optional Hessian. With is_quadratic = true (constant Hessian) inner solvers
  // fold it into their exact quadratic steps; for other g it only steers
  // Newton iterations.
  std::function<Matrix(const Vector&)> hessian;
  bool is_quadratic = false;

  bool is_zero() const { return !value; }
  bool prox_available() const { return static_cast<bool>(prox); }
  double value_at(const Vector& x) const { return value ? value(x) : 0.0; }
  Vector gradient_at(const Vector& x) const {
    return gradient ? gradient(x) : Vector::Zero(x.size()).eval();
  }

  static SmoothPart zero();
  // g(x) = 1/2 x'Hx + h'x + c0 with H symmetric PSD or indefinite.
  static SmoothPart quadratic(Matrix H, Vector h, double c0 = 0.0);
};

// Differentiable inner map F: R^n -> R^m with Jacobian and its Lipschitz
// constant.
struct InnerMap {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;
  double lipschitz_jac = 0.0;  // L_F; 0 marks an affine map
  std::string domain_note;

  bool is_affine() const { return lipschitz_jac == 0.0; }

  static InnerMap identity(int n);
  static InnerMap affine(Matrix A, Vector b);  // F(x) = A x + b
  // F_i(x) = a_i'x + b_i + 1/2 x'Q_i x; L_F = sqrt(sum ||Q_i||^2).
  static InnerMap quadratic(Matrix A, Vector b, std::vector<Matrix> Q);
};

// The composite problem min { g(x) + phi(F(x)) : x in Omega }.
// Immutable after construction; safe to share across concurrent solves.
class CompositeProblem {
 public:
  CompositeProblem(SmoothPart g, InnerMap F, OuterConvex phi, ConvexSet omega,
                   int n, int m);

  double objective(const Vector& x) const;
  // grad g(x)'d + xi' F'(x) d, with xi a subgradient certificate supplied by
  // the caller (typically from the subproblem solver).
  double directional_derivative(const Vector& x, const Vector& d, const Vector& xi) const;

  double g_value(const Vector& x) const;
  Vector g_gradient(const Vector& x) const;
  Vector F_value(const Vector& x) const;
  Matrix F_jacobian(const Vector& x) const;

  const SmoothPart& g() const { return g_; }
  const InnerMap& F() const { return F_; }
  const OuterConvex& phi() const { return phi_; }
  const ConvexSet& omega() const { return omega_; }

  int n() const { return n_; }
  int m() const { return m_; }
  double L_g() const { return g_.lipschitz_grad; }
  double L_F() const { return F_.lipschitz_jac; }
  double L_phi() const { return L_phi_; }
  double L_bar() const { return L_g() + L_phi_ * L_F(); }  // L_g + L_phi L_F
  double L_hat() const { return L_phi_ * L_F(); }          // L_phi L_F

  void set_known_solution(Vector x_star, double f_star, bool reference_only);
  const std::optional<Vector>& known_x_star() const { return x_star_; }
  std::optional<double> known_f_star() const { return f_star_; }
  bool f_star_is_reference() const { return f_star_is_reference_; }

  std::string label;

 private:
  void check_dim(const Vector& x) const;

  SmoothPart g_;
  InnerMap F_;
  OuterConvex phi_;
  ConvexSet omega_;
  int n_ = 0, m_ = 0;
  double L_phi_ = 0.0;
  std::optional<Vector> x_star_;
  std::optional<double> f_star_;
  bool f_star_is_reference_ = false;
};

}  // namespace proxmin
