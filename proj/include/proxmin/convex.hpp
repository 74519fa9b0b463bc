#pragma once

#include <optional>
#include <string>

#include "proxmin/types.hpp"

namespace proxmin {

// Outer convex function phi with value, one deterministic subgradient, prox,
// a global Lipschitz constant, and (where it exists) a weak-sharp-minima
// modulus with its minimizer set.
//
// Subgradient selection at kinks is deterministic (0 at the kink of |.|,
// ||.||_2 and [.]_+) so certificates are reproducible.
class OuterConvex {
 public:
  enum class Kind { zero, l1, l2, huber, hinge, l1_hinge };
  enum class SharpSet { none, origin, nonpositive_orthant };

  double value(const Vector& u) const;
  Vector subgradient(const Vector& u) const;
  // argmin_z phi(z) + 1/(2t) ||z - u||^2, t > 0.
  Vector prox(const Vector& u, double t) const;

  // Euclidean-norm Lipschitz constant for inputs of dimension m.
  double lipschitz(int m) const;

  // Conjugate machinery used by the dual certificates of the subproblem
  // solvers: phi*(xi) on its domain, projection onto dom(phi*), and
  // prox of t*phi* via the Moreau identity.
  double conj_value(const Vector& xi) const;
  Vector conj_project(const Vector& xi) const;
  Vector prox_conj(const Vector& v, double t) const;

  // Weak sharp minima: phi(u) - phi_min >= gamma * dist(u, S*). phi_min is 0
  // for every member of the catalogue.
  std::optional<double> sharp_modulus() const;
  double dist_to_sharp_set(const Vector& u) const;

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  double scale() const { return c_; }
  std::string name() const;

  static OuterConvex zero();

 private:
  friend OuterConvex phi_l1(double c);
  friend OuterConvex phi_l2(double c);
  friend OuterConvex phi_huber(double T);
  friend OuterConvex phi_hinge(double c);
  friend OuterConvex phi_l1_hinge(double c, int l1_dim);

  OuterConvex(Kind kind, double c, int split) : kind_(kind), c_(c), split_(split) {}

  Kind kind_ = Kind::zero;
  double c_ = 0.0;   // penalty scale; Huber threshold T for Kind::huber
  int split_ = 0;    // l1_hinge: first split_ coordinates are l1, rest hinge
};

// phi = c ||.||_1, prox = soft-thresholding.
OuterConvex phi_l1(double c);
// phi = c ||.||_2, prox = block soft-thresholding.
OuterConvex phi_l2(double c);
// phi(u) = sum_i huber_T(u_i) with the even (convex) extension of the
// quadratic/linear branches.
OuterConvex phi_huber(double T);
// phi(u) = c sum_i max(0, u_i).
OuterConvex phi_hinge(double c);
// phi(u, v) = c ||u||_1 + c [v]_+ on a split vector; u = first l1_dim coords.
OuterConvex phi_l1_hinge(double c, int l1_dim);

OuterConvex phi_from_name(const std::string& name, double c, int l1_dim = 0);

// Convex feasible set with Euclidean projection.
class ConvexSet {
 public:
  enum class Kind { whole_space, box, ball, halfspace, simplex };

  Vector project(const Vector& y) const;
  bool contains(const Vector& y, double tol) const;
  // Support function sup_{z in Omega} lambda' z; for the halfspace the
  // argument is first projected onto the normal ray (see support_point).
  double support(const Vector& lambda) const;
  // Dual point with finite support nearest to lambda (identity except for
  // the halfspace, whose support is finite only along its normal).
  Vector support_point(const Vector& lambda) const;

  Kind kind() const { return kind_; }
  bool is_whole_space() const { return kind_ == Kind::whole_space; }
  std::string name() const;

  static ConvexSet whole_space();
  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet halfspace(Vector a, double b);  // { z : a'z <= b }
  static ConvexSet simplex();                      // { z >= 0, sum z = 1 }

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::whole_space;
  Vector lo_, hi_;      // box
  Vector center_;       // ball
  double radius_ = 0;   // ball
  Vector a_;            // halfspace normal
  double b_ = 0;        // halfspace offset
};

Vector project_onto_simplex(const Vector& y);

}  // namespace proxmin
