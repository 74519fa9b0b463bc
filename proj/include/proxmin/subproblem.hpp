#pragma once

#include <optional>
#include <string>

#include "proxmin/problem.hpp"
#include "proxmin/types.hpp"

namespace proxmin {

enum class SubproblemVariant { P1, P2 };

struct InnerReport {
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double certified_gap = 0.0;  // bound on model-objective suboptimality
  bool converged = true;
  std::string method;
};

// Everything the outer schemes and the diagnostics need from one regularized
// linearized solve at (x, rho): the minimizer V, the search direction
// d = V - x, its norm r, the gradient mapping G = rho (x - V), the model
// optimum f_rho, and a subgradient certificate xi of phi at the linearized
// point F(x) + F'(x)(V - x).
struct GradientMappingRecord {
  double rho = 0.0;
  Vector V;
  Vector d;
  double r = 0.0;
  Vector G;
  double f_rho = 0.0;
  Vector xi;
  SubproblemVariant variant = SubproblemVariant::P1;
  InnerReport inner;
};

struct SolveOptions {
  long max_inner_iters = 200000;
  // Warm start for the outer-function dual variable; off unless supplied.
  std::optional<Vector> warm_dual;
};

// Value of the P1 model psi(y;x) = g(x) + grad g(x)'(y-x) + phi(F(x)+F'(x)(y-x)).
double psi1_value(const CompositeProblem& p, const Vector& y, const Vector& x);
// Value of the P2 model psi~(y;x) = g(y) + phi(F(x)+F'(x)(y-x)).
double psi2_value(const CompositeProblem& p, const Vector& y, const Vector& x);

// Minimize psi(y;x) + rho/2 ||y-x||^2 over Omega to certified accuracy tol
// (absolute, on the model objective).
GradientMappingRecord solve_p1(const CompositeProblem& p, const Vector& x,
                               double rho, double tol = kDefaultInnerTol,
                               const SolveOptions& opts = {});
// Same for the P2 model; requires g convex.
GradientMappingRecord solve_p2(const CompositeProblem& p, const Vector& x,
                               double rho, double tol = kDefaultInnerTol,
                               const SolveOptions& opts = {});

GradientMappingRecord solve_subproblem(SubproblemVariant variant,
                                       const CompositeProblem& p, const Vector& x,
                                       double rho, double tol = kDefaultInnerTol,
                                       const SolveOptions& opts = {});

inline double f_rho_value(const GradientMappingRecord& rec) { return rec.f_rho; }

}  // namespace proxmin
