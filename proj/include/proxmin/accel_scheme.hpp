#pragma once

#include <vector>

#include "proxmin/prox_scheme.hpp"
#include "proxmin/subproblem.hpp"

namespace proxmin {

// Estimate function phi_k(x) = 1/2 ||x - x0||^2 + w'x + c together with a_k.
// Each update adds only affine terms, so the quadratic part stays fixed and
// the constrained minimizer is a single projection.
struct EstimateFunction {
  Vector x0;
  Vector w;
  double c = 0.0;
  double a = 0.0;

  double value(const Vector& x) const {
    return 0.5 * (x - x0).squaredNorm() + w.dot(x) + c;
  }
  Vector argmin(const ConvexSet& omega) const { return omega.project(x0 - w); }

  static EstimateFunction initial(const Vector& x0) {
    return EstimateFunction{x0, Vector::Zero(x0.size()), 0.0, 0.0};
  }
};

struct AccelState {
  int k = 0;
  Vector x;
  Vector v;
  Vector y;
  EstimateFunction estimate;  // phi_k (before this iteration's update)
  double rho = 0.0;           // fixed at L_hat
  double alpha = 0.0;
  double tau = 0.0;
  double f_x = 0.0;
  Vector G_tilde;             // L_hat (x^{k+1} - y^k)
  double f_x_next = 0.0;      // f at the new iterate, used by the phi update
};

struct AccelConfig {
  int max_iters = 500;
  double stop_r_tol = 0.0;  // 0 disables the residual stop
  double inner_tol = kDefaultInnerTol;
  bool store_iterates = false;
  bool record_timing = false;
};

struct AccelResult {
  Vector x_final;
  std::vector<TraceRecord> trace;   // shared columns with the prox trace
  std::vector<AccelState> states;   // per-iteration state for rule checks
  EstimateFunction final_estimate;  // phi_K after the last update
  StopReason reason = StopReason::max_iters;
  std::string message;
};

// Accelerated scheme for strongly convex g (tau_g >= L_phi L_F > 0):
//   v^k = argmin_Omega phi_k,  y^k = k/(k+2) x^k + 2/(k+2) v^k,
//   x^{k+1} = V~_{L_hat}(y^k),  phi_{k+1} per the estimate-function update
// with alpha_k = (k+1)/(4 L_hat).
AccelResult run_accel(const CompositeProblem& p, const Vector& x0, const AccelConfig& cfg);

struct RuleViolation {
  int k;
  std::string rule;
  double slack;
};

struct RulesReport {
  bool pass = true;
  std::vector<RuleViolation> violations;
  double worst_r1 = 0.0;
  double worst_r2 = 0.0;
};

// Verifies R1 (a_k f(x^k) <= min_Omega phi_k), R2 (phi_k(x) <= a_k f(x) +
// 1/2||x-x0||^2 at sampled x in Omega), the step-size admissibility
// a_{k+1} rho_k - alpha_k^2 L~^2 / 2 >= 0, and the explicit alpha_k bound
// with q_k = 2 rho_k / L~^2.
RulesReport check_rules(const CompositeProblem& p, const AccelResult& run,
                        const std::vector<Vector>& omega_samples, double tol);

struct Lemma51Report {
  bool pass = true;
  double worst_slack = 0.0;
  int samples = 0;
};

// Samples z in Omega and checks
// f(z) - f(V~_rho(x)) >= (1/rho) [ ||G~||^2 - L~ G~'(z - x) ] - tol,
// with L~ = L_phi L_F + rho.
Lemma51Report lemma51_check(const CompositeProblem& p, const Vector& x, double rho,
                            const std::vector<Vector>& z_samples, double tol);

}  // namespace proxmin
