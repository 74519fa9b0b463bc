#pragma once

#include <optional>
#include <vector>

#include "proxmin/subproblem.hpp"

namespace proxmin {

struct ProxConfig {
  SubproblemVariant variant = SubproblemVariant::P1;
  // L0 in (0, L_bar] for P1, (0, L_hat] for P2; 0 picks the cap itself.
  double L0 = 0.0;
  double rho_init = 0.0;  // first trial rho; 0 means L0
  double backtrack_factor = 2.0;
  int max_outer_iters = 1000;
  double stop_r_tol = 1e-8;
  double inner_tol = kDefaultInnerTol;
  bool store_iterates = false;
  bool warm_start_dual = false;  // carry the previous xi into the next solve
  bool record_timing = false;    // off keeps trace CSVs bit-reproducible
};

struct TraceRecord {
  int k = 0;
  std::optional<Vector> x;
  double f = 0.0;
  double rho = 0.0;
  double r = 0.0;
  double norm_G = 0.0;
  int backtracks = 0;
  long inner_iters = 0;
  std::int64_t elapsed_us = 0;
};

enum class StopReason { stationary, max_iters, cap_acceptance_failure, inner_failure };

struct ProxResult {
  Vector x_final;
  std::vector<TraceRecord> trace;
  StopReason reason = StopReason::max_iters;
  double L0 = 0.0;          // as resolved at run time
  double rho_cap = 0.0;     // 2*L_bar or 2*L_hat
  std::string message;
};

// Algorithm: from x0 in Omega, find rho_k in [L0, 2*L_cap] by doubling
// backtracking (warm-started at the previous rho divided by the backtrack
// factor) until f(V_rho(x^k)) <= f_rho(x^k), then step to V_rho(x^k).
// Terminates when r_rho(x^k) <= stop_r_tol or after max_outer_iters.
ProxResult run_prox(const CompositeProblem& p, const Vector& x0, const ProxConfig& cfg);

struct DecreaseViolation {
  int k;
  double slack;  // amount by which the inequality failed
};

struct DecreaseReport {
  bool pass = true;
  std::vector<DecreaseViolation> violations;
  double telescoped_slack = 0.0;  // f(x^0)-f(x^K) vs (L0/2) sum r^2
  double tail_max_r = 0.0;        // max r over the last quarter of the trace
};

// Verifies the per-step bound f(x^{i+1}) <= f(x^i) - (L0/2) r_i^2 + tol and
// its telescoped form, and reports the tail of r as the vanishing-step check.
DecreaseReport check_sufficient_decrease(const std::vector<TraceRecord>& trace,
                                         double L0, double tol);

// High-accuracy reference solve (long tight-tolerance run); returns the final
// iterate. Used to produce numerical f* references for diagnostics.
Vector reference_minimizer(const CompositeProblem& p, const Vector& x0,
                           double stop_r_tol = 1e-12, int max_iters = 20000);

}  // namespace proxmin
