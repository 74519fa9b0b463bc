#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

#include "proxmin/accel_scheme.hpp"
#include "proxmin/prox_scheme.hpp"

namespace proxmin {

// Uniform report shape; serializes to
// {check, pass, worst_slack, worst_k, details[]}.
struct CheckReport {
  std::string check;
  bool pass = true;
  double worst_slack = 0.0;
  int worst_k = -1;
  std::vector<std::string> details;

  void note(int k, double slack, const std::string& what);
  nlohmann::json to_json() const;
};

// Smallest singular value of M(x) = [F'(x)' grad g(x)] (n x (m+1)), via the
// eigenvalues of the (m+1)x(m+1) Gram matrix. The complexity bound wants
// m < n; larger m only costs a warning from the callers.
double sigma_min_M(const CompositeProblem& p, const Vector& x);

struct Thm41Options {
  double sigma_lower = 0.0;  // 0: use the trace minimum over stepped-from iterates
  bool variant_b = false;    // thresholds/constants of the theorem's part (b)
  double tol = 1e-7;
};

struct Thm41Report {
  CheckReport report;
  double sigma_M = 0.0;
  double N_min = 0.0;
  int entry_iteration = -1;  // first iterate in the quadratic regime; -1: none
  int linear_steps = 0;
  int quadratic_steps = 0;
};

// Classifies every step of an unconstrained P1 trace by f(x^k)-f* against
// sigma_M^2/(2 L_bar), then checks the linear-regime decrease, the
// quadratic-regime contraction, and that the quadratic region is entered (or
// the run ends) within N_min = 1 + 6 [L_bar D(x0)/sigma_M]^2 iterations.
// The trace must carry iterates.
Thm41Report check_theorem41(const CompositeProblem& p,
                            const std::vector<TraceRecord>& trace, double f_star,
                            const Thm41Options& opts = {});

// Tail property: sum_{i>=k} r_i^2 <= (2/L0)(f(x^k) - f*) + tol for every k.
CheckReport check_theorem31_tail(const std::vector<TraceRecord>& trace, double L0,
                                 double f_star, double tol);

// Local contraction under weak sharp minima: for iterates with
// ||x^k - x*|| <= 2 sigma_f / (3 L_bar + 5 L_lower),
// ||x^{k+1} - x*|| <= 3 (L_bar + L_lower) ||x^k - x*||^2
//                     / (2 (sigma_f - L_lower ||x^k - x*||)) + tol,
// where L_lower = L_g + gamma_phi L_F and sigma_f = sigma_g* + gamma_phi sigma_F*.
CheckReport check_theorem32(const CompositeProblem& p,
                            const std::vector<TraceRecord>& trace,
                            const Vector& x_star, double tol);

struct LemmaSuiteConfig {
  std::vector<double> rho_grid;    // empty: L0 * 2^j, j = 0..7 with L0 = L_bar/8
  double inner_tol = 1e-12;
  double value_slack = 1e-7;       // absolute slack on objective-scale checks
  double mono_rel_tol = 1e-7;      // relative slack for the rho-monotonicity
  bool include_p2 = true;
};

// Runs the full lemma battery at the given base points: rho-monotonicity of
// ||G_rho|| and r_rho, f - f_rho >= rho/2 r^2, the model over-estimates, the
// descent and directional-derivative bounds, and (with a known x*) the
// f_rho upper estimate.
CheckReport run_lemma_suite(const CompositeProblem& p,
                            const std::vector<Vector>& base_points,
                            const LemmaSuiteConfig& cfg = {});

enum class RateModel { one_over_k2, linear, quadratic };

struct FitReport {
  RateModel model;
  double coefficient = 0.0;  // C in C/(k(k+1)), C q^k, or C * gap^2
  double rate = 0.0;         // q for linear, exponent base for quadratic
  double residual = 0.0;     // rms residual of the log fit
  int window = 0;            // number of points used after truncation
};

// Least-squares fit of log(f_k - f*) against the named model; truncates the
// window where f_k - f* falls below tol.
FitReport fit_rate(const std::vector<TraceRecord>& trace, double f_star,
                   RateModel model, double tol = 1e-14);

}  // namespace proxmin
