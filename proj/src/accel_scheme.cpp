#include "proxmin/accel_scheme.hpp"

#include <chrono>
#include <cmath>

namespace proxmin {

AccelResult run_accel(const CompositeProblem& p, const Vector& x0, const AccelConfig& cfg) {
  const double L_hat = p.L_hat();
  require(L_hat > 0, "accel: L_phi * L_F must be positive");
  require(p.g().is_convex && p.g().strong_convexity >= L_hat * (1.0 - 1e-12),
          "accel: requires tau_g >= L_phi * L_F (strong convexity assumption)");
  if (!p.omega().contains(x0, 1e-8 * (1.0 + x0.norm())))
    throw InputError("accel: x0 is not in Omega");
  require(cfg.max_iters > 0, "accel: max_iters must be positive");

  AccelResult res;
  EstimateFunction est = EstimateFunction::initial(x0);
  Vector x = x0;
  double fx = p.objective(x);
  const double L_tilde = 2.0 * L_hat;  // rho_k + L_phi L_F with rho_k = L_hat

  for (int k = 0; k < cfg.max_iters; ++k) {
    const auto tic = std::chrono::steady_clock::now();
    const Vector v = est.argmin(p.omega());
    const double kk = static_cast<double>(k);
    const Vector y = (kk / (kk + 2.0)) * x + (2.0 / (kk + 2.0)) * v;

    GradientMappingRecord rec;
    try {
      rec = solve_p2(p, y, L_hat, cfg.inner_tol);
    } catch (const AccuracyError& e) {
      res.x_final = x;
      res.reason = StopReason::inner_failure;
      res.message = e.what();
      res.final_estimate = est;
      return res;
    }
    const Vector x_next = rec.V;
    // Section-5 tilde mapping: G~ = rho (V~ - y); the section-2 record stores
    // the opposite sign, so flip it here.
    const Vector G = -rec.G;
    const double f_next = p.objective(x_next);
    const double alpha = (kk + 1.0) / (4.0 * L_hat);
    const double tau = alpha / (est.a + alpha);  // = 2/(k+2)

    AccelState st;
    st.k = k;
    st.x = x;
    st.v = v;
    st.y = y;
    st.estimate = est;
    st.rho = L_hat;
    st.alpha = alpha;
    st.tau = tau;
    st.f_x = fx;
    st.G_tilde = G;
    st.f_x_next = f_next;
    res.states.push_back(st);

    // phi_{k+1}(x) = phi_k(x)
    //   + alpha [ f(x^{k+1}) + (1/rho)(||G~||^2 - L~ G~'(x - y)) ]
    est.w -= (alpha * L_tilde / L_hat) * G;
    est.c += alpha * (f_next + G.squaredNorm() / L_hat) +
             (alpha * L_tilde / L_hat) * G.dot(y);
    est.a += alpha;

    const auto toc = std::chrono::steady_clock::now();
    TraceRecord row;
    row.k = k;
    if (cfg.store_iterates) row.x = x;
    row.f = fx;
    row.rho = L_hat;
    row.r = rec.r;  // ||x^{k+1} - y^k||
    row.norm_G = G.norm();
    row.backtracks = 0;
    row.inner_iters = rec.inner.iterations;
    row.elapsed_us =
        cfg.record_timing
            ? std::chrono::duration_cast<std::chrono::microseconds>(toc - tic).count()
            : 0;
    res.trace.push_back(std::move(row));

    x = x_next;
    fx = f_next;
    if (cfg.stop_r_tol > 0 && rec.r <= cfg.stop_r_tol) {
      res.x_final = x;
      res.reason = StopReason::stationary;
      res.final_estimate = est;
      return res;
    }
  }
  res.x_final = x;
  res.reason = StopReason::max_iters;
  res.final_estimate = est;
  return res;
}

RulesReport check_rules(const CompositeProblem& p, const AccelResult& run,
                        const std::vector<Vector>& omega_samples, double tol) {
  RulesReport rep;
  const auto flag = [&](int k, const std::string& rule, double slack) {
    rep.pass = false;
    rep.violations.push_back({k, rule, slack});
  };

  auto check_at = [&](int k, const EstimateFunction& est, double f_xk) {
    // R1: a_k f(x^k) <= phi_k^* = phi_k(v^k)
    const Vector v = est.argmin(p.omega());
    const double r1 = est.a * f_xk - est.value(v);
    rep.worst_r1 = std::max(rep.worst_r1, r1);
    if (r1 > tol) flag(k, "R1", r1);
    // R2 at sampled x in Omega
    for (const Vector& z : omega_samples) {
      const double r2 =
          est.value(z) - (est.a * p.objective(z) + 0.5 * (z - est.x0).squaredNorm());
      rep.worst_r2 = std::max(rep.worst_r2, r2);
      if (r2 > tol) flag(k, "R2", r2);
    }
  };

  for (const AccelState& st : run.states) {
    check_at(st.k, st.estimate, st.f_x);
    // Step-size admissibility a_{k+1} rho_k - alpha_k^2 L~^2 / 2 >= 0 and the
    // explicit bound alpha_k <= (q_k + sqrt(q_k^2 + 4 q_k a_k)) / 2.
    const double L_tilde = st.rho + p.L_hat();
    const double a_next = st.estimate.a + st.alpha;
    const double admiss = a_next * st.rho - 0.5 * st.alpha * st.alpha * L_tilde * L_tilde;
    if (admiss < -tol) flag(st.k, "admissibility", -admiss);
    const double q = 2.0 * st.rho / (L_tilde * L_tilde);
    const double bound = 0.5 * (q + std::sqrt(q * q + 4.0 * q * st.estimate.a));
    if (st.alpha > bound + tol) flag(st.k, "alpha_bound", st.alpha - bound);
    if (!(st.alpha > 0)) flag(st.k, "alpha_positive", -st.alpha);
  }
  if (!run.states.empty()) {
    const AccelState& last = run.states.back();
    check_at(last.k + 1, run.final_estimate, p.objective(run.x_final));
  }
  return rep;
}

Lemma51Report lemma51_check(const CompositeProblem& p, const Vector& x, double rho,
                            const std::vector<Vector>& z_samples, double tol) {
  require(p.g().strong_convexity >= p.L_hat() * (1.0 - 1e-12),
          "lemma51_check: strong convexity assumption does not hold");
  Lemma51Report rep;
  const GradientMappingRecord rec = solve_p2(p, x, rho);
  const double fV = p.objective(rec.V);
  const double L_tilde = p.L_hat() + rho;
  const Vector Gt = -rec.G;  // rho (V~ - x), the sign the inequality uses
  for (const Vector& z : z_samples) {
    const double lhs = p.objective(z) - fV;
    const double rhs =
        (Gt.squaredNorm() - L_tilde * Gt.dot(z - x)) / rho;
    const double slack = rhs - lhs;  // violation when positive
    rep.worst_slack = std::max(rep.worst_slack, slack);
    if (slack > tol) rep.pass = false;
    ++rep.samples;
  }
  return rep;
}

}  // namespace proxmin
