#include "proxmin/prox_scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace proxmin {

ProxResult run_prox(const CompositeProblem& p, const Vector& x0, const ProxConfig& cfg) {
  require(cfg.backtrack_factor > 1.0, "prox: backtrack_factor must exceed 1");
  require(cfg.max_outer_iters > 0, "prox: max_outer_iters must be positive");
  require(cfg.stop_r_tol >= 0, "prox: stop_r_tol must be nonnegative");
  if (cfg.variant == SubproblemVariant::P2 && !p.g().is_zero())
    require(p.g().is_convex, "prox: variant P2 requires convex g");
  if (!p.omega().contains(x0, 1e-8 * (1.0 + x0.norm())))
    throw InputError("prox: x0 is not in Omega");

  const double cap_base =
      cfg.variant == SubproblemVariant::P1 ? p.L_bar() : p.L_hat();
  require(cap_base > 0, "prox: zero Lipschitz cap; constants missing");
  const double L0 = cfg.L0 > 0 ? cfg.L0 : cap_base;
  require(L0 <= cap_base * (1.0 + 1e-12), "prox: L0 must lie in (0, L_cap]");
  const double rho_cap = 2.0 * cap_base;

  ProxResult res;
  res.L0 = L0;
  res.rho_cap = rho_cap;

  Vector x = x0;
  double fx = p.objective(x);
  double rho_prev = cfg.rho_init > 0 ? cfg.rho_init : L0;
  std::optional<Vector> warm;
  const double accept_slack = 10.0 * cfg.inner_tol;

  for (int k = 0; k < cfg.max_outer_iters; ++k) {
    const auto tic = std::chrono::steady_clock::now();
    double rho = std::clamp(rho_prev / cfg.backtrack_factor, L0, rho_cap);
    int backtracks = 0;
    long inner_iters = 0;
    GradientMappingRecord rec;
    double fV = 0.0;
    bool accepted = false;
    while (true) {
      SolveOptions opts;
      if (cfg.warm_start_dual && warm) opts.warm_dual = warm;
      try {
        rec = solve_subproblem(cfg.variant, p, x, rho, cfg.inner_tol, opts);
      } catch (const AccuracyError& e) {
        res.x_final = x;
        res.reason = StopReason::inner_failure;
        res.message = e.what();
        return res;
      }
      inner_iters += rec.inner.iterations;
      bool finite = true;
      try {
        fV = p.objective(rec.V);
      } catch (const EvaluationError&) {
        finite = false;  // left the domain; treat as acceptance failure
      }
      accepted = finite && fV <= rec.f_rho + accept_slack;
      if (accepted || rho >= rho_cap * (1.0 - 1e-12)) break;
      rho = std::min(rho * cfg.backtrack_factor, rho_cap);
      ++backtracks;
    }

    const auto toc = std::chrono::steady_clock::now();
    TraceRecord row;
    row.k = k;
    if (cfg.store_iterates) row.x = x;
    row.f = fx;
    row.rho = rho;
    row.r = rec.r;
    row.norm_G = rec.G.norm();
    row.backtracks = backtracks;
    row.inner_iters = inner_iters;
    row.elapsed_us =
        cfg.record_timing
            ? std::chrono::duration_cast<std::chrono::microseconds>(toc - tic).count()
            : 0;
    res.trace.push_back(std::move(row));

    if (!accepted) {
      // Acceptance is guaranteed at the cap when the stored constants are
      // correct; reaching this point means they are not.
      res.x_final = x;
      res.reason = StopReason::cap_acceptance_failure;
      res.message = "acceptance test failed at rho cap; check Lipschitz constants";
      return res;
    }

    if (rec.r <= cfg.stop_r_tol) {
      res.x_final = x;
      res.reason = StopReason::stationary;
      return res;
    }

    x = rec.V;
    fx = fV;
    rho_prev = rho;
    if (cfg.warm_start_dual) warm = rec.xi;
  }
  res.x_final = x;
  res.reason = StopReason::max_iters;
  return res;
}

DecreaseReport check_sufficient_decrease(const std::vector<TraceRecord>& trace,
                                         double L0, double tol) {
  require(!trace.empty(), "check_sufficient_decrease: empty trace");
  DecreaseReport rep;
  double sum_r2 = 0.0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double r2 = trace[i].r * trace[i].r;
    sum_r2 += r2;
    const double slack = trace[i + 1].f - (trace[i].f - 0.5 * L0 * r2);
    if (slack > tol) {
      rep.pass = false;
      rep.violations.push_back({trace[i].k, slack});
    }
  }
  rep.telescoped_slack =
      0.5 * L0 * sum_r2 - (trace.front().f - trace.back().f);
  if (rep.telescoped_slack > tol) rep.pass = false;
  const std::size_t tail_start = trace.size() - std::max<std::size_t>(1, trace.size() / 4);
  for (std::size_t i = tail_start; i < trace.size(); ++i)
    rep.tail_max_r = std::max(rep.tail_max_r, trace[i].r);
  return rep;
}

Vector reference_minimizer(const CompositeProblem& p, const Vector& x0,
                           double stop_r_tol, int max_iters) {
  ProxConfig cfg;
  cfg.variant = (p.g().is_zero() || p.g().is_convex) ? SubproblemVariant::P2
                                                     : SubproblemVariant::P1;
  if (cfg.variant == SubproblemVariant::P2 && p.L_hat() == 0.0)
    cfg.variant = SubproblemVariant::P1;  // P2 cap degenerates for affine F
  cfg.stop_r_tol = stop_r_tol;
  cfg.max_outer_iters = max_iters;
  cfg.inner_tol = 1e-13;
  ProxResult res = run_prox(p, x0, cfg);
  return res.x_final;
}

}  // namespace proxmin
