#include "proxmin/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace proxmin {

void CheckReport::note(int k, double slack, const std::string& what) {
  pass = false;
  if (slack > worst_slack) {
    worst_slack = slack;
    worst_k = k;
  }
  if (details.size() < 64)
    details.push_back("k=" + std::to_string(k) + " " + what +
                      " slack=" + std::to_string(slack));
}

nlohmann::json CheckReport::to_json() const {
  return nlohmann::json{{"check", check},
                        {"pass", pass},
                        {"worst_slack", worst_slack},
                        {"worst_k", worst_k},
                        {"details", details}};
}

double sigma_min_M(const CompositeProblem& p, const Vector& x) {
  Matrix M(p.n(), p.m() + 1);
  M.leftCols(p.m()) = p.F_jacobian(x).transpose();
  M.col(p.m()) = p.g_gradient(x);
  if (!M.allFinite()) throw EvaluationError("M(x) has non-finite entries", x);
  const Matrix gram = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

Thm41Report check_theorem41(const CompositeProblem& p,
                            const std::vector<TraceRecord>& trace, double f_star,
                            const Thm41Options& opts) {
  Thm41Report out;
  CheckReport& rep = out.report;
  rep.check = opts.variant_b ? "thm41_b" : "thm41";
  require(!trace.empty(), "thm41: empty trace");
  if (!p.omega().is_whole_space()) {
    rep.pass = false;
    rep.details.push_back("theorem applies to the unconstrained case only");
    return out;
  }
  if (p.m() >= p.n())
    rep.details.push_back("warning: nondegeneracy of M(x) needs m < n");
  for (const auto& row : trace)
    require(row.x.has_value(), "thm41: trace must store iterates");

  const std::size_t K = trace.size();
  // sigma over stepped-from iterates (the final point, if stationary, is the
  // one place the appended-gradient matrix legitimately degenerates).
  double sigma_trace = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < K; ++k)
    sigma_trace = std::min(sigma_trace, sigma_min_M(p, *trace[k].x));
  if (K == 1) sigma_trace = sigma_min_M(p, *trace[0].x);

  double sigma = opts.sigma_lower > 0 ? opts.sigma_lower : sigma_trace;
  out.sigma_M = sigma;
  if (opts.sigma_lower > 0 && sigma_trace < opts.sigma_lower * (1.0 - 1e-12))
    rep.note(0, opts.sigma_lower - sigma_trace, "supplied sigma exceeds trace minimum");
  if (!(sigma > 0)) {
    rep.pass = false;
    rep.details.push_back("M(x) degenerate along the trace");
    return out;
  }

  const double L_bar = p.L_bar();
  const double threshold =
      opts.variant_b ? sigma * sigma / L_bar : sigma * sigma / (2.0 * L_bar);
  const double lin_decrease =
      opts.variant_b ? sigma * sigma / (2.0 * L_bar) : sigma * sigma / (4.0 * L_bar);
  const double quad_factor =
      opts.variant_b ? L_bar / (2.0 * sigma * sigma) : L_bar / (sigma * sigma);

  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double gap_k = trace[k].f - f_star;
    const double gap_next = trace[k + 1].f - f_star;
    if (gap_k >= threshold) {
      ++out.linear_steps;
      const double slack = gap_next - (gap_k - lin_decrease);
      if (slack > opts.tol)
        rep.note(trace[k].k, slack, "linear-regime decrease");
    } else {
      ++out.quadratic_steps;
      const double slack = gap_next - quad_factor * gap_k * gap_k;
      if (slack > opts.tol)
        rep.note(trace[k].k, slack, "quadratic-regime contraction");
    }
  }

  out.entry_iteration = -1;
  for (std::size_t k = 0; k < K; ++k) {
    if (trace[k].f - f_star < threshold) {
      out.entry_iteration = trace[k].k;
      break;
    }
  }

  if (p.known_x_star()) {
    const double D = (*trace[0].x - *p.known_x_star()).norm();
    out.N_min = 1.0 + 6.0 * std::pow(L_bar * D / sigma, 2.0);
    // Entry (or termination while still in the linear regime) must happen
    // within N_min iterations.
    const double reached = out.entry_iteration >= 0
                               ? static_cast<double>(out.entry_iteration)
                               : static_cast<double>(trace.back().k);
    if (reached > out.N_min)
      rep.note(static_cast<int>(reached), reached - out.N_min,
               "iterations to the quadratic region exceed N_min");
  } else {
    rep.details.push_back("N_min skipped: no known x* for D(x0)");
  }
  return out;
}

CheckReport check_theorem31_tail(const std::vector<TraceRecord>& trace, double L0,
                                 double f_star, double tol) {
  CheckReport rep;
  rep.check = "thm31_tail";
  require(!trace.empty(), "thm31_tail: empty trace");
  std::vector<double> suffix(trace.size() + 1, 0.0);
  for (std::size_t i = trace.size(); i-- > 0;)
    suffix[i] = suffix[i + 1] + trace[i].r * trace[i].r;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double slack = suffix[k] - (2.0 / L0) * (trace[k].f - f_star);
    if (slack > tol) rep.note(trace[k].k, slack, "tail sum of r^2");
  }
  return rep;
}

CheckReport check_theorem32(const CompositeProblem& p,
                            const std::vector<TraceRecord>& trace,
                            const Vector& x_star, double tol) {
  CheckReport rep;
  rep.check = "thm32";
  const auto gamma = p.phi().sharp_modulus();
  if (!gamma) {
    rep.pass = false;
    rep.details.push_back("outer function has no weak-sharp-minima modulus");
    return rep;
  }
  for (const auto& row : trace)
    require(row.x.has_value(), "thm32: trace must store iterates");

  const double sigma_g = p.g_gradient(x_star).norm();
  Eigen::JacobiSVD<Matrix> svd(p.F_jacobian(x_star));
  const double sigma_F = svd.singularValues().minCoeff();
  const double sigma_f = sigma_g + *gamma * sigma_F;
  const double L_lower = p.L_g() + *gamma * p.L_F();
  const double L_bar = p.L_bar();
  const double radius = 2.0 * sigma_f / (3.0 * L_bar + 5.0 * L_lower);
  rep.details.push_back("radius=" + std::to_string(radius) +
                        " sigma_f=" + std::to_string(sigma_f));

  int inside = 0;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const double ek = (*trace[k].x - x_star).norm();
    if (ek > radius || ek <= 0.0) continue;
    ++inside;
    const double e_next = (*trace[k + 1].x - x_star).norm();
    const double denom = sigma_f - L_lower * ek;
    const double bound = 1.5 * (L_bar + L_lower) * ek * ek / denom;
    if (e_next > bound + tol)
      rep.note(trace[k].k, e_next - bound, "contraction bound");
    if (e_next > ek + tol) rep.note(trace[k].k, e_next - ek, "nonexpansion");
  }
  rep.details.push_back("steps inside radius: " + std::to_string(inside));
  return rep;
}

namespace {

struct SolveLine {
  double rho;
  GradientMappingRecord rec;
  double fV;
  double arg_err;  // ||V - V*|| bound from the certified gap
};

void lemma_checks_at(const CompositeProblem& p, const Vector& x,
                     SubproblemVariant variant, const LemmaSuiteConfig& cfg,
                     const std::vector<double>& grid, int point_idx,
                     CheckReport& rep) {
  const bool p1 = variant == SubproblemVariant::P1;
  const double L_const = p1 ? p.L_bar() : p.L_hat();
  const double fx = p.objective(x);
  std::vector<SolveLine> lines;
  for (double rho : grid) {
    SolveLine ln;
    ln.rho = rho;
    ln.rec = solve_subproblem(variant, p, x, rho, cfg.inner_tol);
    ln.fV = p.objective(ln.rec.V);
    ln.arg_err = std::sqrt(2.0 * std::max(ln.rec.inner.certified_gap, cfg.inner_tol) / rho);
    lines.push_back(std::move(ln));
  }

  const std::string tag = p1 ? "P1" : "P2";
  for (const SolveLine& ln : lines) {
    const auto& rec = ln.rec;
    const double r2 = rec.r * rec.r;
    const double base_slack = cfg.value_slack + 10.0 * cfg.inner_tol;
    // local first-order scale for argument-inexactness allowances
    const double scale = p.g_gradient(rec.V).norm() + p.L_phi() + ln.rho * (rec.r + 1.0) + 1.0;
    const double arg_slack = ln.arg_err * scale;

    // f(x) - f_rho >= rho/2 r^2
    {
      const double slack = 0.5 * ln.rho * r2 - (fx - rec.f_rho);
      if (slack > base_slack) rep.note(point_idx, slack, tag + " f_f_rho rho=" + std::to_string(ln.rho));
    }
    // |f(V) - psi(V;x)| <= L/2 ||V-x||^2  (holds at any V, so no arg slack)
    {
      const double psi = p1 ? psi1_value(p, rec.V, x) : psi2_value(p, rec.V, x);
      const double slack = std::abs(ln.fV - psi) - 0.5 * L_const * r2;
      if (slack > base_slack) rep.note(point_idx, slack, tag + " over_estimate rho=" + std::to_string(ln.rho));
    }
    // f(x) - f(V) >= (2 rho - L)/2 r^2
    {
      const double slack = 0.5 * (2.0 * ln.rho - L_const) * r2 - (fx - ln.fV);
      if (slack > base_slack + arg_slack)
        rep.note(point_idx, slack, tag + " descent_bound rho=" + std::to_string(ln.rho));
    }
    // Df(x)[d] <= -rho r^2 with the solver certificate
    {
      const double df = p.directional_derivative(x, rec.d, rec.xi);
      const double slack = df + ln.rho * r2;
      if (slack > base_slack + arg_slack)
        rep.note(point_idx, slack, tag + " directional_derivative rho=" + std::to_string(ln.rho));
    }
    // f_rho(x) <= f* + (rho + L)/2 ||x* - x||^2 on instances with a known x*
    if (p.known_x_star() && p.known_f_star()) {
      const double rho_bar = ln.rho + L_const;
      const double bound =
          *p.known_f_star() + 0.5 * rho_bar * (x - *p.known_x_star()).squaredNorm();
      const double slack = rec.f_rho - bound;
      if (slack > base_slack) rep.note(point_idx, slack, tag + " upper_est_star rho=" + std::to_string(ln.rho));
    }
  }

  // ||G_rho|| nondecreasing and r_rho nonincreasing along the rho grid.
  for (std::size_t j = 0; j + 1 < lines.size(); ++j) {
    const auto& a = lines[j];
    const auto& b = lines[j + 1];
    const double r_allow = cfg.mono_rel_tol * std::max(1.0, a.rec.r) +
                           2.0 * (a.arg_err + b.arg_err);
    if (b.rec.r > a.rec.r + r_allow)
      rep.note(point_idx, b.rec.r - a.rec.r, tag + " r_rho monotonicity");
    const double ga = a.rec.G.norm(), gb = b.rec.G.norm();
    const double g_allow = cfg.mono_rel_tol * std::max(1.0, ga) +
                           2.0 * (a.rho * a.arg_err + b.rho * b.arg_err);
    if (gb < ga - g_allow)
      rep.note(point_idx, ga - gb, tag + " normG monotonicity");
  }
}

}  // namespace

CheckReport run_lemma_suite(const CompositeProblem& p,
                            const std::vector<Vector>& base_points,
                            const LemmaSuiteConfig& cfg) {
  CheckReport rep;
  rep.check = "lemma_suite";
  std::vector<double> grid = cfg.rho_grid;
  if (grid.empty()) {
    const double L0 = std::max(p.L_bar() / 8.0, 1e-6);
    for (int j = 0; j < 8; ++j) grid.push_back(L0 * std::pow(2.0, j));
  }
  int idx = 0;
  for (const Vector& x0 : base_points) {
    const Vector x = p.omega().project(x0);
    lemma_checks_at(p, x, SubproblemVariant::P1, cfg, grid, idx, rep);
    if (cfg.include_p2 && (p.g().is_zero() || p.g().is_convex))
      lemma_checks_at(p, x, SubproblemVariant::P2, cfg, grid, idx, rep);
    ++idx;
  }
  return rep;
}

FitReport fit_rate(const std::vector<TraceRecord>& trace, double f_star,
                   RateModel model, double tol) {
  require(trace.size() >= 5, "fit_rate: trace length must be at least 5");
  std::vector<double> ks, logs;
  for (const auto& row : trace) {
    const double gap = row.f - f_star;
    if (gap <= tol) break;  // truncate once the gap hits the floor
    if (model == RateModel::one_over_k2 && row.k == 0) continue;
    ks.push_back(static_cast<double>(row.k));
    logs.push_back(std::log(gap));
  }
  FitReport fit;
  fit.model = model;
  fit.window = static_cast<int>(ks.size());
  if (fit.window < 2) return fit;

  auto rms = [](const std::vector<double>& e) {
    double s = 0;
    for (double v : e) s += v * v;
    return std::sqrt(s / e.size());
  };

  if (model == RateModel::one_over_k2) {
    double mean = 0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      mean += logs[i] + std::log(ks[i] * (ks[i] + 1.0));
    mean /= ks.size();
    fit.coefficient = std::exp(mean);
    std::vector<double> err;
    for (std::size_t i = 0; i < ks.size(); ++i)
      err.push_back(logs[i] - (mean - std::log(ks[i] * (ks[i] + 1.0))));
    fit.residual = rms(err);
  } else if (model == RateModel::linear) {
    // log gap_k = log C + k log q
    double sk = 0, sl = 0, skk = 0, skl = 0;
    const double nn = static_cast<double>(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      sk += ks[i];
      sl += logs[i];
      skk += ks[i] * ks[i];
      skl += ks[i] * logs[i];
    }
    const double denom = nn * skk - sk * sk;
    const double slope = denom != 0 ? (nn * skl - sk * sl) / denom : 0.0;
    const double icept = (sl - slope * sk) / nn;
    fit.coefficient = std::exp(icept);
    fit.rate = std::exp(slope);
    std::vector<double> err;
    for (std::size_t i = 0; i < ks.size(); ++i)
      err.push_back(logs[i] - (icept + slope * ks[i]));
    fit.residual = rms(err);
  } else {
    // log gap_{k+1} = log C + 2 log gap_k
    if (logs.size() < 2) return fit;
    double mean = 0;
    for (std::size_t i = 0; i + 1 < logs.size(); ++i)
      mean += logs[i + 1] - 2.0 * logs[i];
    mean /= (logs.size() - 1);
    fit.coefficient = std::exp(mean);
    fit.rate = 2.0;
    std::vector<double> err;
    for (std::size_t i = 0; i + 1 < logs.size(); ++i)
      err.push_back(logs[i + 1] - (mean + 2.0 * logs[i]));
    fit.residual = rms(err);
    fit.window = static_cast<int>(logs.size()) - 1;
  }
  return fit;
}

}  // namespace proxmin
