#include "proxmin/subproblem.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace proxmin {

namespace {

constexpr double kMinRho = 1e-12;

struct ModelCtx {
  const CompositeProblem& p;
  SubproblemVariant variant;
  Vector x;
  double rho;
  double g_x;
  Vector grad_g;  // at x
  Vector F0;      // F(x)
  Matrix J;       // F'(x)
  bool has_phi;

  double phi_of(const Vector& u) const { return has_phi ? p.phi().value(u) : 0.0; }

  // Full model value at step d (comparable with f(x)); x+d assumed feasible.
  double value(const Vector& d) const {
    double v = 0.5 * rho * d.squaredNorm();
    if (has_phi) v += p.phi().value(F0 + J * d);
    if (variant == SubproblemVariant::P1)
      v += g_x + grad_g.dot(d);
    else
      v += p.g_value(x + d);
    return v;
  }

  // min_d [ gpart(d) + rho/2||d||^2 + c'd ], exact for P1 and for P2 with a
  // g-prox; otherwise an inner smooth minimization whose leftover gradient
  // norm is converted into *err so the value stays a valid lower bound after
  // subtracting it.
  double partial_min(const Vector& c, Vector* dmin, double* err) const {
    *err = 0.0;
    if (variant == SubproblemVariant::P1 || p.g().is_zero()) {
      const Vector grad = variant == SubproblemVariant::P1 ? grad_g
                                                           : Vector(Vector::Zero(x.size()));
      const double base = variant == SubproblemVariant::P1 ? g_x : 0.0;
      *dmin = -(grad + c) / rho;
      return base - (grad + c).squaredNorm() / (2.0 * rho);
    }
    // P2: min_y g(y) + rho/2 ||y - x||^2 + c'(y - x)
    if (p.g().prox_available()) {
      const Vector y = p.g().prox(x - c / rho, 1.0 / rho);
      *dmin = y - x;
      return p.g_value(y) + 0.5 * rho * dmin->squaredNorm() + c.dot(*dmin);
    }
    // Smooth inner minimization: Newton when a Hessian is available, else
    // accelerated gradient on the rho-strongly-convex objective.
    Vector y = x;
    const long cap = 5000;
    auto grad_S = [&](const Vector& yy) -> Vector {
      return p.g_gradient(yy) + rho * (yy - x) + c;
    };
    const double gtol = 1e-11 * (1.0 + c.norm() + grad_g.norm());
    if (p.g().hessian) {
      for (long it = 0; it < 100; ++it) {
        Vector gr = grad_S(y);
        if (gr.norm() <= gtol) break;
        Matrix H = p.g().hessian(y) + rho * Matrix::Identity(y.size(), y.size());
        Vector step = H.ldlt().solve(-gr);
        double tstep = 1.0;
        const double S0 = p.g_value(y) + 0.5 * rho * (y - x).squaredNorm() + c.dot(y - x);
        while (tstep > 1e-12) {
          Vector yn = y + tstep * step;
          const double Sn = p.g_value(yn) + 0.5 * rho * (yn - x).squaredNorm() + c.dot(yn - x);
          if (Sn <= S0 + 1e-4 * tstep * gr.dot(step)) break;
          tstep *= 0.5;
        }
        y += tstep * step;
      }
    } else {
      const double L = p.L_g() + rho;
      Vector eta = y, y_prev = y;
      double th = 1.0;
      for (long it = 0; it < cap; ++it) {
        Vector gr = grad_S(eta);
        Vector y_new = eta - gr / L;
        if (grad_S(y_new).norm() <= gtol) {
          y = y_new;
          break;
        }
        const double th_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * th * th));
        eta = y_new + ((th - 1.0) / th_new) * (y_new - y_prev);
        y_prev = y_new;
        y = y_new;
        th = th_new;
      }
    }
    const double res = grad_S(y).norm();
    *err = res * res / (2.0 * rho);
    *dmin = y - x;
    return p.g_value(y) + 0.5 * rho * dmin->squaredNorm() + c.dot(*dmin);
  }
};

ModelCtx make_ctx(const CompositeProblem& p, SubproblemVariant variant,
                  const Vector& x, double rho) {
  ModelCtx ctx{p, variant, x, rho, 0.0, Vector(), Vector(), Matrix(),
               !p.phi().is_zero() && p.m() > 0};
  ctx.g_x = p.g_value(x);
  ctx.grad_g = p.g_gradient(x);
  if (ctx.has_phi) {
    ctx.F0 = p.F_value(x);
    ctx.J = p.F_jacobian(x);
  } else {
    ctx.F0 = Vector::Zero(p.m());
    ctx.J = Matrix::Zero(p.m(), p.n());
  }
  return ctx;
}

GradientMappingRecord assemble(const ModelCtx& ctx, const Vector& V, Vector xi,
                               InnerReport inner) {
  GradientMappingRecord rec;
  rec.rho = ctx.rho;
  rec.V = V;
  rec.d = V - ctx.x;
  rec.r = rec.d.norm();
  rec.G = -ctx.rho * rec.d;  // rho (x - V)
  rec.f_rho = ctx.value(rec.d);
  rec.xi = std::move(xi);
  rec.variant = ctx.variant;
  rec.inner = std::move(inner);
  return rec;
}

// Dual value at (xi, lambda); any dual-feasible pair lower-bounds the model.
double dual_value(const ModelCtx& ctx, const Vector& xi, const Vector& lambda,
                  bool use_s, Vector* dmin) {
  Vector c = ctx.has_phi ? Vector(ctx.J.transpose() * xi) : Vector(Vector::Zero(ctx.x.size()));
  if (use_s) c += lambda;
  double err = 0.0;
  double pmin = ctx.partial_min(c, dmin, &err);
  double D = pmin - err;
  if (ctx.has_phi) D += xi.dot(ctx.F0) - ctx.p.phi().conj_value(xi);
  if (use_s) D += lambda.dot(ctx.x) - ctx.p.omega().support(lambda);
  return D;
}

// Accelerated proximal iteration on the dual of the model (Omega = R^n),
// with a primal-dual gap certificate.
GradientMappingRecord solve_dual_fista(const ModelCtx& ctx, double tol,
                                       const SolveOptions& opts) {
  const auto& phi = ctx.p.phi();
  Eigen::JacobiSVD<Matrix> svd(ctx.J);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  const double Ls = std::max(smax * smax / ctx.rho, 1e-300);

  Vector xi = opts.warm_dual && opts.warm_dual->size() == ctx.F0.size()
                  ? phi.conj_project(*opts.warm_dual)
                  : phi.conj_project(phi.subgradient(ctx.F0));
  Vector xi_prev = xi, eta = xi;
  double th = 1.0;

  double best_gap = std::numeric_limits<double>::infinity();
  double last_h = std::numeric_limits<double>::infinity();
  Vector best_d, best_xi;
  long it = 0;
  const Vector no_lambda;
  for (; it < opts.max_inner_iters; ++it) {
    Vector dtmp;
    double err = 0.0;
    ctx.partial_min(ctx.J.transpose() * eta, &dtmp, &err);
    const Vector grad_s = -(ctx.F0 + ctx.J * dtmp);
    Vector xi_new = phi.prox_conj(eta - grad_s / Ls, 1.0 / Ls);

    if (it % 10 == 0 || it == opts.max_inner_iters - 1) {
      Vector dmin;
      const double D = dual_value(ctx, xi_new, no_lambda, false, &dmin);
      const double P = ctx.value(dmin);
      const double gap = P - D;
      if (gap < best_gap) {
        best_gap = gap;
        best_d = dmin;
        best_xi = xi_new;
      }
      if (best_gap <= tol) {
        InnerReport rep{it + 1, 0.0, 0.0, std::max(best_gap, 0.0), true, "dual_fista"};
        return assemble(ctx, ctx.x + best_d, best_xi, rep);
      }
      const double h = -D;
      if (h > last_h) {  // adaptive restart
        th = 1.0;
        eta = xi_new;
      }
      last_h = h;
    }
    const double th_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * th * th));
    eta = xi_new + ((th - 1.0) / th_new) * (xi_new - xi_prev);
    xi_prev = xi_new;
    th = th_new;
  }
  if (best_d.size() == 0) best_d = Vector::Zero(ctx.x.size());
  throw AccuracyError("subproblem dual solver exceeded max_inner_iters (gap " +
                          std::to_string(best_gap) + ")",
                      ctx.x + best_d, best_gap);
}

// Over-relaxed splitting with residual-balanced penalty for the general case
// (constrained Omega, or P2 with a non-quadratic g).
GradientMappingRecord solve_admm(const ModelCtx& ctx, double tol, const SolveOptions& opts) {
  const auto& p = ctx.p;
  const int n = static_cast<int>(ctx.x.size());
  const int m = static_cast<int>(ctx.F0.size());
  const bool has_phi = ctx.has_phi;
  const bool use_s = !p.omega().is_whole_space();
  const bool p2 = ctx.variant == SubproblemVariant::P2;
  const bool g_zero = p.g().is_zero();
  const bool fold_g = p2 && !g_zero && p.g().is_quadratic;
  const bool use_t = p2 && !g_zero && !fold_g && p.g().prox_available();
  const bool newton_d = p2 && !g_zero && !fold_g && !use_t;

  const double relax = 1.6;
  double sigma = std::max(ctx.rho, 1e-6);

  Matrix JtJ = has_phi ? Matrix(ctx.J.transpose() * ctx.J) : Matrix(Matrix::Zero(n, n));
  Matrix Hg = fold_g ? Matrix(p.g().hessian(ctx.x)) : Matrix(Matrix::Zero(n, n));

  Eigen::LLT<Matrix> llt;
  auto factor = [&]() {
    Matrix M = ctx.rho * Matrix::Identity(n, n) + Hg;
    if (has_phi) M += sigma * JtJ;
    if (use_s) M += sigma * Matrix::Identity(n, n);
    if (use_t) M += sigma * Matrix::Identity(n, n);
    llt.compute(M);
  };
  if (!newton_d) factor();

  Vector d = Vector::Zero(n);
  Vector u = ctx.F0, z_u = Vector::Zero(m);
  Vector s = ctx.x, z_s = Vector::Zero(n);
  Vector t = ctx.x, z_t = Vector::Zero(n);
  if (has_phi && opts.warm_dual && opts.warm_dual->size() == m)
    z_u = p.phi().conj_project(*opts.warm_dual) / sigma;

  const Vector lin_grad = (ctx.variant == SubproblemVariant::P1 || fold_g || g_zero)
                              ? ctx.grad_g
                              : Vector(Vector::Zero(n));

  double best_gap = std::numeric_limits<double>::infinity();
  Vector best_d = d, best_xi = Vector::Zero(m);
  double pr = 0.0, du = 0.0;

  auto newton_d_step = [&]() {
    // minimize g(x+d) + rho/2||d||^2 + sigma/2 ||F0+Jd-u+z_u||^2 (+ s-block)
    auto grad_N = [&](const Vector& dd) -> Vector {
      Vector gr = p.g_gradient(ctx.x + dd) + ctx.rho * dd;
      if (has_phi) gr += sigma * (ctx.J.transpose() * (ctx.F0 + ctx.J * dd - u + z_u));
      if (use_s) gr += sigma * (ctx.x + dd - s + z_s);
      return gr;
    };
    const double L = p.L_g() + ctx.rho + sigma * (JtJ.trace() + (use_s ? 1.0 : 0.0)) + 1.0;
    Vector eta = d, dp = d;
    double th = 1.0;
    for (long k = 0; k < 2000; ++k) {
      Vector gr = grad_N(eta);
      Vector dn = eta - gr / L;
      if (grad_N(dn).norm() <= 1e-11 * (1.0 + dn.norm())) {
        d = dn;
        return;
      }
      const double th_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * th * th));
      eta = dn + ((th - 1.0) / th_new) * (dn - dp);
      dp = dn;
      d = dn;
      th = th_new;
    }
  };

  long it = 0;
  for (; it < opts.max_inner_iters; ++it) {
    if (newton_d) {
      newton_d_step();
    } else {
      Vector rhs = -lin_grad;
      if (has_phi) rhs += sigma * (ctx.J.transpose() * (u - z_u - ctx.F0));
      if (use_s) rhs += sigma * (s - z_s - ctx.x);
      if (use_t) rhs += sigma * (t - z_t - ctx.x);
      d = llt.solve(rhs);
    }

    Vector u_old = u, s_old = s, t_old = t;
    if (has_phi) {
      const Vector Au = ctx.F0 + ctx.J * d;
      const Vector h = relax * Au + (1.0 - relax) * u_old;
      u = p.phi().prox(h + z_u, 1.0 / sigma);
      z_u += h - u;
    }
    if (use_s) {
      const Vector As = ctx.x + d;
      const Vector h = relax * As + (1.0 - relax) * s_old;
      s = p.omega().project(h + z_s);
      z_s += h - s;
    }
    if (use_t) {
      const Vector At = ctx.x + d;
      const Vector h = relax * At + (1.0 - relax) * t_old;
      t = p.g().prox(h + z_t, 1.0 / sigma);
      z_t += h - t;
    }

    pr = 0.0;
    if (has_phi) pr = std::max(pr, (ctx.F0 + ctx.J * d - u).norm());
    if (use_s) pr = std::max(pr, (ctx.x + d - s).norm());
    if (use_t) pr = std::max(pr, (ctx.x + d - t).norm());
    Vector dch = Vector::Zero(n);
    if (has_phi) dch += ctx.J.transpose() * (u - u_old);
    if (use_s) dch += s - s_old;
    if (use_t) dch += t - t_old;
    du = sigma * dch.norm();

    if (it % 20 == 0 || it == opts.max_inner_iters - 1) {
      Vector xi = has_phi ? p.phi().conj_project(sigma * z_u) : Vector(Vector::Zero(m));
      Vector lambda = use_s ? p.omega().support_point(sigma * z_s) : Vector();
      Vector dmin;
      const double D = dual_value(ctx, xi, lambda, use_s, &dmin);
      const Vector d_feas = p.omega().project(ctx.x + d) - ctx.x;
      const double P = ctx.value(d_feas);
      const double gap = P - D;
      if (gap < best_gap) {
        best_gap = gap;
        best_d = d_feas;
        best_xi = xi;
      }
      if (best_gap <= tol) {
        InnerReport rep{it + 1, pr, du, std::max(best_gap, 0.0), true, "admm"};
        return assemble(ctx, ctx.x + best_d, best_xi, rep);
      }
    }

    if (it > 0 && it % 25 == 0 && !newton_d) {
      if (pr > 10.0 * du) {
        sigma *= 2.0;
        z_u /= 2.0;
        z_s /= 2.0;
        z_t /= 2.0;
        factor();
      } else if (du > 10.0 * pr) {
        sigma /= 2.0;
        z_u *= 2.0;
        z_s *= 2.0;
        z_t *= 2.0;
        factor();
      }
    }
  }
  if (best_d.size() == 0) best_d = Vector::Zero(ctx.x.size());
  throw AccuracyError("subproblem splitting exceeded max_inner_iters (gap " +
                          std::to_string(best_gap) + ")",
                      ctx.x + best_d, best_gap);
}

}  // namespace

double psi1_value(const CompositeProblem& p, const Vector& y, const Vector& x) {
  double v = p.g_value(x) + p.g_gradient(x).dot(y - x);
  if (!p.phi().is_zero())
    v += p.phi().value(p.F_value(x) + p.F_jacobian(x) * (y - x));
  return v;
}

double psi2_value(const CompositeProblem& p, const Vector& y, const Vector& x) {
  double v = p.g_value(y);
  if (!p.phi().is_zero())
    v += p.phi().value(p.F_value(x) + p.F_jacobian(x) * (y - x));
  return v;
}

GradientMappingRecord solve_subproblem(SubproblemVariant variant,
                                       const CompositeProblem& p, const Vector& x,
                                       double rho, double tol, const SolveOptions& opts) {
  require(rho > 0, "subproblem: rho must be positive");
  require(rho >= kMinRho, "subproblem: rho below machine-meaningful threshold");
  require(tol > 0, "subproblem: tol must be positive");
  if (variant == SubproblemVariant::P2 && !p.g().is_zero())
    require(p.g().is_convex, "solve_p2: g must be convex");
  if (!p.omega().contains(x, 1e-6 * (1.0 + x.norm())))
    throw InputError("subproblem: base point is not in Omega");

  ModelCtx ctx = make_ctx(p, variant, x, rho);
  InnerReport closed{0, 0.0, 0.0, 0.0, true, "closed_form"};

  // phi absent (or F' identically zero, which freezes the phi term): the
  // model is a projected (proximal) quadratic step.
  const bool inert_phi = !ctx.has_phi || ctx.J.lpNorm<Eigen::Infinity>() == 0.0;
  if (inert_phi) {
    Vector xi = ctx.has_phi ? p.phi().subgradient(ctx.F0) : Vector(Vector::Zero(p.m()));
    if (variant == SubproblemVariant::P1) {
      const Vector V = p.omega().project(x - ctx.grad_g / rho);
      return assemble(ctx, V, xi, closed);
    }
    if (p.g().is_zero()) return assemble(ctx, p.omega().project(x), xi, closed);
    if (p.omega().is_whole_space() && p.g().prox_available())
      return assemble(ctx, p.g().prox(x, 1.0 / rho), xi, closed);
    return solve_admm(ctx, tol, opts);
  }

  // P2 with g == 0 and F the identity reduces to the prox of phi.
  if (variant == SubproblemVariant::P2 && p.g().is_zero() &&
      p.omega().is_whole_space() && p.n() == p.m() &&
      ctx.J.isIdentity(0.0)) {
    const Vector V = p.phi().prox(x, 1.0 / rho);
    return assemble(ctx, V, rho * (x - V), closed);
  }

  if (p.omega().is_whole_space() &&
      (variant == SubproblemVariant::P1 || p.g().is_zero() ||
       p.g().prox_available()))
    return solve_dual_fista(ctx, tol, opts);
  return solve_admm(ctx, tol, opts);
}

GradientMappingRecord solve_p1(const CompositeProblem& p, const Vector& x,
                               double rho, double tol, const SolveOptions& opts) {
  return solve_subproblem(SubproblemVariant::P1, p, x, rho, tol, opts);
}

GradientMappingRecord solve_p2(const CompositeProblem& p, const Vector& x,
                               double rho, double tol, const SolveOptions& opts) {
  return solve_subproblem(SubproblemVariant::P2, p, x, rho, tol, opts);
}

}  // namespace proxmin
