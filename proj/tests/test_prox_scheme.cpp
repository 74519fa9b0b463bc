#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "oracles.hpp"
#include "proxmin/instances.hpp"
#include "proxmin/prox_scheme.hpp"
#include "proxmin/rng.hpp"

using namespace proxmin;

namespace {

CompositeProblem quadratic_5d() {
  Matrix B(5, 5);
  Rng rng(21);
  B = rng.matrix(5, 5);
  Matrix H = B.transpose() * B;
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  H /= es.eigenvalues().maxCoeff();
  H += Matrix::Identity(5, 5);
  Vector h = rng.vector(5);
  return CompositeProblem(SmoothPart::quadratic(H, h), InnerMap::identity(5),
                          OuterConvex::zero(), ConvexSet::whole_space(), 5, 5);
}

}  // namespace

TEST_CASE("phi == 0 reduces to gradient descent with adaptive 1/rho steps") {
  CompositeProblem p = quadratic_5d();
  const Matrix H = p.g().hessian(Vector::Zero(5));
  const Vector x_star = H.ldlt().solve(-(p.g_gradient(Vector::Zero(5))));
  ProxConfig cfg;
  cfg.L0 = p.L_bar() / 8.0;
  cfg.max_outer_iters = 200;
  cfg.stop_r_tol = 1e-10;
  cfg.store_iterates = true;
  const Vector x0 = Vector::Ones(5);
  ProxResult res = run_prox(p, x0, cfg);
  CHECK((res.x_final - x_star).norm() < 1e-6);
  CHECK(res.trace.size() <= 200);

  // iterates replay the closed-form gradient step x - grad f(x)/rho_k
  Vector x = x0;
  for (std::size_t k = 0; k + 1 < res.trace.size(); ++k) {
    const Vector next = x - p.g_gradient(x) / res.trace[k].rho;
    CHECK((*res.trace[k + 1].x - next).norm() <= 1e-10);
    x = next;
  }
}

TEST_CASE("stationary start terminates at k = 0 and returns x0") {
  InstanceSpec spec;
  spec.instance = "l1_penalty_nlp";
  spec.n = 2;
  spec.m = 1;
  spec.penalty = 10.0;
  spec.params = nlohmann::json{{"circle", true}};
  CompositeProblem p = build_instance(spec);
  const Vector xs = *p.known_x_star();
  ProxConfig cfg;
  cfg.stop_r_tol = 1e-5;
  ProxResult res = run_prox(p, xs, cfg);
  CHECK(res.reason == StopReason::stationary);
  CHECK(res.trace.size() == 1);
  CHECK((res.x_final - xs).norm() == 0.0);
}

TEST_CASE("consistent min-norm system converges to the reference optimum") {
  InstanceSpec spec;
  spec.instance = "min_norm_system";
  spec.n = 4;
  spec.m = 2;
  spec.seed = 33;
  spec.params = nlohmann::json{{"rho_weight", 1.0}, {"linear", true}, {"consistent", true}};
  CompositeProblem p = build_instance(spec);
  const Vector x0 = default_x0(p, spec);
  const Vector x_ref = reference_minimizer(p, x0);
  const double f_ref = p.objective(x_ref);

  ProxConfig cfg;
  cfg.max_outer_iters = 2000;
  cfg.stop_r_tol = 1e-10;
  ProxResult res = run_prox(p, x0, cfg);
  CHECK(p.objective(res.x_final) - f_ref < 1e-6);
}

TEST_CASE("monotone descent, level-set containment, backtrack bound") {
  for (const auto& spec : corpus_specs(900)) {
    CompositeProblem p = build_instance(spec);
    const Vector x0 = default_x0(p, spec);
    ProxConfig cfg;
    cfg.L0 = p.L_bar() / 4.0;
    cfg.max_outer_iters = 60;
    cfg.stop_r_tol = 1e-9;
    ProxResult res = run_prox(p, x0, cfg);
    CHECK(res.reason != StopReason::cap_acceptance_failure);
    CHECK(res.reason != StopReason::inner_failure);
    const int max_backtracks =
        static_cast<int>(std::ceil(std::log2(res.rho_cap / res.L0))) + 1;
    const double f0 = res.trace.front().f;
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      if (k + 1 < res.trace.size())
        CHECK(res.trace[k + 1].f <= res.trace[k].f + 10.0 * cfg.inner_tol);
      CHECK(res.trace[k].f <= f0 + 10.0 * cfg.inner_tol);  // stays in L_f(f(x0))
      CHECK(res.trace[k].backtracks <= max_backtracks);
      CHECK(res.trace[k].rho >= res.L0 * (1.0 - 1e-12));
      CHECK(res.trace[k].rho <= res.rho_cap * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("P2 variant runs on convex instances and L0 validation holds") {
  InstanceSpec spec;
  spec.instance = "min_norm_system";
  spec.n = 3;
  spec.m = 2;
  spec.seed = 12;
  spec.params = nlohmann::json{{"rho_weight", 0.5}, {"linear", false}, {"curvature", 0.3}};
  CompositeProblem p = build_instance(spec);
  const Vector x0 = default_x0(p, spec);
  ProxConfig cfg;
  cfg.variant = SubproblemVariant::P2;
  cfg.max_outer_iters = 80;
  cfg.stop_r_tol = 1e-8;
  ProxResult res = run_prox(p, x0, cfg);
  CHECK(res.reason != StopReason::cap_acceptance_failure);
  for (std::size_t k = 0; k + 1 < res.trace.size(); ++k)
    CHECK(res.trace[k + 1].f <= res.trace[k].f + 1e-7);

  ProxConfig bad = cfg;
  bad.L0 = 10.0 * p.L_hat();  // outside (0, L_hat]
  CHECK_THROWS_AS(run_prox(p, x0, bad), InputError);
  bad = cfg;
  bad.backtrack_factor = 1.0;
  CHECK_THROWS_AS(run_prox(p, x0, bad), InputError);
}

TEST_CASE("infeasible start is rejected") {
  CompositeProblem p(SmoothPart::zero(), InnerMap::identity(2), phi_l1(1.0),
                     ConvexSet::box(Vector::Zero(2), Vector::Ones(2)), 2, 2);
  ProxConfig cfg;
  Vector x0(2);
  x0 << 3.0, 3.0;
  CHECK_THROWS_AS(run_prox(p, x0, cfg), InputError);
}

TEST_CASE("nonconvex g is rejected by the P2 variant") {
  Matrix H(2, 2);
  H << 1.0, 0.0, 0.0, -0.5;
  CompositeProblem p(SmoothPart::quadratic(H, Vector::Zero(2)), InnerMap::identity(2),
                     phi_l1(1.0), ConvexSet::whole_space(), 2, 2);
  ProxConfig cfg;
  cfg.variant = SubproblemVariant::P2;
  CHECK_THROWS_AS(run_prox(p, Vector::Zero(2), cfg), InputError);
}

TEST_CASE("check_sufficient_decrease: clean trace, tampered trace, single step") {
  CompositeProblem p = quadratic_5d();
  ProxConfig cfg;
  cfg.L0 = p.L_bar() / 8.0;
  cfg.max_outer_iters = 100;
  cfg.stop_r_tol = 1e-9;
  ProxResult res = run_prox(p, Vector::Ones(5), cfg);
  DecreaseReport rep = check_sufficient_decrease(res.trace, res.L0, 10.0 * cfg.inner_tol);
  CHECK(rep.pass);
  CHECK(rep.violations.empty());

  auto tampered = res.trace;
  tampered[2].f = tampered[1].f + 1.0;  // inject an objective increase
  DecreaseReport bad = check_sufficient_decrease(tampered, res.L0, 10.0 * cfg.inner_tol);
  CHECK(!bad.pass);
  CHECK(!bad.violations.empty());
  CHECK(bad.violations.front().k == tampered[1].k);

  std::vector<TraceRecord> pair(res.trace.begin(), res.trace.begin() + 2);
  DecreaseReport single = check_sufficient_decrease(pair, res.L0, 1e-7);
  const double per_step =
      pair[1].f - (pair[0].f - 0.5 * res.L0 * pair[0].r * pair[0].r);
  CHECK(single.telescoped_slack == doctest::Approx(per_step).epsilon(1e-12));

  CHECK_THROWS_AS(check_sufficient_decrease({}, 1.0, 1e-9), InputError);
}

TEST_CASE("warm-started duals do not change the trajectory materially") {
  InstanceSpec spec;
  spec.instance = "sharp_lagrangian";
  spec.n = 3;
  spec.m = 2;
  spec.penalty = 1.5;
  spec.seed = 44;
  CompositeProblem p = build_instance(spec);
  const Vector x0 = default_x0(p, spec);
  ProxConfig cfg;
  cfg.max_outer_iters = 40;
  cfg.stop_r_tol = 1e-9;
  ProxResult cold = run_prox(p, x0, cfg);
  cfg.warm_start_dual = true;
  ProxResult warm = run_prox(p, x0, cfg);
  CHECK((cold.x_final - warm.x_final).norm() < 1e-5);
}
