#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "proxmin/instances.hpp"
#include "proxmin/problem.hpp"
#include "proxmin/rng.hpp"

using namespace proxmin;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("objective: identity composition with l1") {
  CompositeProblem p(SmoothPart::zero(), InnerMap::identity(2), phi_l1(1.0),
                     ConvexSet::whole_space(), 2, 2);
  CHECK(p.objective(vec2(1.0, -2.0)) == doctest::Approx(3.0));
}

TEST_CASE("objective: quadratic g plus l2 residual vanishing at the base point") {
  SmoothPart g = SmoothPart::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  Matrix A = Matrix::Identity(2, 2);
  Vector b = vec2(-1.0, 0.0);
  CompositeProblem p(std::move(g), InnerMap::affine(A, b), phi_l2(1.0),
                     ConvexSet::whole_space(), 2, 2);
  CHECK(p.objective(vec2(1.0, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("objective: l1-penalized Rosenbrock residuals by direct evaluation") {
  const double c = 3.0;
  InnerMap F;
  F.value = [](const Vector& x) {
    Vector v(2);
    v << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
    return v;
  };
  F.jacobian = [](const Vector& x) {
    Matrix J(2, 2);
    J << -20.0 * x[0], 10.0, -1.0, 0.0;
    return J;
  };
  F.lipschitz_jac = 20.0;
  CompositeProblem p(SmoothPart::zero(), std::move(F), phi_l1(c),
                     ConvexSet::whole_space(), 2, 2);
  const Vector x0 = Vector::Zero(2);
  // direct evaluation oracle
  const double expected = c * (std::abs(10.0 * (0.0 - 0.0)) + std::abs(1.0 - 0.0));
  CHECK(p.objective(x0) == doctest::Approx(expected));
}

TEST_CASE("directional derivative: smooth case, zero direction, FD limit") {
  SmoothPart g = SmoothPart::quadratic(2.0 * Matrix::Identity(2, 2), vec2(0.3, -0.1));
  CompositeProblem smooth(g, InnerMap::identity(2), OuterConvex::zero(),
                          ConvexSet::whole_space(), 2, 2);
  const Vector x = vec2(0.7, -0.4);
  const Vector d = vec2(1.0, 2.0);
  CHECK(smooth.directional_derivative(x, d, Vector::Zero(2)) ==
        doctest::Approx(smooth.g_gradient(x).dot(d)));
  CHECK(smooth.directional_derivative(x, Vector::Zero(2), Vector::Zero(2)) == 0.0);

  // l1 composite at a point where the residual has no kink: one-sided FD
  CompositeProblem comp(g, InnerMap::identity(2), phi_l1(1.5),
                        ConvexSet::whole_space(), 2, 2);
  const Vector xs = vec2(0.9, -0.6);
  const Vector xi = comp.phi().subgradient(comp.F_value(xs));  // active subgradient
  const double dd = comp.directional_derivative(xs, d, xi);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double t : {1e-3, 1e-4, 1e-5, 1e-6}) {
    prev = (comp.objective(xs + t * d) - comp.objective(xs)) / t;
  }
  CHECK(dd == doctest::Approx(prev).epsilon(1e-4));
}

TEST_CASE("dimension mismatches and non-finite evaluation") {
  CompositeProblem p(SmoothPart::zero(), InnerMap::identity(2), phi_l1(1.0),
                     ConvexSet::whole_space(), 2, 2);
  CHECK_THROWS_AS(p.objective(Vector::Zero(3)), InputError);
  CHECK_THROWS_AS(p.directional_derivative(Vector::Zero(2), Vector::Zero(3),
                                           Vector::Zero(2)),
                  InputError);
  CHECK_THROWS_AS(p.directional_derivative(Vector::Zero(2), Vector::Zero(2),
                                           Vector::Zero(1)),
                  InputError);

  SmoothPart bad;
  bad.value = [](const Vector& x) { return x[0] > 0 ? std::numeric_limits<double>::infinity() : 0.0; };
  bad.gradient = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
  CompositeProblem q(std::move(bad), InnerMap::identity(2), OuterConvex::zero(),
                     ConvexSet::whole_space(), 2, 2);
  try {
    q.objective(vec2(1.0, 0.0));
    CHECK(false);
  } catch (const EvaluationError& e) {
    CHECK(e.at()[0] == 1.0);
  }
}

TEST_CASE("finite-difference checks of gradients and Jacobians on the corpus") {
  for (const auto& spec : corpus_specs(100)) {
    CompositeProblem p = build_instance(spec);
    Rng rng(spec.seed + 17);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = rng.vector(p.n());
      const Vector grad = p.g_gradient(x);
      const Vector fd = oracle::fd_gradient(
          [&](const Vector& y) { return p.g_value(y); }, x);
      CHECK((grad - fd).norm() <= 1e-5 * (1.0 + grad.norm()));
      const Matrix J = p.F_jacobian(x);
      const Matrix Jfd = oracle::fd_jacobian(
          [&](const Vector& y) { return p.F_value(y); }, x);
      CHECK((J - Jfd).norm() <= 1e-5 * (1.0 + J.norm()));
    }
  }
}

TEST_CASE("descent lemma and linearization bounds hold with the stored constants") {
  for (const auto& spec : corpus_specs(200)) {
    CompositeProblem p = build_instance(spec);
    Rng rng(spec.seed + 23);
    for (int trial = 0; trial < 500; ++trial) {
      const Vector x = rng.vector(p.n());
      const Vector y = x + rng.vector(p.n());
      const double lhs_g = std::abs(p.g_value(y) - p.g_value(x) -
                                    p.g_gradient(x).dot(y - x));
      CHECK(lhs_g <= 0.5 * p.L_g() * (y - x).squaredNorm() + 1e-10);
      const double lhs_F =
          (p.F_value(y) - p.F_value(x) - p.F_jacobian(x) * (y - x)).norm();
      CHECK(lhs_F <= 0.5 * p.L_F() * (y - x).squaredNorm() + 1e-10);
    }
  }
}

TEST_CASE("strong convexity: g minus tau/2 ||.||^2 passes a midpoint sample test") {
  InstanceSpec spec;
  spec.instance = "min_norm_system";
  spec.n = 3;
  spec.m = 2;
  spec.seed = 5;
  CompositeProblem p = build_instance(spec);
  const double tau = p.g().strong_convexity;
  CHECK(tau > 0);
  Rng rng(31);
  auto h = [&](const Vector& x) { return p.g_value(x) - 0.5 * tau * x.squaredNorm(); };
  for (int trial = 0; trial < 300; ++trial) {
    const Vector x = rng.vector(3, -2.0, 2.0);
    const Vector y = rng.vector(3, -2.0, 2.0);
    CHECK(h(0.5 * (x + y)) <= 0.5 * (h(x) + h(y)) + 1e-10);
  }
}

TEST_CASE("objective evaluation is deterministic") {
  InstanceSpec spec;
  spec.instance = "sharp_lagrangian";
  spec.n = 3;
  spec.m = 2;
  spec.penalty = 1.5;
  spec.seed = 77;
  CompositeProblem p = build_instance(spec);
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = rng.vector(3, -2.0, 2.0);
    const double a = p.objective(x);
    const double b = p.objective(x);
    CHECK(a == b);  // bitwise
  }
}

TEST_CASE("L_bar and L_hat compose the stored constants") {
  InstanceSpec spec;
  spec.instance = "l1_penalty_nlp";
  spec.n = 2;
  spec.m = 1;
  spec.penalty = 10.0;
  spec.params = nlohmann::json{{"circle", true}};
  CompositeProblem p = build_instance(spec);
  CHECK(p.L_phi() == doctest::Approx(10.0));
  CHECK(p.L_bar() == doctest::Approx(p.L_g() + p.L_phi() * p.L_F()));
  CHECK(p.L_hat() == doctest::Approx(p.L_phi() * p.L_F()));
  CHECK(p.L_bar() >= p.L_hat());
}
