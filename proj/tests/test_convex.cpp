#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxmin/convex.hpp"
#include "proxmin/rng.hpp"

using namespace proxmin;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// 1-D prox oracle: dense grid minimization of phi(z) + 1/(2t)(z-u)^2.
double prox_oracle_1d(const std::function<double(double)>& phi_1d, double u, double t) {
  return oracle::grid_minimize_1d(
      [&](double z) { return phi_1d(z) + (z - u) * (z - u) / (2.0 * t); },
      u - 10.0, u + 10.0);
}

std::vector<OuterConvex> catalogue() {
  return {phi_l1(1.0),    phi_l2(0.8),          phi_huber(0.7),
          phi_hinge(1.3), phi_l1_hinge(0.9, 1), OuterConvex::zero()};
}

}  // namespace

TEST_CASE("l1 prox matches the per-coordinate grid oracle") {
  auto phi = phi_l1(1.0);
  const Vector u = vec2(3.0, -0.5);
  const Vector z = phi.prox(u, 1.0);
  CHECK(z[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 0; i < 2; ++i) {
    const double zo = prox_oracle_1d([](double w) { return std::abs(w); }, u[i], 1.0);
    CHECK(std::abs(z[i] - zo) < 1e-6);
  }
}

TEST_CASE("l1 value and construction guards") {
  CHECK(phi_l1(2.0).value(vec2(1.0, -2.0)) == doctest::Approx(6.0));
  CHECK_THROWS_AS(phi_l1(0.0), InputError);
  CHECK_THROWS_AS(phi_l1(-1.0), InputError);
  CHECK_THROWS_AS(phi_l2(0.0), InputError);
  CHECK_THROWS_AS(phi_huber(-0.5), InputError);
  CHECK_THROWS_AS(phi_hinge(0.0), InputError);
}

TEST_CASE("l2 prox is block soft-thresholding") {
  auto phi = phi_l2(1.0);
  const Vector z = phi.prox(vec2(3.0, 4.0), 1.0);
  CHECK(z[0] == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(3.2).epsilon(1e-12));
  // radial 1-D oracle: minimize r + (r - 5)^2/2 over the ray through u
  const double r_star =
      prox_oracle_1d([](double r) { return r < 0 ? 1e9 : r; }, 5.0, 1.0);
  CHECK(z.norm() == doctest::Approx(r_star).epsilon(1e-6));
  CHECK(phi.prox(Vector::Zero(2), 0.5).norm() == 0.0);
  CHECK(phi.subgradient(Vector::Zero(2)).norm() == 0.0);
}

TEST_CASE("huber values on both branches and prox continuity at the knee") {
  const double T = 0.8;
  auto phi = phi_huber(T);
  Vector u(1);
  u << T / 2.0;
  CHECK(phi.value(u) == doctest::Approx(T * T / 8.0));
  u << 2.0 * T;
  CHECK(phi.value(u) == doctest::Approx(1.5 * T * T));
  u << -2.0 * T;  // even extension keeps the function convex
  CHECK(phi.value(u) == doctest::Approx(1.5 * T * T));

  auto sigma = [T](double t) {
    return std::abs(t) <= T ? 0.5 * t * t : T * std::abs(t) - 0.5 * T * T;
  };
  for (double t : {0.3, 0.9, 1.1}) {
    for (double v : {T - 1e-3, T, T + 1e-3, -T - 1e-3, 2.5}) {
      Vector w(1);
      w << v * (1.0 + t);
      const double zo = prox_oracle_1d(sigma, w[0], t);
      CHECK(std::abs(phi.prox(w, t)[0] - zo) < 1e-6);
    }
  }
}

TEST_CASE("hinge prox piecewise form against the grid oracle") {
  const double c = 1.3;
  auto phi = phi_hinge(c);
  auto h = [c](double w) { return c * std::max(0.0, w); };
  for (double t : {0.5, 1.0, 2.0}) {
    for (double v : {-2.0, -0.1, 0.0, 0.5 * c * t, c * t, 2.0 * c * t, 4.0}) {
      Vector u(1);
      u << v;
      const double zo = prox_oracle_1d(h, v, t);
      CHECK(std::abs(phi.prox(u, t)[0] - zo) < 1e-6);
    }
  }
}

TEST_CASE("l1_hinge treats the blocks independently") {
  auto phi = phi_l1_hinge(2.0, 1);
  CHECK(phi.value(vec2(-1.5, -3.0)) == doctest::Approx(3.0));  // hinge ignores v<0
  CHECK(phi.value(vec2(-1.5, 2.0)) == doctest::Approx(7.0));
  const Vector z = phi.prox(vec2(-3.0, 1.0), 1.0);
  CHECK(z[0] == doctest::Approx(-1.0));
  CHECK(z[1] == doctest::Approx(0.0));
}

TEST_CASE("prox variational characterization and subgradient validity, sampled") {
  Rng rng(42);
  for (const auto& phi : catalogue()) {
    for (int trial = 0; trial < 1200; ++trial) {
      const int m = 1 + static_cast<int>(rng.next_u64() % 3);
      const Vector u = rng.vector(m, -3.0, 3.0);
      const double t = rng.uniform(0.05, 3.0);
      const Vector z = phi.prox(u, t);
      const Vector gz = (u - z) / t;  // must lie in the subdifferential at z
      const Vector gu = phi.subgradient(u);
      for (int s = 0; s < 4; ++s) {
        const Vector w = rng.vector(m, -4.0, 4.0);
        CHECK(phi.value(w) >= phi.value(z) + gz.dot(w - z) - 1e-9);
        CHECK(phi.value(w) >= phi.value(u) + gu.dot(w - u) - 1e-12);
      }
    }
  }
}

TEST_CASE("prox is nonexpansive and phi is globally Lipschitz, sampled") {
  Rng rng(7);
  for (const auto& phi : catalogue()) {
    for (int trial = 0; trial < 400; ++trial) {
      const int m = 1 + static_cast<int>(rng.next_u64() % 3);
      const double L = phi.lipschitz(m);
      const Vector u = rng.vector(m, -5.0, 5.0);
      const Vector v = rng.vector(m, -5.0, 5.0);
      const double t = rng.uniform(0.05, 2.0);
      CHECK((phi.prox(u, t) - phi.prox(v, t)).norm() <= (u - v).norm() + 1e-12);
      CHECK(std::abs(phi.value(u) - phi.value(v)) <= L * (u - v).norm() + 1e-12);
    }
  }
}

TEST_CASE("weak sharp minima inequality for l1, l2 and hinge") {
  Rng rng(8);
  for (const auto& phi : {phi_l1(1.5), phi_l2(0.6), phi_hinge(2.0)}) {
    const double gamma = *phi.sharp_modulus();
    for (int trial = 0; trial < 500; ++trial) {
      const Vector u = rng.vector(3, -4.0, 4.0);
      CHECK(phi.value(u) >= gamma * phi.dist_to_sharp_set(u) - 1e-12);
    }
  }
  CHECK(!phi_huber(1.0).sharp_modulus().has_value());
}

TEST_CASE("prox_conj via Moreau equals the conjugate-domain projection for l1") {
  auto phi = phi_l1(1.0);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector v = rng.vector(2, -4.0, 4.0);
    const double t = rng.uniform(0.1, 3.0);
    const Vector p = phi.prox_conj(v, t);
    // phi* is the indicator of the unit box, so its prox is a clamp.
    CHECK((p - phi.conj_project(v)).norm() < 1e-12);
  }
}

TEST_CASE("projections: clamp, rescale, simplex oracle, halfspace") {
  auto box = ConvexSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  CHECK((box.project(vec2(2.0, 0.5)) - vec2(1.0, 0.5)).norm() == 0.0);

  auto ball = ConvexSet::ball(Vector::Zero(2), 1.0);
  CHECK((ball.project(vec2(3.0, 4.0)) - vec2(0.6, 0.8)).norm() < 1e-15);

  auto simplex = ConvexSet::simplex();
  const Vector y = vec2(0.4, 0.3);
  const Vector z = simplex.project(y);
  // 1-D parametrization of the unit simplex in R^2
  const double a = oracle::grid_minimize_1d(
      [&](double s) { return (vec2(s, 1.0 - s) - y).squaredNorm(); }, 0.0, 1.0,
      2001, 6);
  CHECK((z - vec2(a, 1.0 - a)).norm() < 1e-9);
  CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-14));

  auto half = ConvexSet::halfspace(vec2(1.0, 1.0), 1.0);
  const Vector h = half.project(vec2(2.0, 2.0));
  CHECK(half.contains(h, 1e-12));
  CHECK((h - vec2(0.5, 0.5)).norm() < 1e-12);
}

TEST_CASE("projection idempotence, firm nonexpansiveness, normal-cone inequality") {
  Rng rng(11);
  std::vector<ConvexSet> sets = {
      ConvexSet::whole_space(),
      ConvexSet::box(Vector::Constant(3, -0.7), Vector::Constant(3, 1.2)),
      ConvexSet::ball(rng.vector(3), 1.4),
      ConvexSet::halfspace(rng.vector(3), 0.3),
      ConvexSet::simplex()};
  for (const auto& set : sets) {
    for (int trial = 0; trial < 350; ++trial) {
      const Vector y = rng.vector(3, -3.0, 3.0);
      const Vector py = set.project(y);
      CHECK((set.project(py) - py).norm() <= 1e-12);
      const Vector z = rng.vector(3, -3.0, 3.0);
      CHECK((py - set.project(z)).norm() <= (y - z).norm() + 1e-12);
      const Vector w = set.project(rng.vector(3, -2.0, 2.0));  // w in Omega
      CHECK((y - py).dot(w - py) <= 1e-9);
    }
  }
}

TEST_CASE("set construction guards") {
  CHECK_THROWS_AS(ConvexSet::box(Vector::Constant(2, 1.0), Vector::Constant(2, -1.0)),
                  InputError);
  CHECK_THROWS_AS(ConvexSet::ball(Vector::Zero(2), 0.0), InputError);
  CHECK_THROWS_AS(ConvexSet::halfspace(Vector::Zero(2), 1.0), InputError);
  CHECK_THROWS_AS(phi_from_name("nope", 1.0), InputError);
}
