#include "proxmin/instances.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <cmath>
#include <utility>

#include "proxmin/rng.hpp"

namespace proxmin {

using nlohmann::json;

InstanceSpec::InstanceSpec() = default;
InstanceSpec::InstanceSpec(const InstanceSpec&) = default;
InstanceSpec::InstanceSpec(InstanceSpec&&) noexcept = default;
InstanceSpec& InstanceSpec::operator=(const InstanceSpec&) = default;
InstanceSpec& InstanceSpec::operator=(InstanceSpec&&) noexcept = default;
InstanceSpec::~InstanceSpec() = default;

InstanceSpec InstanceSpec::from_json(const json& j) {
  InstanceSpec s;
  require(j.contains("instance"), "config: missing \"instance\"");
  s.instance = j.at("instance").get<std::string>();
  s.n = j.value("n", 2);
  s.m = j.value("m", 1);
  s.penalty = j.value("penalty", 1.0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.params = j.value("params", json::object());
  return s;
}

json InstanceSpec::to_json() const {
  return json{{"instance", instance}, {"n", n},    {"m", m},
              {"penalty", penalty},   {"seed", seed}, {"params", params}};
}

namespace {

Vector json_vector(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

Matrix json_matrix(const json& j) {
  const int rows = static_cast<int>(j.size());
  require(rows > 0, "config: empty matrix");
  const int cols = static_cast<int>(j[0].size());
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    require(static_cast<int>(j[i].size()) == cols, "config: ragged matrix");
    for (int k = 0; k < cols; ++k) a(i, k) = j[i][k].get<double>();
  }
  return a;
}

// Random symmetric matrix with unit spectral norm.
Matrix random_unit_symmetric(Rng& rng, int n) {
  Matrix s = rng.matrix(n, n);
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const double op = std::max(std::abs(es.eigenvalues().minCoeff()),
                             std::abs(es.eigenvalues().maxCoeff()));
  if (op > 0) s /= op;
  return s;
}

// Random convex quadratic with eigenvalues in [mu, mu + spread].
SmoothPart random_convex_quadratic(Rng& rng, int n, double mu, double spread,
                                   const Vector& center) {
  Matrix b = rng.matrix(n, n);
  Matrix h = b.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmax > 0) h *= spread / lmax;
  h += mu * Matrix::Identity(n, n);
  // g(x) = 1/2 (x-center)' H (x-center)
  Vector lin = -(h * center);
  return SmoothPart::quadratic(h, lin, 0.5 * center.dot(h * center));
}

ConvexSet omega_from_params(const json& params, int n) {
  const std::string name = params.value("omega", "rn");
  if (name == "rn") return ConvexSet::whole_space();
  if (name == "box") {
    if (params.contains("box_lo"))
      return ConvexSet::box(json_vector(params.at("box_lo")), json_vector(params.at("box_hi")));
    const double r = params.value("box_radius", 10.0);
    return ConvexSet::box(Vector::Constant(n, -r), Vector::Constant(n, r));
  }
  if (name == "ball") {
    Vector c = params.contains("ball_center") ? json_vector(params.at("ball_center"))
                                              : Vector(Vector::Zero(n));
    return ConvexSet::ball(c, params.value("ball_radius", 10.0));
  }
  if (name == "halfspace") {
    require(params.contains("a"), "halfspace needs a normal vector \"a\"");
    return ConvexSet::halfspace(json_vector(params.at("a")), params.value("b", 0.0));
  }
  if (name == "simplex") return ConvexSet::simplex();
  throw InputError("unknown omega: " + name);
}

CompositeProblem build_min_norm_system(const InstanceSpec& spec) {
  const json& pr = spec.params;
  const double rho_w = pr.value("rho_weight", 1.0);
  require(rho_w > 0, "min_norm_system: rho_weight must be positive");
  Rng rng(spec.seed ^ 0x6d696e6eULL);

  Matrix A = pr.contains("A") ? json_matrix(pr.at("A")) : rng.matrix(spec.m, spec.n);
  Vector b;
  if (pr.contains("b")) {
    b = json_vector(pr.at("b"));
  } else if (pr.value("consistent", true)) {
    b = -(A * rng.vector(spec.n));  // F(x_true) = 0
  } else {
    b = rng.vector(spec.m);
  }

  InnerMap F;
  const double kappa = pr.value("curvature", 0.0);
  if (pr.value("linear", true) || kappa == 0.0) {
    F = InnerMap::affine(A, b);
  } else {
    std::vector<Matrix> Q;
    for (int i = 0; i < spec.m; ++i) Q.push_back(kappa * random_unit_symmetric(rng, spec.n));
    F = InnerMap::quadratic(A, b, std::move(Q));
  }

  // g(x) = rho_w ||x||^2
  SmoothPart g = SmoothPart::quadratic(2.0 * rho_w * Matrix::Identity(spec.n, spec.n),
                                       Vector::Zero(spec.n));
  CompositeProblem p(std::move(g), std::move(F), phi_l2(1.0),
                     omega_from_params(pr, spec.n), spec.n, spec.m);
  p.label = "min_norm_system";
  return p;
}

CompositeProblem build_l1_penalty_nlp(const InstanceSpec& spec) {
  const json& pr = spec.params;
  const double c = spec.penalty;
  require(c > 0, "l1_penalty_nlp: penalty must be positive");
  Rng rng(spec.seed ^ 0x6c31706eULL);

  if (pr.value("circle", false)) {
    // p(x) = 1/2 ||x - z||^2, q(x) = x1^2 + x2^2 - 1, no inequality block.
    require(spec.n == 2 && spec.m == 1, "circle variant is 2-D with one constraint");
    Vector z = pr.contains("z") ? json_vector(pr.at("z")) : Vector(Vector::Constant(2, 2.0));
    SmoothPart g = SmoothPart::quadratic(Matrix::Identity(2, 2), -z, 0.5 * z.squaredNorm());
    std::vector<Matrix> Q{2.0 * Matrix::Identity(2, 2)};
    InnerMap F = InnerMap::quadratic(Matrix::Zero(1, 2), -Vector::Ones(1), std::move(Q));
    CompositeProblem p(std::move(g), std::move(F), phi_l1(c),
                       omega_from_params(pr, spec.n), 2, 1);
    p.label = "l1_penalty_nlp_circle";
    const double nz = z.norm();
    if (nz > 1.0 && c >= 0.5 * (nz - 1.0) * (1.0 + 1e-9)) {
      Vector xs = z / nz;
      p.set_known_solution(xs, 0.5 * (nz - 1.0) * (nz - 1.0), false);
    }
    return p;
  }

  const int m_q = pr.value("m_q", spec.m);
  const int m_r = pr.value("m_r", spec.m - m_q);
  require(m_q >= 0 && m_r >= 0 && m_q + m_r == spec.m, "l1_penalty_nlp: m_q + m_r must equal m");

  SmoothPart g = random_convex_quadratic(rng, spec.n, 0.1, 1.0, rng.vector(spec.n));
  Matrix A = rng.matrix(spec.m, spec.n);
  Vector b = rng.vector(spec.m);
  const double kappa = pr.value("curvature", 0.2);
  std::vector<Matrix> Q;
  for (int i = 0; i < spec.m; ++i) {
    // equality rows q are mildly nonlinear, inequality rows r stay affine
    if (i < m_q && kappa > 0)
      Q.push_back(kappa * random_unit_symmetric(rng, spec.n));
    else
      Q.push_back(Matrix::Zero(spec.n, spec.n));
  }
  InnerMap F = InnerMap::quadratic(std::move(A), std::move(b), std::move(Q));
  OuterConvex phi = m_r == 0 ? phi_l1(c) : phi_l1_hinge(c, m_q);
  CompositeProblem p(std::move(g), std::move(F), std::move(phi),
                     omega_from_params(pr, spec.n), spec.n, spec.m);
  p.label = "l1_penalty_nlp";
  return p;
}

CompositeProblem build_sharp_lagrangian(const InstanceSpec& spec) {
  const json& pr = spec.params;
  const double c = spec.penalty;
  require(c > 0, "sharp_lagrangian: penalty must be positive");
  Rng rng(spec.seed ^ 0x73686172ULL);

  // p(x) = 1/2 ||x - xbar||^2, q(x) = A (x - xbar) (+ optional curvature),
  // H(x) = p(x) + u'q(x) + c ||q(x)||_1.
  Vector xbar = pr.contains("xbar") ? json_vector(pr.at("xbar")) : rng.vector(spec.n);
  Matrix A = pr.contains("A") ? json_matrix(pr.at("A")) : rng.matrix(spec.m, spec.n);
  Vector u = pr.contains("u") ? json_vector(pr.at("u"))
                              : rng.vector(spec.m, -0.5 * c, 0.5 * c);
  require(u.size() == spec.m, "sharp_lagrangian: multiplier dimension");
  const double kappa = pr.value("curvature", 0.0);

  Vector bq = -(A * xbar);
  std::vector<Matrix> Q;
  for (int i = 0; i < spec.m; ++i)
    Q.push_back(kappa > 0 ? Matrix(kappa * random_unit_symmetric(rng, spec.n))
                          : Matrix(Matrix::Zero(spec.n, spec.n)));

  // g(x) = p(x) + u'q(x) is itself quadratic.
  Matrix Hg = Matrix::Identity(spec.n, spec.n);
  Vector hg = -xbar + A.transpose() * u;
  double c0 = 0.5 * xbar.squaredNorm() + u.dot(bq);
  for (int i = 0; i < spec.m; ++i) Hg += u[i] * Q[i];
  SmoothPart g = SmoothPart::quadratic(std::move(Hg), std::move(hg), c0);

  InnerMap F = InnerMap::quadratic(A, bq, std::move(Q));
  CompositeProblem p(std::move(g), std::move(F), phi_l1(c),
                     omega_from_params(pr, spec.n), spec.n, spec.m);
  p.label = "sharp_lagrangian";
  if (kappa == 0.0 && u.lpNorm<Eigen::Infinity>() <= c) {
    p.set_known_solution(xbar, 0.0, false);
  }
  return p;
}

CompositeProblem build_custom(const InstanceSpec& spec) {
  const json& pr = spec.params;
  SmoothPart g;
  if (pr.contains("g")) {
    const json& jg = pr.at("g");
    Matrix H;
    if (jg.contains("H"))
      H = json_matrix(jg.at("H"));
    else if (jg.contains("diag")) {
      Vector d = json_vector(jg.at("diag"));
      H = d.asDiagonal();
    } else {
      H = Matrix::Zero(spec.n, spec.n);
    }
    Vector h = jg.contains("h") ? json_vector(jg.at("h")) : Vector(Vector::Zero(spec.n));
    g = SmoothPart::quadratic(std::move(H), std::move(h), jg.value("c0", 0.0));
  } else {
    g = SmoothPart::zero();
  }

  InnerMap F;
  if (pr.contains("F")) {
    const json& jf = pr.at("F");
    Matrix A = jf.contains("A") ? json_matrix(jf.at("A")) : Matrix(Matrix::Zero(spec.m, spec.n));
    Vector b = jf.contains("b") ? json_vector(jf.at("b")) : Vector(Vector::Zero(spec.m));
    if (jf.contains("Q")) {
      std::vector<Matrix> Q;
      for (const auto& q : jf.at("Q")) Q.push_back(json_matrix(q));
      F = InnerMap::quadratic(std::move(A), std::move(b), std::move(Q));
    } else {
      F = InnerMap::affine(std::move(A), std::move(b));
    }
  } else {
    require(spec.n == spec.m, "custom: identity F needs n == m");
    F = InnerMap::identity(spec.n);
  }

  OuterConvex phi = phi_from_name(pr.value("phi", "l1"), spec.penalty,
                                  pr.value("l1_dim", spec.m));
  CompositeProblem p(std::move(g), std::move(F), std::move(phi),
                     omega_from_params(pr, spec.n), spec.n, spec.m);
  p.label = "custom";
  if (pr.contains("x_star") && pr.contains("f_star"))
    p.set_known_solution(json_vector(pr.at("x_star")), pr.at("f_star").get<double>(),
                         pr.value("f_star_reference", false));
  return p;
}

}  // namespace

CompositeProblem build_instance(const InstanceSpec& spec) {
  require(spec.n > 0 && spec.m >= 0, "instance: bad dimensions");
  if (spec.instance == "sparse_least_squares")
    throw AssumptionViolation(
        "sparse_least_squares pairs phi = 1/2||.||_2^2 with a convex-g branch; "
        "the squared norm has no global Lipschitz constant, so the instance "
        "violates the standing outer-function assumption and is rejected");
  if (spec.instance == "min_norm_system") return build_min_norm_system(spec);
  if (spec.instance == "l1_penalty_nlp") return build_l1_penalty_nlp(spec);
  if (spec.instance == "sharp_lagrangian") return build_sharp_lagrangian(spec);
  if (spec.instance == "custom") return build_custom(spec);
  throw InputError("unknown instance: " + spec.instance);
}

Vector default_x0(const CompositeProblem& p, const InstanceSpec& spec) {
  if (spec.params.contains("x0")) {
    Vector x0 = json_vector(spec.params.at("x0"));
    require(x0.size() == p.n(), "x0 has wrong dimension");
    return p.omega().project(x0);
  }
  return p.omega().project(Vector::Ones(p.n()));
}

std::vector<InstanceSpec> corpus_specs(std::uint64_t seed) {
  std::vector<InstanceSpec> out;
  {
    InstanceSpec s;
    s.instance = "min_norm_system";
    s.n = 4;
    s.m = 2;
    s.seed = seed + 1;
    s.params = json{{"rho_weight", 1.0}, {"linear", true}, {"consistent", true}};
    out.push_back(std::move(s));
  }
  {
    InstanceSpec s;
    s.instance = "min_norm_system";
    s.n = 3;
    s.m = 2;
    s.seed = seed + 2;
    s.params = json{{"rho_weight", 0.5}, {"linear", false}, {"curvature", 0.3}};
    out.push_back(std::move(s));
  }
  {
    InstanceSpec s;
    s.instance = "l1_penalty_nlp";
    s.n = 2;
    s.m = 1;
    s.penalty = 10.0;
    s.seed = seed + 3;
    s.params = json{{"circle", true}};
    out.push_back(std::move(s));
  }
  {
    InstanceSpec s;
    s.instance = "l1_penalty_nlp";
    s.n = 4;
    s.m = 3;
    s.penalty = 2.0;
    s.seed = seed + 4;
    s.params = json{{"m_q", 2}, {"m_r", 1}, {"curvature", 0.2}};
    out.push_back(std::move(s));
  }
  {
    InstanceSpec s;
    s.instance = "sharp_lagrangian";
    s.n = 3;
    s.m = 2;
    s.penalty = 1.5;
    s.seed = seed + 5;
    out.push_back(std::move(s));
  }
  {
    InstanceSpec s;
    s.instance = "custom";
    s.n = 2;
    s.m = 2;
    s.penalty = 0.7;
    s.seed = seed + 6;
    s.params = json{{"phi", "huber"},
                    {"g", json{{"diag", {1.0, 2.0}}, {"h", {-0.3, 0.4}}}},
                    {"omega", "box"},
                    {"box_radius", 5.0}};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace proxmin
