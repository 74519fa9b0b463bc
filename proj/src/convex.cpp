#include "proxmin/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace proxmin {

namespace {

double soft(double v, double thr) {
  if (v > thr) return v - thr;
  if (v < -thr) return v + thr;
  return 0.0;
}

double hinge_prox_scalar(double v, double ct) {
  // argmin_w c*max(0,w) + 1/(2t)(w - v)^2 with ct = c*t
  if (v <= 0.0) return v;
  if (v <= ct) return 0.0;
  return v - ct;
}

double huber_scalar(double t, double T) {
  const double a = std::abs(t);
  return a <= T ? 0.5 * t * t : T * a - 0.5 * T * T;
}

double huber_prox_scalar(double v, double T, double t) {
  // Quadratic branch fixed point v/(1+t) while it stays inside [-T, T].
  if (std::abs(v) <= T * (1.0 + t)) return v / (1.0 + t);
  return v - t * T * (v > 0 ? 1.0 : -1.0);
}

}  // namespace

OuterConvex OuterConvex::zero() { return OuterConvex(Kind::zero, 0.0, 0); }

OuterConvex phi_l1(double c) {
  require(c > 0, "phi_l1: penalty must be positive");
  return OuterConvex(OuterConvex::Kind::l1, c, 0);
}

OuterConvex phi_l2(double c) {
  require(c > 0, "phi_l2: penalty must be positive");
  return OuterConvex(OuterConvex::Kind::l2, c, 0);
}

OuterConvex phi_huber(double T) {
  require(T > 0, "phi_huber: threshold must be positive");
  return OuterConvex(OuterConvex::Kind::huber, T, 0);
}

OuterConvex phi_hinge(double c) {
  require(c > 0, "phi_hinge: penalty must be positive");
  return OuterConvex(OuterConvex::Kind::hinge, c, 0);
}

OuterConvex phi_l1_hinge(double c, int l1_dim) {
  require(c > 0, "phi_l1_hinge: penalty must be positive");
  require(l1_dim >= 0, "phi_l1_hinge: l1 block size must be nonnegative");
  return OuterConvex(OuterConvex::Kind::l1_hinge, c, l1_dim);
}

OuterConvex phi_from_name(const std::string& name, double c, int l1_dim) {
  if (name == "zero") return OuterConvex::zero();
  if (name == "l1") return phi_l1(c);
  if (name == "l2") return phi_l2(c);
  if (name == "huber") return phi_huber(c);
  if (name == "hinge") return phi_hinge(c);
  if (name == "hinge_l1" || name == "l1_hinge") return phi_l1_hinge(c, l1_dim);
  throw InputError("unknown outer function: " + name);
}

std::string OuterConvex::name() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::l1: return "l1";
    case Kind::l2: return "l2";
    case Kind::huber: return "huber";
    case Kind::hinge: return "hinge";
    case Kind::l1_hinge: return "hinge_l1";
  }
  return "?";
}

double OuterConvex::value(const Vector& u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::l1:
      return c_ * u.lpNorm<1>();
    case Kind::l2:
      return c_ * u.norm();
    case Kind::huber: {
      double s = 0;
      for (int i = 0; i < u.size(); ++i) s += huber_scalar(u[i], c_);
      return s;
    }
    case Kind::hinge:
      return c_ * u.cwiseMax(0.0).sum();
    case Kind::l1_hinge: {
      double s = 0;
      for (int i = 0; i < u.size(); ++i)
        s += (i < split_) ? std::abs(u[i]) : std::max(0.0, u[i]);
      return c_ * s;
    }
  }
  return 0.0;
}

Vector OuterConvex::subgradient(const Vector& u) const {
  Vector g = Vector::Zero(u.size());
  switch (kind_) {
    case Kind::zero:
      break;
    case Kind::l1:
      for (int i = 0; i < u.size(); ++i) g[i] = u[i] > 0 ? c_ : (u[i] < 0 ? -c_ : 0.0);
      break;
    case Kind::l2: {
      const double n = u.norm();
      if (n > 0) g = (c_ / n) * u;
      break;
    }
    case Kind::huber:
      for (int i = 0; i < u.size(); ++i)
        g[i] = std::abs(u[i]) <= c_ ? u[i] : c_ * (u[i] > 0 ? 1.0 : -1.0);
      break;
    case Kind::hinge:
      for (int i = 0; i < u.size(); ++i) g[i] = u[i] > 0 ? c_ : 0.0;
      break;
    case Kind::l1_hinge:
      for (int i = 0; i < u.size(); ++i) {
        if (i < split_)
          g[i] = u[i] > 0 ? c_ : (u[i] < 0 ? -c_ : 0.0);
        else
          g[i] = u[i] > 0 ? c_ : 0.0;
      }
      break;
  }
  return g;
}

Vector OuterConvex::prox(const Vector& u, double t) const {
  require(t > 0, "prox: parameter t must be positive");
  Vector z(u.size());
  switch (kind_) {
    case Kind::zero:
      return u;
    case Kind::l1:
      for (int i = 0; i < u.size(); ++i) z[i] = soft(u[i], c_ * t);
      return z;
    case Kind::l2: {
      const double n = u.norm();
      if (n <= c_ * t) return Vector::Zero(u.size());
      return (1.0 - c_ * t / n) * u;
    }
    case Kind::huber:
      for (int i = 0; i < u.size(); ++i) z[i] = huber_prox_scalar(u[i], c_, t);
      return z;
    case Kind::hinge:
      for (int i = 0; i < u.size(); ++i) z[i] = hinge_prox_scalar(u[i], c_ * t);
      return z;
    case Kind::l1_hinge:
      for (int i = 0; i < u.size(); ++i)
        z[i] = (i < split_) ? soft(u[i], c_ * t) : hinge_prox_scalar(u[i], c_ * t);
      return z;
  }
  return u;
}

double OuterConvex::lipschitz(int m) const {
  const double rm = std::sqrt(static_cast<double>(std::max(m, 1)));
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::l1: return c_ * rm;
    case Kind::l2: return c_;
    case Kind::huber: return c_ * rm;
    case Kind::hinge: return c_ * rm;
    // Conservative Euclidean constant for the mixed l1/hinge penalty.
    case Kind::l1_hinge: return c_ * rm;
  }
  return 0.0;
}

double OuterConvex::conj_value(const Vector& xi) const {
  // Value on dom(phi*); callers pass conj_project output.
  if (kind_ == Kind::huber) return 0.5 * xi.squaredNorm();
  return 0.0;
}

Vector OuterConvex::conj_project(const Vector& xi) const {
  Vector p = xi;
  switch (kind_) {
    case Kind::zero:
      p.setZero();
      break;
    case Kind::l1:
    case Kind::huber:
      // box [-c, c] (Huber threshold plays the role of c)
      for (int i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], -c_, c_);
      break;
    case Kind::l2: {
      const double n = p.norm();
      if (n > c_) p *= c_ / n;
      break;
    }
    case Kind::hinge:
      for (int i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], 0.0, c_);
      break;
    case Kind::l1_hinge:
      for (int i = 0; i < p.size(); ++i)
        p[i] = (i < split_) ? std::clamp(p[i], -c_, c_) : std::clamp(p[i], 0.0, c_);
      break;
  }
  return p;
}

Vector OuterConvex::prox_conj(const Vector& v, double t) const {
  // Moreau: prox_{t phi*}(v) = v - t prox_{phi/t}(v/t).
  return v - t * prox(v / t, 1.0 / t);
}

std::optional<double> OuterConvex::sharp_modulus() const {
  switch (kind_) {
    case Kind::l1:
    case Kind::l2:
    case Kind::hinge:
      return c_;
    default:
      return std::nullopt;
  }
}

double OuterConvex::dist_to_sharp_set(const Vector& u) const {
  switch (kind_) {
    case Kind::l1:
    case Kind::l2:
      return u.norm();  // S* = {0}
    case Kind::hinge:
      return u.cwiseMax(0.0).norm();  // S* = nonpositive orthant
    default:
      return 0.0;
  }
}

// ---------------------------------------------------------------------------

ConvexSet ConvexSet::whole_space() { return ConvexSet(); }

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  require(lo.size() == hi.size(), "box: bound dimensions differ");
  require((lo.array() <= hi.array()).all(), "box: lower bound exceeds upper bound");
  ConvexSet s;
  s.kind_ = Kind::box;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require(radius > 0, "ball: radius must be positive");
  ConvexSet s;
  s.kind_ = Kind::ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::halfspace(Vector a, double b) {
  require(a.norm() > 0, "halfspace: zero normal");
  ConvexSet s;
  s.kind_ = Kind::halfspace;
  s.a_ = std::move(a);
  s.b_ = b;
  return s;
}

ConvexSet ConvexSet::simplex() {
  ConvexSet s;
  s.kind_ = Kind::simplex;
  return s;
}

std::string ConvexSet::name() const {
  switch (kind_) {
    case Kind::whole_space: return "rn";
    case Kind::box: return "box";
    case Kind::ball: return "ball";
    case Kind::halfspace: return "halfspace";
    case Kind::simplex: return "simplex";
  }
  return "?";
}

Vector project_onto_simplex(const Vector& y) {
  // Sort-based projection onto { z >= 0, sum z = 1 }.
  const int n = static_cast<int>(y.size());
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssum = 0;
  double tau = 0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cssum += u[i];
    const double t = (cssum - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      tau = t;
    }
  }
  (void)rho;
  return (y.array() - tau).max(0.0).matrix();
}

Vector ConvexSet::project(const Vector& y) const {
  switch (kind_) {
    case Kind::whole_space:
      return y;
    case Kind::box:
      require(y.size() == lo_.size(), "project: dimension mismatch");
      return y.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::ball: {
      require(y.size() == center_.size(), "project: dimension mismatch");
      Vector d = y - center_;
      const double n = d.norm();
      if (n <= radius_) return y;
      return center_ + (radius_ / n) * d;
    }
    case Kind::halfspace: {
      require(y.size() == a_.size(), "project: dimension mismatch");
      const double viol = a_.dot(y) - b_;
      if (viol <= 0) return y;
      return y - (viol / a_.squaredNorm()) * a_;
    }
    case Kind::simplex:
      return project_onto_simplex(y);
  }
  return y;
}

bool ConvexSet::contains(const Vector& y, double tol) const {
  return (y - project(y)).norm() <= tol;
}

double ConvexSet::support(const Vector& lambda) const {
  switch (kind_) {
    case Kind::whole_space:
      return 0.0;  // callers pass support_point output, which is 0 here
    case Kind::box: {
      double s = 0;
      for (int i = 0; i < lambda.size(); ++i)
        s += lambda[i] > 0 ? hi_[i] * lambda[i] : lo_[i] * lambda[i];
      return s;
    }
    case Kind::ball:
      return center_.dot(lambda) + radius_ * lambda.norm();
    case Kind::halfspace: {
      const double t = std::max(0.0, a_.dot(lambda) / a_.squaredNorm());
      return t * b_;
    }
    case Kind::simplex:
      return lambda.maxCoeff();
  }
  return 0.0;
}

Vector ConvexSet::support_point(const Vector& lambda) const {
  switch (kind_) {
    case Kind::whole_space:
      return Vector::Zero(lambda.size());
    case Kind::halfspace: {
      const double t = std::max(0.0, a_.dot(lambda) / a_.squaredNorm());
      return t * a_;
    }
    default:
      return lambda;
  }
}

}  // namespace proxmin
