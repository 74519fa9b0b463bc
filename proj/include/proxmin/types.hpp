#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace proxmin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Bad arguments: dimension mismatches, out-of-range parameters, malformed configs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A constructed object would violate one of the standing assumptions
// (e.g. an outer function without a global Lipschitz constant).
class AssumptionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite value met while evaluating a problem function; carries the point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Vector at)
      : std::runtime_error(what), at_(std::move(at)) {}
  const Vector& at() const { return at_; }

 private:
  Vector at_;
};

// Inner solver ran out of iterations before certifying the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, Vector best, double gap)
      : std::runtime_error(what), best_(std::move(best)), gap_(gap) {}
  const Vector& best_iterate() const { return best_; }
  double certified_gap() const { return gap_; }

 private:
  Vector best_;
  double gap_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

constexpr double kDefaultInnerTol = 1e-8;

}  // namespace proxmin
