#pragma once

#include <functional>
#include <optional>

#include "proxmin/problem.hpp"
#include "proxmin/subproblem.hpp"

// Test-only oracles, independent of the solver paths they check: multilevel
// dense-grid minimization, finite differences, and a from-scratch model
// evaluator for the regularized linearized subproblems.
namespace proxmin::oracle {

using ScalarFn = std::function<double(const Vector&)>;
using FeasFn = std::function<bool(const Vector&)>;

// Dense-grid minimization with window refinement around the incumbent:
// each level shrinks the box to +-2 cells around the grid argmin. Intended
// for n <= 2 and unimodal objectives.
Vector grid_minimize(const ScalarFn& fn, Vector lo, Vector hi,
                     int pts_per_dim = 61, int levels = 7,
                     const FeasFn& feasible = nullptr);

double grid_minimize_1d(const std::function<double(double)>& fn, double lo,
                        double hi, int pts = 601, int levels = 6);

// Model of P1/P2 at (x, rho) evaluated from the raw problem pieces.
double model_value(const CompositeProblem& p, SubproblemVariant variant,
                   const Vector& x, double rho, const Vector& d);

Vector fd_gradient(const ScalarFn& fn, const Vector& x, double h = 1e-6);
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x,
                   double h = 1e-6);

}  // namespace proxmin::oracle
