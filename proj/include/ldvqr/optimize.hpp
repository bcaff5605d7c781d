#pragma once

#include "ldvqr/core.hpp"

#include <functional>

namespace ldvqr {

enum class OptimMethod { QuasiNewton, Simplex };

struct OptimResult {
  VectorXd x_opt;
  double f_opt = kNaN;
  int iterations = 0;
  bool converged = false;
  OptimMethod method = OptimMethod::QuasiNewton;
  std::string diagnostic;
};

/// Objective with optional gradient: returns f(x); fills *grad when non-null.
using GradObjective = std::function<double(const VectorXd&, VectorXd*)>;
using Objective = std::function<double(const VectorXd&)>;

/// BFGS with backtracking line search (Armijo 1e-4, halving, max 40 cuts).
/// Stops when the gradient max-norm falls below tol_g. Accepted steps never
/// increase f. Non-finite f or gradient yields converged=false.
OptimResult minimize_qn(const GradObjective& f, const VectorXd& x0,
                        double tol_g = 1e-8, int max_iter = 500);

/// Nelder-Mead with coefficients (1, 2, 0.5, 0.5). Initial simplex offsets
/// each coordinate of x0 by `scale`. Converges when the simplex diameter
/// drops below tol_x; otherwise returns the best point seen.
OptimResult minimize_simplex(const Objective& f, const VectorXd& x0, double scale,
                             double tol_x = 1e-8, int max_iter = 2000);

/// Central finite differences, component-wise.
VectorXd fd_gradient(const Objective& f, const VectorXd& x, double step = 1e-6);

}  // namespace ldvqr
