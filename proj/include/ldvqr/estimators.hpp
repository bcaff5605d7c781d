#pragma once

#include "ldvqr/core.hpp"
#include "ldvqr/smoothing.hpp"

namespace ldvqr {

struct TobitFit {
  VectorXd beta;
  double sigma = 0;
  double loglik = 0;
  bool converged = false;
  Eigen::Index n_lower = 0;
  Eigen::Index n_upper = 0;
  Eigen::Index n_uncensored = 0;
};

struct ProbitFit {
  VectorXd beta;
  double loglik = 0;
  bool converged = false;
};

/// Gaussian censored maximum likelihood over (beta, log sigma). Observations
/// at or beyond a finite limit enter through the normal CDF; the rest through
/// the density. Reduces to OLS with sigma^2 = RSS/n when both limits are
/// infinite.
TobitFit tobit_fit(const Dataset& d, double c_L, double c_H);

/// Binary Gaussian-link maximum likelihood, log-CDF evaluated stably in the
/// tails. Starts from zero coefficients.
ProbitFit probit_fit(const Dataset& d);

// Smoothed objective values, exposed for tests and diagnostics. Both fill
// the analytic gradient when `grad` is non-null.

/// Mean smoothed check loss of y - clamp(x'b) at quantile tau.
double cqr_objective(const Dataset& d, double tau, double c_L, double c_H,
                     double h, const VectorXd& b, VectorXd* grad = nullptr);

/// Score objective maximized by bqr_fit, evaluated at b/||b||; invariant to
/// positive rescaling of b by construction.
double bqr_objective(const Dataset& d, double tau, double h, const VectorXd& b,
                     VectorXd* grad = nullptr);

/// Knobs shared by point fits and bootstrap refits.
struct FitControl {
  int restarts = 3;     // perturbed extra starts beyond the primary one
  bool polish = true;   // simplex pass from the quasi-Newton solution
  std::uint64_t seed = 0;
};

/// Censored quantile fit: minimizes the smoothed check loss of the smoothed-
/// clamped index, starting from b0.
CoefVector cqr_fit(const Dataset& d, double tau, double c_L, double c_H,
                   Bandwidth h, const VectorXd& b0, const FitControl& ctl = {});

/// Binary quantile fit on the unit sphere: maximizes the kernel-smoothed
/// score, evaluating at b/||b|| so scale drops out; returns a unit vector.
CoefVector bqr_fit(const Dataset& d, double tau, Bandwidth h, const VectorXd& b0,
                   const FitControl& ctl = {});

/// Plain smoothed quantile fit; identical to cqr_fit with infinite limits.
CoefVector sqr_fit(const Dataset& d, double tau, Bandwidth h, const VectorXd& b0,
                   const FitControl& ctl = {});

/// Point estimates for every quantile in the spec: scale estimate, bandwidth,
/// model-specific starting values, multi-start fits. No covariance.
FitResult fit_point_estimates(const Dataset& d, const ModelSpec& spec);

/// fit_point_estimates plus the joint pairs-bootstrap covariance and the
/// derived standard errors, z statistics, p values and confidence bounds.
FitResult fit_all(const Dataset& d, const ModelSpec& spec);

}  // namespace ldvqr
