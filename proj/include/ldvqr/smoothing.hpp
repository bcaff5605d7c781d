#pragma once

#include <cstddef>

namespace ldvqr {

/// Smoothing scale. Units follow the smoothed quantity: the index x'b for
/// binary fits, the response for censored and plain fits.
struct Bandwidth {
  double h = 1.0;
};

// ---- Gaussian kernel ----

/// Standard normal density.
double gauss_pdf(double v);

/// Standard normal CDF via the complementary error function. Absolute error
/// below 1e-12 over the whole line, including deep tails.
double gauss_cdf(double v);

/// log Phi(v), stable for v down to about -1e9 (asymptotic expansion past the
/// erfc underflow point).
double gauss_logcdf(double v);

/// Inverse Mills ratio pdf/cdf, stable in the far left tail.
double gauss_invmills(double v);

/// Standard normal quantile. Rational approximation polished by one Halley
/// step on gauss_cdf, good to ~1e-15 in the central range.
double gauss_quantile(double p);

// ---- Smoothed primitives ----
// All are Gaussian convolutions of the corresponding kinked function and
// recover it pointwise as h -> 0.

/// Convolution of max(t,0) with a Gaussian of scale h:
///   S(t;h) = t*Phi(t/h) + h*phi(t/h),  S'(t;h) = Phi(t/h).
double smoothed_max(double t, double h);

/// S(t;h) and S'(t;h) from a single kernel evaluation; the estimator
/// objectives are built on this.
struct SmoothedMax {
  double value;
  double deriv;
};
SmoothedMax smoothed_max_with_deriv(double t, double h);

/// Smoothed min[max(u,c_L),c_H]. Infinite limits drop their term, so a
/// one-sided limit smooths only that side and both-infinite is the identity.
double smoothed_clamp(double u, double c_L, double c_H, double h);

/// d/du of smoothed_clamp: Phi((u-c_L)/h) - Phi((u-c_H)/h), in (0,1].
double smoothed_clamp_deriv(double u, double c_L, double c_H, double h);

/// Smoothed check function, using rho_tau(u) = tau*u + max(-u,0):
///   rho~_tau(u) = tau*u + S(-u;h).
double smoothed_check(double u, double tau, double h);

/// d/du of smoothed_check: tau - Phi(-u/h).
double smoothed_check_deriv(double u, double tau, double h);

/// h = 0.9 * sigma_hat * n^(-1/5).
Bandwidth bandwidth_rule(double sigma_hat, std::size_t n);

}  // namespace ldvqr
