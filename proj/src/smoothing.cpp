#include "ldvqr/smoothing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldvqr {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
}  // namespace

double gauss_pdf(double v) { return kInvSqrt2Pi * std::exp(-0.5 * v * v); }

double gauss_cdf(double v) {
  if (std::isnan(v)) return v;
  return 0.5 * std::erfc(-v / kSqrt2);
}

double gauss_logcdf(double v) {
  if (v > -37.0) {
    double c = gauss_cdf(v);
    if (c > 1e-300) return std::log(c);
  }
  // Asymptotic expansion of the Mills ratio for the far left tail.
  const double v2 = v * v;
  return -0.5 * v2 - kLogSqrt2Pi - std::log(-v) +
         std::log1p(-1.0 / v2 + 3.0 / (v2 * v2));
}

double gauss_invmills(double v) {
  if (v < -37.0) {
    const double v2 = v * v;
    return -v / (1.0 - 1.0 / v2 + 3.0 / (v2 * v2));
  }
  return gauss_pdf(v) / gauss_cdf(v);
}

double gauss_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("gauss_quantile: p outside [0,1]");
  }
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against gauss_cdf.
  double e = gauss_cdf(x) - p;
  double u = e / gauss_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

SmoothedMax smoothed_max_with_deriv(double t, double h) {
  const double z = t / h;
  // Outside ~38 sigma the convolution equals max(t,0) to full precision.
  if (z > 38.0) return {t, 1.0};
  if (z < -38.0) return {0.0, 0.0};
  const double cdf = gauss_cdf(z);
  return {t * cdf + h * gauss_pdf(z), cdf};
}

double smoothed_max(double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_max: h must be positive");
  return smoothed_max_with_deriv(t, h).value;
}

double smoothed_clamp(double u, double c_L, double c_H, double h) {
  if (!(c_L < c_H)) throw std::invalid_argument("smoothed_clamp: c_L >= c_H");
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_clamp: h must be positive");
  const bool lo = std::isfinite(c_L), hi = std::isfinite(c_H);
  if (lo && hi) return c_L + smoothed_max(u - c_L, h) - smoothed_max(u - c_H, h);
  if (lo) return c_L + smoothed_max(u - c_L, h);
  if (hi) return u - smoothed_max(u - c_H, h);
  return u;
}

double smoothed_clamp_deriv(double u, double c_L, double c_H, double h) {
  if (!(c_L < c_H)) throw std::invalid_argument("smoothed_clamp: c_L >= c_H");
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_clamp: h must be positive");
  double d = 1.0;
  if (std::isfinite(c_L)) d -= gauss_cdf(-(u - c_L) / h);
  if (std::isfinite(c_H)) d -= gauss_cdf((u - c_H) / h);
  return d;
}

double smoothed_check(double u, double tau, double h) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("smoothed_check: tau outside (0,1)");
  return tau * u + smoothed_max(-u, h);
}

double smoothed_check_deriv(double u, double tau, double h) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("smoothed_check: tau outside (0,1)");
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_check: h must be positive");
  return tau - gauss_cdf(-u / h);
}

Bandwidth bandwidth_rule(double sigma_hat, std::size_t n) {
  if (!(sigma_hat > 0.0))
    throw std::invalid_argument("bandwidth_rule: sigma_hat must be positive");
  if (n < 1) throw std::invalid_argument("bandwidth_rule: n must be positive");
  return Bandwidth{0.9 * sigma_hat * std::pow(static_cast<double>(n), -0.2)};
}

}  // namespace ldvqr
