#include "ldvqr/predict.hpp"

#include "ldvqr/smoothing.hpp"

#include <cmath>
#include <sstream>

namespace ldvqr {

namespace {

void check_design(const FitResult& fit, const MatrixXd& X) {
  if (X.cols() != fit.K()) throw data_error("design matrix has the wrong column count");
}

double default_pbw(const FitResult& fit, std::optional<double> pbw) {
  double h = pbw ? *pbw : (fit.spec.pbwidth ? *fit.spec.pbwidth : fit.bandwidth);
  if (!(h > 0)) throw data_error("prediction bandwidth must be positive");
  return h;
}

std::string tau_suffix(double tau) {
  std::ostringstream s;
  double p = tau * 100.0;
  if (std::abs(p - std::round(p)) < 1e-9) s << static_cast<long>(std::lround(p));
  else s << p;
  return s.str();
}

}  // namespace

const VectorXd& PredictionSet::col(const std::string& name) const {
  for (const auto& [n, v] : columns)
    if (n == name) return v;
  throw data_error("unknown prediction column: " + name);
}

bool PredictionSet::has(const std::string& name) const {
  for (const auto& [n, v] : columns)
    if (n == name) return true;
  return false;
}

VectorXd predict_censored_quantile(const FitResult& fit, const MatrixXd& X,
                                   double tau) {
  check_design(fit, X);
  const CoefVector& c = fit.at_tau(tau);
  VectorXd pred = X * c.beta;
  const double lo = fit.spec.c_L, hi = fit.spec.c_H;
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    pred[i] = std::min(std::max(pred[i], lo), hi);
  return pred;
}

CensoringProb censoring_probability(const FitResult& fit, const MatrixXd& X,
                                    std::optional<double> pbw) {
  check_design(fit, X);
  const Eigen::Index m = fit.n_taus();
  if (m < 2) throw data_error("censoring probability requires at least 2 quantiles");
  const double h = default_pbw(fit, pbw);
  const double cl = fit.spec.c_L, ch = fit.spec.c_H;
  const bool lo_fin = std::isfinite(cl), hi_fin = std::isfinite(ch);
  const Eigen::Index n = X.rows();

  CensoringProb out;
  out.lo = VectorXd::Zero(n);
  out.hi = VectorXd::Zero(n);
  out.lo_s = VectorXd::Zero(n);
  out.hi_s = VectorXd::Zero(n);
  for (const auto& c : fit.coefs) {
    const VectorXd idx = X * c.beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lo_fin) {
        out.lo[i] += idx[i] < cl ? 1.0 : 0.0;
        out.lo_s[i] += gauss_cdf((cl - idx[i]) / h);
      }
      if (hi_fin) {
        out.hi[i] += idx[i] > ch ? 1.0 : 0.0;
        out.hi_s[i] += gauss_cdf((idx[i] - ch) / h);
      }
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  out.lo *= inv_m;
  out.hi *= inv_m;
  out.lo_s *= inv_m;
  out.hi_s *= inv_m;
  out.total = out.lo + out.hi;
  out.total_s = out.lo_s + out.hi_s;
  return out;
}

ProbOne prob_one(const FitResult& fit, const MatrixXd& X, std::optional<double> pbw) {
  check_design(fit, X);
  if (fit.spec.kind != ModelKind::Binary)
    throw data_error("P(y=1|x) prediction requires a binary fit");
  const Eigen::Index m = fit.n_taus();
  if (m < 2) throw data_error("P(y=1|x) prediction requires at least 2 quantiles");
  const double h = default_pbw(fit, pbw);
  const Eigen::Index n = X.rows();

  ProbOne out;
  out.naive = VectorXd::Zero(n);
  out.smoothed = VectorXd::Zero(n);
  for (const auto& c : fit.coefs) {
    const VectorXd idx = X * c.beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      out.naive[i] += idx[i] > 0 ? 1.0 : 0.0;
      out.smoothed[i] += gauss_cdf(idx[i] / h);
    }
  }
  out.naive /= static_cast<double>(m);
  out.smoothed /= static_cast<double>(m);
  return out;
}

PredictionSet build_predictions(const FitResult& fit, const MatrixXd& X,
                                const std::string& qcen_prefix,
                                const std::string& pcen_prefix,
                                const std::string& p1_prefix,
                                std::optional<double> pbw) {
  PredictionSet out;
  out.m = static_cast<int>(fit.n_taus());
  out.pbw = default_pbw(fit, pbw);

  if (!qcen_prefix.empty()) {
    MatrixXd qcen(X.rows(), fit.n_taus());
    for (Eigen::Index m = 0; m < fit.n_taus(); ++m) {
      const double tau = fit.coefs[static_cast<std::size_t>(m)].tau;
      qcen.col(m) = predict_censored_quantile(fit, X, tau);
      out.columns.emplace_back(qcen_prefix + "_q" + tau_suffix(tau), qcen.col(m));
    }
    Eigen::Index crossings = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index m = 1; m < fit.n_taus(); ++m)
        if (qcen(i, m) < qcen(i, m - 1)) {
          ++crossings;
          break;
        }
    out.crossing_fraction =
        X.rows() > 0 ? static_cast<double>(crossings) / static_cast<double>(X.rows())
                     : 0.0;
  }

  if (!pcen_prefix.empty()) {
    CensoringProb p = censoring_probability(fit, X, pbw);
    out.columns.emplace_back(pcen_prefix, p.total);
    out.columns.emplace_back(pcen_prefix + "_s", p.total_s);
    out.columns.emplace_back(pcen_prefix + "_lo", p.lo);
    out.columns.emplace_back(pcen_prefix + "_lo_s", p.lo_s);
    out.columns.emplace_back(pcen_prefix + "_hi", p.hi);
    out.columns.emplace_back(pcen_prefix + "_hi_s", p.hi_s);
  }

  if (!p1_prefix.empty()) {
    ProbOne p = prob_one(fit, X, pbw);
    out.columns.emplace_back(p1_prefix, p.naive);
    out.columns.emplace_back(p1_prefix + "_s", p.smoothed);
  }
  return out;
}

}  // namespace ldvqr
