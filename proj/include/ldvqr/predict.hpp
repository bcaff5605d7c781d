#pragma once

#include "ldvqr/core.hpp"

namespace ldvqr {

/// Per-observation prediction columns plus the grid size, smoothing scale and
/// the quantile-crossing diagnostic (reported, never corrected).
struct PredictionSet {
  std::vector<std::pair<std::string, VectorXd>> columns;
  int m = 0;
  double pbw = 0;
  double crossing_fraction = 0;

  const VectorXd& col(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// Hard-clamped point prediction min{max[x'beta(tau), c_L], c_H}.
VectorXd predict_censored_quantile(const FitResult& fit, const MatrixXd& X,
                                   double tau);

struct CensoringProb {
  VectorXd lo, hi, total;        // indicator average over the fitted grid
  VectorXd lo_s, hi_s, total_s;  // kernel-smoothed versions
};

/// Probability of landing on either censoring limit, averaged over the fitted
/// quantile grid; infinite limits contribute zero.
CensoringProb censoring_probability(const FitResult& fit, const MatrixXd& X,
                                    std::optional<double> pbw = {});

struct ProbOne {
  VectorXd naive, smoothed;
};

/// P(y=1|x) for a binary fit, averaged over the fitted quantile grid.
ProbOne prob_one(const FitResult& fit, const MatrixXd& X,
                 std::optional<double> pbw = {});

/// Assembles the requested prediction columns under the output naming scheme:
/// qcen prefix p -> p_q{100 tau}; pcen prefix p -> p, p_s, p_lo, p_lo_s,
/// p_hi, p_hi_s; p1 prefix p -> p, p_s.
PredictionSet build_predictions(const FitResult& fit, const MatrixXd& X,
                                const std::string& qcen_prefix,
                                const std::string& pcen_prefix,
                                const std::string& p1_prefix,
                                std::optional<double> pbw = {});

}  // namespace ldvqr
