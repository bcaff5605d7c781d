#pragma once

#include "ldvqr/core.hpp"

namespace ldvqr {

struct WaldResult {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
  std::vector<std::string> constraints;
  bool rank_deficient = false;  // pseudo-inverse used, df reduced
};

struct BootstrapRecord {
  MatrixXd replicates;  // one row per completed replicate, stacked tau-major
  int failures = 0;
  std::uint64_t master_seed = 0;
};

struct BootstrapOut {
  MatrixXd V;
  BootstrapRecord record;
};

/// Pairs bootstrap: resamples rows with replacement and refits every quantile
/// on the same resample, so the covariance spans quantiles jointly. Replicate
/// streams are indexed by (seed, replicate, attempt); failed replicates are
/// redrawn up to 5 times, then excluded. More than 20% exclusions is an error.
BootstrapOut bootstrap(const Dataset& d, const ModelSpec& spec,
                       const FitResult& point_fit);

/// W = (R theta - r)' (R V R')^{-1} (R theta - r), chi-squared p-value.
/// A numerically singular R V R' falls back to the pseudo-inverse with df
/// reduced to the numerical rank.
WaldResult wald_test(const VectorXd& theta, const MatrixXd& V, const MatrixXd& R,
                     const VectorXd& r, std::vector<std::string> constraints = {});

/// Equality of a covariate's coefficient across all fitted quantiles
/// (covariate = "ALL" tests every non-intercept column jointly).
WaldResult homogeneity_test(const FitResult& fit, const std::string& covariate);

enum class SymmetryMode { PerDelta, Averaged };

/// Tests 0.5*beta(0.5-delta) + 0.5*beta(0.5+delta) - beta(0.5) = 0.
/// PerDelta stacks K constraints per delta; Averaged first averages the
/// constraint across deltas, leaving K constraints.
WaldResult symmetry_test(const FitResult& fit, const std::vector<double>& deltas,
                         SymmetryMode mode);

/// Upper tail of the chi-squared distribution.
double chisq_sf(double x, int df);

}  // namespace ldvqr
