#pragma once

#include "ldvqr/core.hpp"

namespace ldvqr {

/// One simulated sample: covariate, latent response, observed response
/// (censored to [0,1] or binarized, depending on the generator).
struct DgpOutput {
  VectorXd x;
  VectorXd y_latent;
  VectorXd y_obs;
  std::string dgp_id;
  std::uint64_t seed = 0;

  /// y ~ x + intercept for the chosen response.
  Dataset latent_dataset() const;
  Dataset observed_dataset() const;
};

/// x ~ U(0,1); y = x + e/3 (heter=false) or y = x + (1+x)e/3 (heter=true)
/// with standard normal e; observed response censored to [0,1].
DgpOutput dgp_censored(std::size_t n, bool heter, std::uint64_t seed);

/// First half homoscedastic, second half heteroscedastic; the pooled sample
/// used for the naive-versus-corrected bias comparison.
DgpOutput dgp_censored_pooled(std::size_t n, std::uint64_t seed);

/// x ~ U(0,10); y = -2.5 + x + x(chi2_1 - 1)/sqrt(2); observed y_b = 1{y>0}.
DgpOutput dgp_binary(std::size_t n, std::uint64_t seed);

/// Analytic quantile line of the censored DGP latent response:
/// (intercept, slope) = (z_tau/3, 1) or (z_tau/3, 1 + z_tau/3).
std::pair<double, double> true_coef_censored(double tau, bool heter);

/// Analytic unit-norm (slope, intercept) of the binary DGP latent quantile.
std::pair<double, double> true_coef_binary(double tau);

/// P(y=1|x) of the binary DGP via the chi-squared(1) survival function.
double true_prob_one(double x);

struct BenchmarkConfig {
  std::size_t n = 2000;
  int reps = 10;  // Monte Carlo repetitions
  std::vector<double> taus{0.2, 0.5, 0.8};
  std::uint64_t seed = 0;
  // any of: censored-hom, censored-het, censored-pooled, binary
  std::vector<std::string> dgps{"censored-hom", "censored-het", "censored-pooled",
                                "binary"};
};

/// One row per (dgp, tau, estimator); the reported coefficient is the slope
/// on x (unit-normalized for the binary DGP). truth/bias are NaN for the
/// pooled sample, which has no linear oracle.
struct BenchmarkRow {
  std::string dgp;
  double tau = 0;
  std::string estimator;  // "naive" or "corrected"
  double truth = 0;
  double mean_estimate = 0;
  double bias = 0;
  double mc_se = 0;
  std::size_t n = 0;
  int reps = 0;
};

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace ldvqr
