#include "ldvqr/simulate.hpp"

#include "ldvqr/estimators.hpp"
#include "ldvqr/parallel.hpp"
#include "ldvqr/rng.hpp"
#include "ldvqr/smoothing.hpp"

#include <cmath>
#include <sstream>

namespace ldvqr {

namespace {

Dataset two_column_dataset(const VectorXd& y, const VectorXd& x) {
  Dataset d;
  d.n = y.size();
  d.K = 2;
  d.y = y;
  d.X.resize(d.n, 2);
  d.X.col(0) = x;
  d.X.col(1).setOnes();
  d.names = {"x", "_cons"};
  d.row_index.resize(static_cast<std::size_t>(d.n));
  for (Eigen::Index i = 0; i < d.n; ++i)
    d.row_index[static_cast<std::size_t>(i)] = i;
  return d;
}

}  // namespace

Dataset DgpOutput::latent_dataset() const { return two_column_dataset(y_latent, x); }
Dataset DgpOutput::observed_dataset() const { return two_column_dataset(y_obs, x); }

DgpOutput dgp_censored(std::size_t n, bool heter, std::uint64_t seed) {
  if (n < 1) throw data_error("sample size must be positive");
  Rng rng(seed);
  DgpOutput out;
  out.dgp_id = heter ? "censored-het" : "censored-hom";
  out.seed = seed;
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  out.x.resize(ni);
  out.y_latent.resize(ni);
  out.y_obs.resize(ni);
  for (Eigen::Index i = 0; i < ni; ++i) out.x[i] = rng.uniform();
  for (Eigen::Index i = 0; i < ni; ++i) {
    const double scale = heter ? (1.0 + out.x[i]) / 3.0 : 1.0 / 3.0;
    out.y_latent[i] = out.x[i] + scale * rng.normal();
    out.y_obs[i] = std::min(std::max(out.y_latent[i], 0.0), 1.0);
  }
  return out;
}

DgpOutput dgp_censored_pooled(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw data_error("pooled sample needs at least 2 rows");
  const std::size_t half = n / 2;
  DgpOutput hom = dgp_censored(half, false, seed);
  DgpOutput het = dgp_censored(n - half, true, seed + 1);
  DgpOutput out;
  out.dgp_id = "censored-pooled";
  out.seed = seed;
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  out.x.resize(ni);
  out.y_latent.resize(ni);
  out.y_obs.resize(ni);
  out.x << hom.x, het.x;
  out.y_latent << hom.y_latent, het.y_latent;
  out.y_obs << hom.y_obs, het.y_obs;
  return out;
}

DgpOutput dgp_binary(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw data_error("sample size must be positive");
  Rng rng(seed);
  DgpOutput out;
  out.dgp_id = "binary";
  out.seed = seed;
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  out.x.resize(ni);
  out.y_latent.resize(ni);
  out.y_obs.resize(ni);
  for (Eigen::Index i = 0; i < ni; ++i) out.x[i] = 10.0 * rng.uniform();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < ni; ++i) {
    out.y_latent[i] = -2.5 + out.x[i] + out.x[i] * (rng.chisq1() - 1.0) * inv_sqrt2;
    out.y_obs[i] = out.y_latent[i] > 0.0 ? 1.0 : 0.0;
  }
  return out;
}

std::pair<double, double> true_coef_censored(double tau, bool heter) {
  if (!(tau > 0 && tau < 1)) throw data_error("tau outside (0,1)");
  const double z = gauss_quantile(tau);
  return {z / 3.0, heter ? 1.0 + z / 3.0 : 1.0};
}

std::pair<double, double> true_coef_binary(double tau) {
  if (!(tau > 0 && tau < 1)) throw data_error("tau outside (0,1)");
  const double zq = gauss_quantile((1.0 + tau) / 2.0);
  const double q = zq * zq;  // chi-squared(1) quantile
  const double s = 1.0 + (q - 1.0) / std::sqrt(2.0);
  const double norm = std::sqrt(s * s + 6.25);
  return {s / norm, -2.5 / norm};
}

double true_prob_one(double x) {
  if (x < 0) throw data_error("x must be nonnegative");
  if (x == 0) return 0.0;  // y = -2.5 exactly
  const double threshold = 1.0 + std::sqrt(2.0) * (2.5 - x) / x;
  if (threshold <= 0) return 1.0;
  return 2.0 * (1.0 - gauss_cdf(std::sqrt(threshold)));
}

namespace {

struct CellAccumulator {
  double truth = kNaN;
  std::vector<double> estimates;
};

// Slope on x from one fit of a given estimator on one simulated sample.
double slope_estimate(const DgpOutput& sample, bool binary, bool corrected,
                      double tau, std::uint64_t seed) {
  Dataset d = sample.observed_dataset();
  ModelSpec spec;
  spec.taus = {tau};
  spec.seed = seed;
  if (binary) {
    spec.kind = corrected ? ModelKind::Binary : ModelKind::Plain;
  } else if (corrected) {
    spec.kind = ModelKind::Censored;
    spec.c_L = 0.0;
    spec.c_H = 1.0;
  } else {
    spec.kind = ModelKind::Plain;
  }
  FitResult fit = fit_point_estimates(d, spec);
  VectorXd beta = fit.coefs.front().beta;
  if (binary) beta /= beta.norm();  // compare on the unit sphere
  return beta[0];
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
  if (config.reps < 1) throw usage_error("benchmark needs at least one repetition");
  if (config.taus.empty()) throw usage_error("benchmark needs at least one quantile");

  std::vector<BenchmarkRow> rows;
  for (std::size_t g = 0; g < config.dgps.size(); ++g) {
    const std::string& dgp = config.dgps[g];
    const bool binary = dgp == "binary";
    if (!binary && dgp != "censored-hom" && dgp != "censored-het" &&
        dgp != "censored-pooled")
      throw usage_error("unknown dgp: " + dgp);

    const std::size_t cells = config.taus.size() * 2;
    std::vector<std::vector<double>> estimates(
        cells, std::vector<double>(static_cast<std::size_t>(config.reps), kNaN));

    parallel_for(static_cast<std::size_t>(config.reps), [&](std::size_t rep) {
      const std::uint64_t rep_seed =
          Rng::stream(config.seed, g + 1, rep).word();
      DgpOutput sample =
          binary ? dgp_binary(config.n, rep_seed)
          : dgp == "censored-pooled"
              ? dgp_censored_pooled(config.n, rep_seed)
              : dgp_censored(config.n, dgp == "censored-het", rep_seed);
      for (std::size_t t = 0; t < config.taus.size(); ++t)
        for (int corrected = 0; corrected < 2; ++corrected)
          estimates[t * 2 + static_cast<std::size_t>(corrected)][rep] =
              slope_estimate(sample, binary, corrected != 0, config.taus[t],
                             rep_seed + 17 * static_cast<std::uint64_t>(corrected));
    });

    for (std::size_t t = 0; t < config.taus.size(); ++t) {
      const double tau = config.taus[t];
      double truth = kNaN;
      if (binary) truth = true_coef_binary(tau).first;
      else if (dgp == "censored-hom") truth = true_coef_censored(tau, false).second;
      else if (dgp == "censored-het") truth = true_coef_censored(tau, true).second;

      for (int corrected = 0; corrected < 2; ++corrected) {
        const auto& est = estimates[t * 2 + static_cast<std::size_t>(corrected)];
        double mean = 0;
        for (double e : est) mean += e;
        mean /= static_cast<double>(est.size());
        double var = 0;
        for (double e : est) var += (e - mean) * (e - mean);
        var = est.size() > 1 ? var / static_cast<double>(est.size() - 1) : 0.0;

        BenchmarkRow row;
        row.dgp = dgp;
        row.tau = tau;
        row.estimator = corrected ? "corrected" : "naive";
        row.truth = truth;
        row.mean_estimate = mean;
        row.bias = mean - truth;
        row.mc_se = std::sqrt(var / static_cast<double>(est.size()));
        row.n = config.n;
        row.reps = config.reps;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "dgp,tau,estimator,truth,mean_estimate,bias,mc_se,n,reps\n";
  out.precision(10);
  for (const auto& r : rows) {
    out << r.dgp << ',' << r.tau << ',' << r.estimator << ',';
    if (std::isfinite(r.truth)) out << r.truth;
    out << ',' << r.mean_estimate << ',';
    if (std::isfinite(r.bias)) out << r.bias;
    out << ',' << r.mc_se << ',' << r.n << ',' << r.reps << '\n';
  }
  return out.str();
}

}  // namespace ldvqr
