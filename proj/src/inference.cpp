#include "ldvqr/inference.hpp"

#include "ldvqr/estimators.hpp"
#include "ldvqr/parallel.hpp"
#include "ldvqr/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <sstream>

namespace ldvqr {

double chisq_sf(double x, int df) {
  if (df <= 0) return x > 0 ? 0.0 : 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, x)));
}

namespace {

Dataset resample_rows(const Dataset& d, Rng& rng) {
  Dataset out;
  out.n = d.n;
  out.K = d.K;
  out.names = d.names;
  out.y.resize(d.n);
  out.X.resize(d.n, d.K);
  for (Eigen::Index i = 0; i < d.n; ++i) {
    const auto k = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d.n)));
    out.y[i] = d.y[k];
    out.X.row(i) = d.X.row(k);
  }
  return out;
}

// Refit every quantile on one resample, warm-started at the point estimates.
bool refit_stacked(const Dataset& sample, const ModelSpec& spec,
                   const FitResult& point_fit, const Bandwidth& bw,
                   std::uint64_t fit_seed, VectorXd& row) {
  const Eigen::Index K = point_fit.K();
  FitControl ctl;
  ctl.restarts = 0;
  ctl.polish = false;
  ctl.seed = fit_seed;
  for (std::size_t m = 0; m < spec.taus.size(); ++m) {
    const double tau = spec.taus[m];
    const VectorXd& start = point_fit.coefs[m].beta;
    CoefVector c;
    try {
      c = spec.kind == ModelKind::Binary
              ? bqr_fit(sample, tau, bw, start, ctl)
              : cqr_fit(sample, tau, spec.c_L, spec.c_H, bw, start, ctl);
    } catch (const data_error&) {
      return false;  // e.g. a resample with every row censored
    }
    if (!c.converged || !c.beta.allFinite()) return false;
    row.segment(static_cast<Eigen::Index>(m) * K, K) = c.beta;
  }
  return true;
}

}  // namespace

BootstrapOut bootstrap(const Dataset& d, const ModelSpec& spec,
                       const FitResult& point_fit) {
  if (spec.reps < 2) throw usage_error("reps must be at least 2");
  const int B = spec.reps;
  const Eigen::Index dim = point_fit.dim();
  const Bandwidth bw{point_fit.bandwidth};

  MatrixXd rows(B, dim);
  std::vector<char> ok(static_cast<std::size_t>(B), 0);

  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    VectorXd row(dim);
    for (std::uint64_t attempt = 0; attempt < 5; ++attempt) {
      Rng rng = Rng::stream(spec.seed, b + 1, attempt);
      Dataset sample = resample_rows(d, rng);
      if (refit_stacked(sample, spec, point_fit, bw, rng.word(), row)) {
        rows.row(static_cast<Eigen::Index>(b)) = row;
        ok[b] = 1;
        return;
      }
    }
  });

  int completed = 0;
  for (char c : ok) completed += c;
  const int failures = B - completed;
  if (failures * 5 > B)
    throw numeric_error("bootstrap unreliable: more than 20% of replicates failed");
  if (completed < 2) throw numeric_error("bootstrap produced fewer than 2 replicates");

  BootstrapOut out;
  out.record.master_seed = spec.seed;
  out.record.failures = failures;
  out.record.replicates.resize(completed, dim);
  Eigen::Index k = 0;
  for (int b = 0; b < B; ++b)
    if (ok[static_cast<std::size_t>(b)])
      out.record.replicates.row(k++) = rows.row(b);

  const VectorXd mean = out.record.replicates.colwise().mean();
  MatrixXd centered = out.record.replicates.rowwise() - mean.transpose();
  out.V = (centered.transpose() * centered) / static_cast<double>(completed - 1);
  return out;
}

WaldResult wald_test(const VectorXd& theta, const MatrixXd& V, const MatrixXd& R,
                     const VectorXd& r, std::vector<std::string> constraints) {
  const Eigen::Index q = R.rows();
  if (R.cols() != theta.size() || V.rows() != theta.size() ||
      V.cols() != theta.size() || r.size() != q)
    throw data_error("wald_test: dimension mismatch");

  const VectorXd v = R * theta - r;
  const MatrixXd S = R * V * R.transpose();

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  const VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.size() ? lambda.maxCoeff() : 0.0;
  const double tol = lmax * 1e-10;

  WaldResult res;
  res.constraints = std::move(constraints);
  double W = 0.0;
  int rank = 0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    if (lambda[j] > tol && lambda[j] > 0) {
      const double proj = eig.eigenvectors().col(j).dot(v);
      W += proj * proj / lambda[j];
      ++rank;
    }
  }
  res.statistic = W;
  res.df = rank;
  res.rank_deficient = rank < q;
  res.p_value = rank > 0 ? chisq_sf(W, rank) : 1.0;
  return res;
}

WaldResult homogeneity_test(const FitResult& fit, const std::string& covariate) {
  const Eigen::Index M = fit.n_taus(), K = fit.K();
  if (M < 2) throw data_error("homogeneity test needs at least two quantiles");

  std::vector<Eigen::Index> cols;
  if (covariate == "ALL") {
    for (Eigen::Index j = 0; j < K; ++j)
      if (fit.names[static_cast<std::size_t>(j)] != "_cons") cols.push_back(j);
    if (cols.empty()) throw data_error("no non-intercept covariates to test");
  } else {
    bool found = false;
    for (Eigen::Index j = 0; j < K; ++j)
      if (fit.names[static_cast<std::size_t>(j)] == covariate) {
        cols.push_back(j);
        found = true;
      }
    if (!found) throw data_error("unknown covariate name: " + covariate);
  }

  const Eigen::Index nc = static_cast<Eigen::Index>(cols.size()) * (M - 1);
  MatrixXd R = MatrixXd::Zero(nc, fit.dim());
  VectorXd r = VectorXd::Zero(nc);
  std::vector<std::string> labels;
  Eigen::Index row = 0;
  for (Eigen::Index j : cols) {
    const std::string& name = fit.names[static_cast<std::size_t>(j)];
    for (Eigen::Index m = 1; m < M; ++m, ++row) {
      R(row, j) = 1.0;
      R(row, m * K + j) = -1.0;
      std::ostringstream lab;
      lab << "[q" << std::lround(fit.coefs[0].tau * 100) << "]" << name << " - [q"
          << std::lround(fit.coefs[static_cast<std::size_t>(m)].tau * 100) << "]"
          << name << " = 0";
      labels.push_back(lab.str());
    }
  }
  return wald_test(fit.stacked(), fit.V, R, r, std::move(labels));
}

WaldResult symmetry_test(const FitResult& fit, const std::vector<double>& deltas,
                         SymmetryMode mode) {
  if (deltas.empty()) throw data_error("symmetry test needs at least one delta");
  const Eigen::Index M = fit.n_taus(), K = fit.K();

  auto tau_block = [&](double tau) -> Eigen::Index {
    for (Eigen::Index m = 0; m < M; ++m)
      if (std::abs(fit.coefs[static_cast<std::size_t>(m)].tau - tau) <= 1e-9) return m;
    std::ostringstream msg;
    msg << "symmetry test needs quantile " << tau << " in the fit";
    throw data_error(msg.str());
  };

  const Eigen::Index mid = tau_block(0.5);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (double del : deltas) {
    if (!(del > 0 && del < 0.5))
      throw data_error("symmetry delta must lie in (0, 0.5)");
    pairs.emplace_back(tau_block(0.5 - del), tau_block(0.5 + del));
  }

  const Eigen::Index nd = static_cast<Eigen::Index>(pairs.size());
  const Eigen::Index nc = mode == SymmetryMode::PerDelta ? K * nd : K;
  MatrixXd R = MatrixXd::Zero(nc, fit.dim());
  VectorXd r = VectorXd::Zero(nc);
  std::vector<std::string> labels;

  if (mode == SymmetryMode::PerDelta) {
    for (Eigen::Index p = 0; p < nd; ++p) {
      for (Eigen::Index j = 0; j < K; ++j) {
        const Eigen::Index row = p * K + j;
        R(row, pairs[static_cast<std::size_t>(p)].first * K + j) = 0.5;
        R(row, pairs[static_cast<std::size_t>(p)].second * K + j) = 0.5;
        R(row, mid * K + j) = -1.0;
        std::ostringstream lab;
        lab << "0.5*[q" << std::lround(fit.coefs[static_cast<std::size_t>(
                               pairs[static_cast<std::size_t>(p)].first)].tau * 100)
            << "]" << fit.names[static_cast<std::size_t>(j)] << " + 0.5*[q"
            << std::lround(fit.coefs[static_cast<std::size_t>(
                               pairs[static_cast<std::size_t>(p)].second)].tau * 100)
            << "]" << fit.names[static_cast<std::size_t>(j)] << " - [q50]"
            << fit.names[static_cast<std::size_t>(j)] << " = 0";
        labels.push_back(lab.str());
      }
    }
  } else {
    const double w = 0.5 / static_cast<double>(nd);
    for (Eigen::Index j = 0; j < K; ++j) {
      for (const auto& [lo, hi] : pairs) {
        R(j, lo * K + j) += w;
        R(j, hi * K + j) += w;
      }
      R(j, mid * K + j) += -1.0;
      std::ostringstream lab;
      lab << "mean over deltas of 0.5*b(0.5-d) + 0.5*b(0.5+d) - b(0.5) = 0 : "
          << fit.names[static_cast<std::size_t>(j)];
      labels.push_back(lab.str());
    }
  }
  return wald_test(fit.stacked(), fit.V, R, r, std::move(labels));
}

}  // namespace ldvqr
