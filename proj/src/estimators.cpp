#include "ldvqr/estimators.hpp"

#include "ldvqr/inference.hpp"
#include "ldvqr/optimize.hpp"
#include "ldvqr/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ldvqr {

namespace {

// Gradient max-norm below which a fit counts as converged even when the line
// search stalled on rounding noise first.
constexpr double kLooseGradTol = 1e-5;

VectorXd ols_beta(const Dataset& d) {
  return d.X.colPivHouseholderQr().solve(d.y);
}

VectorXd ols_beta(const MatrixXd& X, const VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

Eigen::Index intercept_column(const Dataset& d) {
  for (Eigen::Index j = 0; j < d.K; ++j)
    if (d.names[static_cast<std::size_t>(j)] == "_cons") return j;
  return -1;
}

// ---- Tobit ----

struct TobitProblem {
  const Dataset& d;
  double c_L, c_H;

  // theta = (beta, log sigma); returns mean negative log-likelihood.
  double operator()(const VectorXd& theta, VectorXd* grad) const {
    const Eigen::Index n = d.n, K = d.K;
    const double ls = theta[K];
    const double sigma = std::exp(ls);
    const VectorXd beta = theta.head(K);
    const VectorXd mu = d.X * beta;

    double nll = 0.0;
    VectorXd w = VectorXd::Zero(n);  // per-row weight on x_i in the beta gradient
    double g_ls = 0.0;
    const double log_sigma = ls;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = d.y[i];
      if (std::isfinite(c_L) && yi <= c_L) {
        const double a = (c_L - mu[i]) / sigma;
        nll -= gauss_logcdf(a);
        const double lam = gauss_invmills(a);
        w[i] = lam / sigma;
        g_ls += lam * a;
      } else if (std::isfinite(c_H) && yi >= c_H) {
        const double b = (mu[i] - c_H) / sigma;
        nll -= gauss_logcdf(b);
        const double lam = gauss_invmills(b);
        w[i] = -lam / sigma;
        g_ls += lam * b;
      } else {
        const double r = (yi - mu[i]) / sigma;
        nll += 0.5 * r * r + log_sigma + 0.9189385332046727418;
        w[i] = -r / sigma;
        g_ls += 1.0 - r * r;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (grad) {
      grad->resize(K + 1);
      grad->head(K) = (d.X.transpose() * w) * inv_n;
      (*grad)[K] = g_ls * inv_n;
    }
    return nll * inv_n;
  }
};

// ---- smoothed quantile objectives ----

struct CqrProblem {
  const Dataset& d;
  double tau, c_L, c_H, h;

  double operator()(const VectorXd& b, VectorXd* grad) const {
    const Eigen::Index n = d.n;
    const bool lo = std::isfinite(c_L), hi = std::isfinite(c_H);
    const VectorXd u = d.X * b;
    double total = 0.0;
    VectorXd w;
    if (grad) w.setZero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double clamped = u[i], dclamped = 1.0;
      if (lo) {
        const auto s = smoothed_max_with_deriv(u[i] - c_L, h);
        clamped = c_L + s.value;
        dclamped = s.deriv;
      }
      if (hi) {
        const auto s = smoothed_max_with_deriv(u[i] - c_H, h);
        clamped -= s.value;
        dclamped -= s.deriv;
      }
      const double r = d.y[i] - clamped;
      const auto s = smoothed_max_with_deriv(-r, h);
      total += tau * r + s.value;
      if (grad) w[i] = -(tau - s.deriv) * dclamped;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (grad) *grad = (d.X.transpose() * w) * inv_n;
    return total * inv_n;
  }
};

// Negated, normalized score objective; minimized over unconstrained b.
struct BqrProblem {
  const Dataset& d;
  double tau, h;

  double operator()(const VectorXd& b, VectorXd* grad) const {
    const Eigen::Index n = d.n;
    const double r = b.norm();
    if (!(r > 1e-12)) {
      if (grad) grad->setConstant(b.size(), kNaN);
      return kNaN;  // collapse; caller restarts from a perturbed point
    }
    const VectorXd w = b / r;
    const VectorXd z = (d.X * w) / h;
    double score = 0.0;
    VectorXd dv;
    if (grad) dv.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ci = d.y[i] - (1.0 - tau);
      score += ci * gauss_cdf(z[i]);
      if (grad) dv[i] = ci * gauss_pdf(z[i]);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (grad) {
      VectorXd q = (d.X.transpose() * dv) * (inv_n / h);
      // project onto the tangent of the sphere, then undo the radius
      *grad = -(q - w * w.dot(q)) / r;
    }
    return -score * inv_n;
  }
};

// QN from each start, then one simplex polish from the winner.
struct SolveOutcome {
  VectorXd x;
  double f = kNaN;
  bool converged = false;
  std::string diagnostic;
};

SolveOutcome solve_multistart(const GradObjective& f, const VectorXd& b0,
                              const FitControl& ctl) {
  Rng rng = Rng::stream(ctl.seed, 0xf17, 0);
  const double pscale = std::max(0.1 * b0.norm(), 0.1);

  SolveOutcome best;
  for (int s = 0; s <= ctl.restarts; ++s) {
    VectorXd start = b0;
    if (s > 0)
      for (Eigen::Index j = 0; j < start.size(); ++j)
        start[j] += pscale * rng.normal();
    OptimResult qn = minimize_qn(f, start, 1e-8, 500);
    if (!qn.x_opt.allFinite() || !std::isfinite(qn.f_opt)) continue;
    VectorXd g(qn.x_opt.size());
    const double fv = f(qn.x_opt, &g);
    const bool conv =
        qn.converged || (g.allFinite() && g.lpNorm<Eigen::Infinity>() <= kLooseGradTol);
    if (!(best.f <= fv)) {  // also true when best.f is NaN
      best = {qn.x_opt, fv, conv, qn.diagnostic};
    }
  }
  if (!best.x.size()) {
    best.x = b0;
    best.f = f(b0, nullptr);
    best.diagnostic = "optimization failed from every start";
    return best;
  }
  if (ctl.polish) {
    auto obj = [&f](const VectorXd& x) { return f(x, nullptr); };
    const double scale = std::max(1e-6, 1e-3 * (1.0 + best.x.lpNorm<Eigen::Infinity>()));
    OptimResult nm = minimize_simplex(obj, best.x, scale, 1e-8, 2000);
    if (nm.x_opt.allFinite() && std::isfinite(nm.f_opt) && nm.f_opt <= best.f) {
      best.x = nm.x_opt;
      best.f = nm.f_opt;
      best.converged = best.converged || nm.converged;
    }
  }
  return best;
}

double residual_sd(const Dataset& d, const VectorXd& beta) {
  const VectorXd r = d.y - d.X * beta;
  const double n = static_cast<double>(d.n);
  const double mean = r.sum() / n;
  return std::sqrt((r.array() - mean).square().sum() / std::max(1.0, n - 1.0));
}

void require_binary(const Dataset& d) {
  bool zeros = false, ones = false;
  for (Eigen::Index i = 0; i < d.n; ++i) {
    if (std::abs(d.y[i]) <= 1e-12) zeros = true;
    else if (std::abs(d.y[i] - 1.0) <= 1e-12) ones = true;
    else throw data_error("binary fit requires a 0/1 dependent variable");
  }
  if (!zeros || !ones) throw data_error("binary fit requires both outcome classes");
}

}  // namespace

TobitFit tobit_fit(const Dataset& d, double c_L, double c_H) {
  TobitFit fit;
  std::vector<Eigen::Index> uncensored;
  for (Eigen::Index i = 0; i < d.n; ++i) {
    if (std::isfinite(c_L) && d.y[i] <= c_L) ++fit.n_lower;
    else if (std::isfinite(c_H) && d.y[i] >= c_H) ++fit.n_upper;
    else uncensored.push_back(i);
  }
  fit.n_uncensored = static_cast<Eigen::Index>(uncensored.size());
  if (uncensored.empty()) throw data_error("no uncensored observations");

  // OLS on the uncensored rows seeds (beta, log sigma).
  MatrixXd Xu(fit.n_uncensored, d.K);
  VectorXd yu(fit.n_uncensored);
  for (Eigen::Index i = 0; i < fit.n_uncensored; ++i) {
    Xu.row(i) = d.X.row(uncensored[static_cast<std::size_t>(i)]);
    yu[i] = d.y[uncensored[static_cast<std::size_t>(i)]];
  }
  VectorXd beta0 = ols_beta(Xu, yu);
  double s0 = std::sqrt((yu - Xu * beta0).squaredNorm() /
                        static_cast<double>(fit.n_uncensored));
  if (!(s0 > 1e-12)) s0 = 1e-3;

  VectorXd theta0(d.K + 1);
  theta0.head(d.K) = beta0;
  theta0[d.K] = std::log(s0);

  TobitProblem prob{d, c_L, c_H};
  GradObjective f = [&prob](const VectorXd& t, VectorXd* g) { return prob(t, g); };
  SolveOutcome sol = solve_multistart(f, theta0, FitControl{1, true, 0x70b17});

  fit.beta = sol.x.head(d.K);
  fit.sigma = std::exp(sol.x[d.K]);
  fit.loglik = -sol.f * static_cast<double>(d.n);
  fit.converged = sol.converged;
  return fit;
}

ProbitFit probit_fit(const Dataset& d) {
  require_binary(d);
  const Eigen::Index n = d.n;
  auto f = [&d, n](const VectorXd& beta, VectorXd* grad) {
    const VectorXd z = d.X * beta;
    double nll = 0.0;
    VectorXd w;
    if (grad) w.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool one = d.y[i] > 0.5;
      nll -= one ? gauss_logcdf(z[i]) : gauss_logcdf(-z[i]);
      if (grad)
        w[i] = one ? -gauss_invmills(z[i]) : gauss_invmills(-z[i]);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (grad) *grad = (d.X.transpose() * w) * inv_n;
    return nll * inv_n;
  };
  SolveOutcome sol =
      solve_multistart(f, VectorXd::Zero(d.K), FitControl{0, true, 0x9206b17});
  ProbitFit fit;
  fit.beta = sol.x;
  fit.loglik = -sol.f * static_cast<double>(d.n);
  fit.converged = sol.converged;
  // A likelihood this close to 1 means the classes are (nearly) separated and
  // the maximizer diverges.
  if (sol.f < 1e-4) fit.converged = false;
  return fit;
}

double cqr_objective(const Dataset& d, double tau, double c_L, double c_H,
                     double h, const VectorXd& b, VectorXd* grad) {
  if (!(tau > 0 && tau < 1)) throw std::invalid_argument("tau outside (0,1)");
  if (!(h > 0)) throw std::invalid_argument("bandwidth must be positive");
  return CqrProblem{d, tau, c_L, c_H, h}(b, grad);
}

double bqr_objective(const Dataset& d, double tau, double h, const VectorXd& b,
                     VectorXd* grad) {
  if (!(tau > 0 && tau < 1)) throw std::invalid_argument("tau outside (0,1)");
  if (!(h > 0)) throw std::invalid_argument("bandwidth must be positive");
  const double value = -BqrProblem{d, tau, h}(b, grad);
  if (grad) *grad = -*grad;
  return value;
}

CoefVector cqr_fit(const Dataset& d, double tau, double c_L, double c_H,
                   Bandwidth h, const VectorXd& b0, const FitControl& ctl) {
  if (!(c_L < c_H)) throw data_error("lower censoring limit must be below the upper limit");
  bool any_uncensored = false;
  for (Eigen::Index i = 0; i < d.n && !any_uncensored; ++i)
    any_uncensored = d.y[i] > c_L && d.y[i] < c_H;
  if (!any_uncensored) throw data_error("every observation is censored");

  CqrProblem prob{d, tau, c_L, c_H, h.h};
  GradObjective f = [&prob](const VectorXd& b, VectorXd* g) { return prob(b, g); };
  SolveOutcome sol = solve_multistart(f, b0, ctl);

  CoefVector out;
  out.tau = tau;
  out.beta = sol.x;
  out.unit_norm = false;
  out.converged = sol.converged && sol.x.allFinite();
  if (!out.converged)
    out.diagnostic = sol.diagnostic.empty() ? "optimizer did not converge" : sol.diagnostic;
  return out;
}

CoefVector bqr_fit(const Dataset& d, double tau, Bandwidth h, const VectorXd& b0,
                   const FitControl& ctl) {
  require_binary(d);
  if (!(b0.norm() > 0)) throw data_error("binary fit needs a nonzero starting vector");

  BqrProblem prob{d, tau, h.h};
  GradObjective f = [&prob](const VectorXd& b, VectorXd* g) { return prob(b, g); };

  VectorXd start = b0 / b0.norm();
  SolveOutcome sol;
  Rng rng = Rng::stream(ctl.seed, 0xb98, 1);
  for (int attempt = 0; attempt < 5; ++attempt) {
    sol = solve_multistart(f, start, ctl);
    if (sol.x.allFinite() && sol.x.norm() > 1e-12) break;
    // norm collapse: restart from a perturbed unit vector
    for (Eigen::Index j = 0; j < start.size(); ++j)
      start[j] = b0[j] / b0.norm() + 0.2 * rng.normal();
    start /= std::max(start.norm(), 1e-8);
  }

  CoefVector out;
  out.tau = tau;
  out.unit_norm = true;
  if (sol.x.allFinite() && sol.x.norm() > 1e-12) {
    out.beta = sol.x / sol.x.norm();
    out.converged = sol.converged;
  } else {
    out.beta = b0 / b0.norm();
    out.converged = false;
  }
  if (!out.converged)
    out.diagnostic = sol.diagnostic.empty() ? "optimizer did not converge" : sol.diagnostic;
  return out;
}

CoefVector sqr_fit(const Dataset& d, double tau, Bandwidth h, const VectorXd& b0,
                   const FitControl& ctl) {
  return cqr_fit(d, tau, -kInf, kInf, h, b0, ctl);
}

FitResult fit_point_estimates(const Dataset& d, const ModelSpec& spec) {
  spec.validate();
  FitResult fit;
  fit.spec = spec;
  fit.names = d.names;
  fit.n = d.n;

  const Eigen::Index icol = intercept_column(d);

  VectorXd base;          // center of the starting family
  double start_scale = 0; // sigma used to shift starts across quantiles
  switch (spec.kind) {
    case ModelKind::Censored: {
      TobitFit tobit = tobit_fit(d, spec.c_L, spec.c_H);
      fit.sigma_hat = tobit.sigma;
      base = tobit.beta;
      start_scale = tobit.sigma;
      break;
    }
    case ModelKind::Binary: {
      require_binary(d);
      fit.sigma_hat = 1.0;
      ProbitFit probit = probit_fit(d);
      // Keep the probit vector unnormalized: the per-quantile start shifts
      // its intercept by z_tau (the probit-implied quantile line) and only
      // then projects onto the unit sphere.
      base = probit.beta;
      if (!(base.norm() > 1e-8)) {
        base.setZero();
        base[icol >= 0 ? icol : 0] = 1.0;
      }
      start_scale = 1.0;
      break;
    }
    case ModelKind::Plain: {
      base = ols_beta(d);
      fit.sigma_hat = residual_sd(d, base);
      fit.sigma_is_extension = true;
      start_scale = fit.sigma_hat;
      if (!(fit.sigma_hat > 0)) throw data_error("degenerate dependent variable");
      break;
    }
  }

  fit.bandwidth = spec.bwidth ? *spec.bwidth
                              : bandwidth_rule(fit.sigma_hat, static_cast<std::size_t>(d.n)).h;
  const Bandwidth bw{fit.bandwidth};

  fit.coefs.reserve(spec.taus.size());
  for (std::size_t m = 0; m < spec.taus.size(); ++m) {
    const double tau = spec.taus[m];
    FitControl ctl;
    ctl.seed = spec.seed * 1000003ull + m;
    VectorXd b0 = base;
    if (icol >= 0) b0[icol] += start_scale * gauss_quantile(tau);
    CoefVector c = spec.kind == ModelKind::Binary
                       ? bqr_fit(d, tau, bw, b0, ctl)
                       : cqr_fit(d, tau, spec.c_L, spec.c_H, bw, b0, ctl);
    fit.coefs.push_back(std::move(c));
  }
  return fit;
}

FitResult fit_all(const Dataset& d, const ModelSpec& spec) {
  FitResult fit = fit_point_estimates(d, spec);
  BootstrapOut boot = bootstrap(d, spec, fit);
  fit.V = std::move(boot.V);
  fit.reps_completed = static_cast<int>(boot.record.replicates.rows());
  fit.reps_failed = boot.record.failures;
  fit.fill_inference_columns();
  return fit;
}

}  // namespace ldvqr
