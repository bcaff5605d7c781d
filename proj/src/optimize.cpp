#include "ldvqr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldvqr {

namespace {
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;
}  // namespace

OptimResult minimize_qn(const GradObjective& f, const VectorXd& x0, double tol_g,
                        int max_iter) {
  OptimResult res;
  res.method = OptimMethod::QuasiNewton;
  const Eigen::Index dim = x0.size();

  VectorXd x = x0, g(dim);
  double fx = f(x, &g);
  if (!std::isfinite(fx) || !g.allFinite()) {
    res.x_opt = x0;
    res.f_opt = fx;
    res.diagnostic = "non-finite objective or gradient at start";
    return res;
  }

  MatrixXd H = MatrixXd::Identity(dim, dim);  // inverse Hessian approximation
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= tol_g) {
      res.converged = true;
      break;
    }
    VectorXd dir = -(H * g);
    double slope = g.dot(dir);
    if (!(slope < 0)) {  // not a descent direction; reset curvature
      H.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }

    double step = 1.0;
    VectorXd x_new(dim), g_new(dim);
    double f_new = kNaN;
    bool accepted = false;
    for (int cut = 0; cut < kMaxHalvings; ++cut) {
      x_new = x + step * dir;
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && g_new.allFinite() &&
          f_new <= fx + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.diagnostic = "line search failed";
      break;
    }

    VectorXd s = x_new - x;
    VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm() && sy > 0) {
      const double rho = 1.0 / sy;
      VectorXd Hy = H * yv;
      // BFGS inverse update.
      H.noalias() -= rho * (Hy * s.transpose() + s * Hy.transpose());
      H.noalias() += rho * rho * (yv.dot(Hy) + sy) * (s * s.transpose());
    }
    x = std::move(x_new);
    g = std::move(g_new);
    fx = f_new;
  }
  if (iter == max_iter && g.lpNorm<Eigen::Infinity>() <= tol_g) res.converged = true;

  res.x_opt = x;
  res.f_opt = fx;
  res.iterations = iter;
  if (!res.converged && res.diagnostic.empty())
    res.diagnostic = "iteration limit reached";
  return res;
}

OptimResult minimize_simplex(const Objective& f, const VectorXd& x0, double scale,
                             double tol_x, int max_iter) {
  OptimResult res;
  res.method = OptimMethod::Simplex;
  const Eigen::Index dim = x0.size();
  const std::size_t m = static_cast<std::size_t>(dim) + 1;

  std::vector<VectorXd> pts(m, x0);
  std::vector<double> fv(m);
  for (std::size_t i = 1; i < m; ++i)
    pts[i][static_cast<Eigen::Index>(i) - 1] += scale;
  for (std::size_t i = 0; i < m; ++i) fv[i] = f(pts[i]);
  if (!std::isfinite(fv[0])) {
    res.x_opt = x0;
    res.f_opt = fv[0];
    res.diagnostic = "non-finite objective at start";
    return res;
  }

  std::vector<std::size_t> order(m);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const bool fa = std::isfinite(fv[a]), fb = std::isfinite(fv[b]);
      if (fa != fb) return fa;  // non-finite values sort last
      return fv[a] < fv[b];
    });
  };

  auto diameter = [&] {
    double d = 0;
    for (std::size_t i = 1; i < m; ++i)
      d = std::max(d, (pts[order[i]] - pts[order[0]]).lpNorm<Eigen::Infinity>());
    return d;
  };

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    sort_simplex();
    if (diameter() <= tol_x) {
      res.converged = true;
      break;
    }
    const std::size_t best = order[0], worst = order[m - 1], second = order[m - 2];

    VectorXd centroid = VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < m; ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(dim);

    VectorXd xr = centroid + (centroid - pts[worst]);  // reflection
    double fr = f(xr);
    if (std::isfinite(fr) && fr < fv[best]) {
      VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);  // expansion
      double fe = f(xe);
      if (std::isfinite(fe) && fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (std::isfinite(fr) && fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    VectorXd xc = centroid + 0.5 * (pts[worst] - centroid);  // contraction
    double fc = f(xc);
    if (std::isfinite(fc) && fc < std::min(fv[worst], std::isfinite(fr) ? fr : kInf)) {
      pts[worst] = std::move(xc);
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < m; ++i) {  // shrink toward the best vertex
      pts[order[i]] = pts[best] + 0.5 * (pts[order[i]] - pts[best]);
      fv[order[i]] = f(pts[order[i]]);
    }
  }

  sort_simplex();
  res.x_opt = pts[order[0]];
  res.f_opt = fv[order[0]];
  res.iterations = iter;
  if (!res.converged) res.diagnostic = "iteration limit reached";
  return res;
}

VectorXd fd_gradient(const Objective& f, const VectorXd& x, double step) {
  VectorXd g(x.size());
  VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double orig = x[j];
    xp[j] = orig + step;
    const double fp = f(xp);
    xp[j] = orig - step;
    const double fm = f(xp);
    xp[j] = orig;
    g[j] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace ldvqr
