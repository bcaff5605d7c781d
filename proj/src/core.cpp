#include "ldvqr/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ldvqr {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Censored: return "censored";
    case ModelKind::Binary: return "binary";
    case ModelKind::Plain: return "plain";
  }
  return "unknown";
}

Eigen::Index Dataset::column(const std::string& name) const {
  for (Eigen::Index j = 0; j < K; ++j)
    if (names[static_cast<std::size_t>(j)] == name) return j;
  throw data_error("unknown column name: " + name);
}

void ModelSpec::validate() const {
  if (taus.empty()) throw usage_error("at least one quantile is required");
  double prev = 0.0;
  for (double t : taus) {
    if (!(t > 0.0 && t < 1.0))
      throw usage_error("quantile index outside (0,1)");
    if (t <= prev) throw usage_error("quantile list must be strictly increasing");
    prev = t;
  }
  if (reps < 2) throw usage_error("reps must be at least 2");
  if (kind == ModelKind::Censored && !(c_L < c_H))
    throw usage_error("lower censoring limit must be below the upper limit");
  if (bwidth && !(*bwidth > 0)) throw usage_error("bwidth must be positive");
  if (pbwidth && !(*pbwidth > 0)) throw usage_error("pbwidth must be positive");
}

VectorXd FitResult::stacked() const {
  VectorXd out(dim());
  Eigen::Index k = K();
  for (Eigen::Index m = 0; m < n_taus(); ++m)
    out.segment(m * k, k) = coefs[static_cast<std::size_t>(m)].beta;
  return out;
}

bool FitResult::has_tau(double tau) const {
  for (const auto& c : coefs)
    if (std::abs(c.tau - tau) <= 1e-9) return true;
  return false;
}

const CoefVector& FitResult::at_tau(double tau) const {
  for (const auto& c : coefs)
    if (std::abs(c.tau - tau) <= 1e-9) return c;
  std::ostringstream msg;
  msg << "quantile " << tau << " was not fitted";
  throw data_error(msg.str());
}

bool FitResult::all_converged() const {
  return std::all_of(coefs.begin(), coefs.end(),
                     [](const CoefVector& c) { return c.converged; });
}

void FitResult::fill_inference_columns() {
  const Eigen::Index d = dim();
  VectorXd est = stacked();
  se.resize(d);
  z.resize(d);
  p.resize(d);
  ci_lo.resize(d);
  ci_hi.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    se[j] = std::sqrt(std::max(0.0, V(j, j)));
    z[j] = se[j] > 0 ? est[j] / se[j] : kNaN;
    p[j] = se[j] > 0 ? std::erfc(std::abs(z[j]) / std::sqrt(2.0)) : kNaN;
    ci_lo[j] = est[j] - kZ975 * se[j];
    ci_hi[j] = est[j] + kZ975 * se[j];
  }
}

ModelKind detect_model_kind(const VectorXd& y, std::optional<double> ll,
                            std::optional<double> ul) {
  if (y.size() == 0) throw data_error("empty dependent variable");
  const double lo = y.minCoeff(), hi = y.maxCoeff();
  if (hi - lo <= 1e-12) throw data_error("degenerate dependent variable");
  if (ll || ul) return ModelKind::Censored;
  bool zeros = false, ones = false, other = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) <= 1e-12) zeros = true;
    else if (std::abs(y[i] - 1.0) <= 1e-12) ones = true;
    else other = true;
  }
  if (zeros && ones && !other) return ModelKind::Binary;
  return ModelKind::Plain;
}

namespace {

// Columns beyond the numerical rank of the pivoted QR, i.e. the ones that are
// linear combinations of the others.
std::vector<std::string> dependent_columns(const MatrixXd& X,
                                           const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  std::vector<std::string> out;
  if (rank >= X.cols()) return out;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index j = rank; j < X.cols(); ++j)
    out.push_back(names[static_cast<std::size_t>(perm[j])]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Dataset build_dataset(const std::vector<std::pair<std::string, VectorXd>>& columns,
                      const std::string& depvar,
                      const std::vector<std::string>& covars,
                      bool add_intercept) {
  auto find = [&](const std::string& name) -> const VectorXd& {
    for (const auto& [n, v] : columns)
      if (n == name) return v;
    throw data_error("unknown column name: " + name);
  };

  const VectorXd& yraw = find(depvar);
  std::vector<const VectorXd*> xraw;
  for (const auto& c : covars) {
    if (c == depvar) throw data_error("dependent variable repeated in covariates: " + c);
    xraw.push_back(&find(c));
  }
  for (const auto* v : xraw)
    if (v->size() != yraw.size())
      throw data_error("columns have unequal lengths");

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(yraw.size()));
  for (Eigen::Index i = 0; i < yraw.size(); ++i) {
    bool ok = std::isfinite(yraw[i]);
    for (const auto* v : xraw) ok = ok && std::isfinite((*v)[i]);
    if (ok) keep.push_back(i);
  }

  Dataset d;
  d.dropped_rows = yraw.size() - static_cast<Eigen::Index>(keep.size());
  d.n = static_cast<Eigen::Index>(keep.size());
  d.K = static_cast<Eigen::Index>(covars.size()) + (add_intercept ? 1 : 0);
  if (d.n == 0) throw data_error("no observations left after dropping missing values");
  if (d.n < d.K) throw data_error("fewer observations than coefficients");
  if (d.K < 1) throw data_error("no covariates and no intercept");

  d.y.resize(d.n);
  d.X.resize(d.n, d.K);
  d.row_index = keep;
  for (Eigen::Index i = 0; i < d.n; ++i) {
    d.y[i] = yraw[keep[static_cast<std::size_t>(i)]];
    for (std::size_t j = 0; j < xraw.size(); ++j)
      d.X(i, static_cast<Eigen::Index>(j)) = (*xraw[j])[keep[static_cast<std::size_t>(i)]];
    if (add_intercept) d.X(i, d.K - 1) = 1.0;
  }
  d.names = covars;
  if (add_intercept) d.names.push_back("_cons");

  auto dep = dependent_columns(d.X, d.names);
  if (!dep.empty()) {
    std::string msg = "design matrix is rank deficient; dependent columns:";
    for (const auto& c : dep) msg += " " + c;
    d.warnings.push_back(msg);
  }
  return d;
}

}  // namespace ldvqr
