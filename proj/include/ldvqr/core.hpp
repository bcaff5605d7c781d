#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ldvqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error taxonomy; the CLI maps these to distinct exit codes.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Normal 97.5% point used for the reported confidence bounds.
inline constexpr double kZ975 = 1.959964;

enum class ModelKind { Censored, Binary, Plain };

std::string to_string(ModelKind kind);

// Estimation sample after listwise deletion. The intercept column, when
// present, is stored last so report order equals storage order.
struct Dataset {
  VectorXd y;
  MatrixXd X;
  std::vector<std::string> names;
  Eigen::Index n = 0;
  Eigen::Index K = 0;
  long dropped_rows = 0;
  std::vector<Eigen::Index> row_index;  // source rows that survived deletion
  std::vector<std::string> warnings;

  Eigen::Index column(const std::string& name) const;
};

struct ModelSpec {
  ModelKind kind = ModelKind::Plain;
  double c_L = -kInf;
  double c_H = kInf;
  std::vector<double> taus{0.5};
  int reps = 50;
  std::optional<double> bwidth;
  std::optional<double> pbwidth;
  std::uint64_t seed = 0;

  // Throws usage_error on an inconsistent spec.
  void validate() const;
};

struct CoefVector {
  double tau = 0.5;
  VectorXd beta;
  bool unit_norm = false;
  bool converged = true;
  std::string diagnostic;  // non-empty when the optimizer reported trouble
};

// Stacked multi-quantile fit. Vectors se/z/p/ci_* and the covariance V use
// tau-major ordering: all coefficients for taus[0], then taus[1], ...
struct FitResult {
  ModelSpec spec;
  std::vector<std::string> names;
  std::vector<CoefVector> coefs;
  MatrixXd V;
  double bandwidth = 0;
  double sigma_hat = 0;
  bool sigma_is_extension = false;  // plain-model residual scale, not Tobit/Probit
  Eigen::Index n = 0;
  int reps_completed = 0;
  int reps_failed = 0;
  VectorXd se, z, p, ci_lo, ci_hi;

  Eigen::Index n_taus() const { return static_cast<Eigen::Index>(coefs.size()); }
  Eigen::Index K() const { return coefs.empty() ? 0 : coefs.front().beta.size(); }
  Eigen::Index dim() const { return n_taus() * K(); }
  VectorXd stacked() const;
  const CoefVector& at_tau(double tau) const;
  bool has_tau(double tau) const;
  bool all_converged() const;
  // Fills se/z/p/ci_* from the diagonal of V.
  void fill_inference_columns();
};

ModelKind detect_model_kind(const VectorXd& y, std::optional<double> ll,
                            std::optional<double> ul);

Dataset build_dataset(const std::vector<std::pair<std::string, VectorXd>>& columns,
                      const std::string& depvar,
                      const std::vector<std::string>& covars,
                      bool add_intercept);

}  // namespace ldvqr
