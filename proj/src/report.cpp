#include "ldvqr/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ldvqr {

using nlohmann::json;

std::string format_sig7(double v) {
  if (std::isnan(v)) return ".";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

namespace {

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string pad_left(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  return std::string(width - s.size(), ' ') + s;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return ".";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

json fit_to_json(const FitResult& fit, const std::string& depvar,
                 const std::vector<std::string>& warnings, long dropped_rows) {
  json doc;
  json spec;
  spec["kind"] = to_string(fit.spec.kind);
  spec["depvar"] = depvar;
  spec["ll"] = number_or_null(fit.spec.c_L);
  spec["ul"] = number_or_null(fit.spec.c_H);
  spec["taus"] = fit.spec.taus;
  spec["reps"] = fit.spec.reps;
  spec["seed"] = fit.spec.seed;
  spec["bwidth"] = fit.spec.bwidth ? json(*fit.spec.bwidth) : json(nullptr);
  spec["pbwidth"] = fit.spec.pbwidth ? json(*fit.spec.pbwidth) : json(nullptr);
  doc["spec"] = std::move(spec);

  doc["sigma_hat"] = fit.sigma_hat;
  doc["bandwidth"] = fit.bandwidth;

  const Eigen::Index K = fit.K();
  json per_tau = json::array();
  for (Eigen::Index m = 0; m < fit.n_taus(); ++m) {
    const CoefVector& c = fit.coefs[static_cast<std::size_t>(m)];
    json block;
    block["tau"] = c.tau;
    block["unit_norm"] = c.unit_norm;
    block["converged"] = c.converged;
    json coef = json::array();
    for (Eigen::Index j = 0; j < K; ++j) {
      const Eigen::Index k = m * K + j;
      json entry;
      entry["name"] = fit.names[static_cast<std::size_t>(j)];
      entry["est"] = c.beta[j];
      const bool have_v = fit.se.size() == fit.dim();
      entry["se"] = have_v ? number_or_null(fit.se[k]) : json(nullptr);
      entry["z"] = have_v ? number_or_null(fit.z[k]) : json(nullptr);
      entry["p"] = have_v ? number_or_null(fit.p[k]) : json(nullptr);
      entry["ci_lo"] = have_v ? number_or_null(fit.ci_lo[k]) : json(nullptr);
      entry["ci_hi"] = have_v ? number_or_null(fit.ci_hi[k]) : json(nullptr);
      coef.push_back(std::move(entry));
    }
    block["coef"] = std::move(coef);
    per_tau.push_back(std::move(block));
  }
  doc["per_tau"] = std::move(per_tau);

  json V = json::array();  // row-major
  for (Eigen::Index i = 0; i < fit.V.rows(); ++i)
    for (Eigen::Index j = 0; j < fit.V.cols(); ++j) V.push_back(fit.V(i, j));
  doc["V"] = std::move(V);

  json diag;
  diag["n"] = fit.n;
  diag["dropped_rows"] = dropped_rows;
  diag["reps_completed"] = fit.reps_completed;
  diag["reps_failed"] = fit.reps_failed;
  diag["all_converged"] = fit.all_converged();
  diag["sigma_is_extension"] = fit.sigma_is_extension;
  diag["warnings"] = warnings;
  json per_tau_diag = json::array();
  for (const auto& c : fit.coefs) {
    json e;
    e["tau"] = c.tau;
    e["converged"] = c.converged;
    e["diagnostic"] = c.diagnostic;
    per_tau_diag.push_back(std::move(e));
  }
  diag["per_tau"] = std::move(per_tau_diag);
  doc["diagnostics"] = std::move(diag);
  doc["tests"] = json::array();
  return doc;
}

json test_to_json(const std::string& name, const WaldResult& wald) {
  json t;
  t["name"] = name;
  t["constraints"] = wald.constraints;
  t["statistic"] = wald.statistic;
  t["df"] = wald.df;
  t["p_value"] = wald.p_value;
  t["rank_deficient"] = wald.rank_deficient;
  return t;
}

json predictions_to_json(const PredictionSet& preds) {
  json p;
  p["m"] = preds.m;
  p["pbw"] = preds.pbw;
  p["crossing_fraction"] = preds.crossing_fraction;
  json cols = json::array();
  for (const auto& [name, v] : preds.columns) cols.push_back(name);
  p["columns"] = std::move(cols);
  return p;
}

std::string render_fit_report(const json& doc) {
  std::ostringstream out;
  const std::string kind = doc["spec"]["kind"];
  const std::string title = kind == "binary" ? "Binary quantile regression"
                                             : "Censored quantile regression";
  const std::string depvar = doc["spec"]["depvar"];

  out << title << std::string(48 - title.size(), ' ')
      << "Number of obs     = " << pad_left(std::to_string(doc["diagnostics"]["n"].get<long>()), 10)
      << '\n';
  out << std::string(48, ' ') << "Replications      = "
      << pad_left(std::to_string(doc["diagnostics"]["reps_completed"].get<int>()), 10)
      << '\n';
  out << '\n';

  const std::string rule_heavy(78, '-');
  const std::string rule = std::string(13, '-') + "+" + std::string(64, '-');
  out << rule_heavy << '\n';
  out << "             |   Observed   Bootstrap                         Normal-based\n";
  out << pad_left(depvar, 12) << " |      Coef.   Std. Err.      z    P>|z|     [95% Conf. Interval]\n";
  out << rule << '\n';

  const auto& per_tau = doc["per_tau"];
  const bool blocks = per_tau.size() > 1;
  for (std::size_t m = 0; m < per_tau.size(); ++m) {
    const auto& block = per_tau[m];
    if (blocks) {
      std::ostringstream label;
      label << "q" << std::lround(block["tau"].get<double>() * 100);
      out << label.str() << std::string(13 - label.str().size(), ' ') << "|\n";
    }
    for (const auto& entry : block["coef"]) {
      const std::string name = entry["name"];
      auto num = [&](const char* key) {
        return entry[key].is_null() ? kNaN : entry[key].get<double>();
      };
      out << pad_left(name, 12) << " | " << pad_left(format_sig7(num("est")), 10)
          << "  " << pad_left(format_sig7(num("se")), 10) << "  "
          << pad_left(fixed(num("z"), 2), 6) << "   " << pad_left(fixed(num("p"), 3), 5)
          << "    " << pad_left(format_sig7(num("ci_lo")), 10) << "  "
          << pad_left(format_sig7(num("ci_hi")), 10) << '\n';
    }
    if (blocks && m + 1 < per_tau.size()) out << rule << '\n';
  }
  out << rule_heavy << '\n';
  return out.str();
}

std::string render_tests(const json& doc) {
  std::ostringstream out;
  for (const auto& t : doc["tests"]) {
    out << '\n' << t["name"].get<std::string>() << '\n';
    int k = 1;
    for (const auto& c : t["constraints"])
      out << " (" << pad_left(std::to_string(k++), 2) << ")  "
          << c.get<std::string>() << '\n';
    out << '\n';
    out << "    chi2( " << t["df"].get<int>() << ") = "
        << fixed(t["statistic"].get<double>(), 2) << '\n';
    out << "    Prob > chi2 = " << fixed(t["p_value"].get<double>(), 4) << '\n';
    if (t["rank_deficient"].get<bool>())
      out << "    warning: constraint covariance is singular; df reduced to its rank\n";
  }
  return out.str();
}

}  // namespace ldvqr
