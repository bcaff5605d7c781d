#include "ldvqr/cli.hpp"

#include "ldvqr/csv.hpp"
#include "ldvqr/estimators.hpp"
#include "ldvqr/predict.hpp"
#include "ldvqr/report.hpp"
#include "ldvqr/simulate.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ldvqr {

using nlohmann::json;

std::vector<double> normalize_taus(const std::vector<double>& raw) {
  if (raw.empty()) throw usage_error("at least one quantile is required");
  std::vector<double> taus;
  for (double t : raw) {
    if (!(t > 0.0 && t < 100.0))
      throw usage_error("quantile outside (0,100): " + std::to_string(t));
    taus.push_back(t >= 1.0 ? t / 100.0 : t);
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             taus.end());
  return taus;
}

CliConfig parse_cli(const std::vector<std::string>& args) {
  CliConfig config;

  CLI::App app{"Quantile regression for censored and binary dependent variables"};
  app.require_subcommand(0, 1);

  auto* fit = app.add_subcommand(
      "fit", "Fit a smoothed quantile regression from a CSV file");
  std::vector<double> raw_taus;
  std::string sym_mode = "averaged";
  fit->add_option("input", config.input, "input CSV (header row, NA/empty = missing)")
      ->required();
  fit->add_option("--dep", config.depvar, "dependent variable column")->required();
  fit->add_option("--cov", config.covars, "covariate columns")
      ->required()
      ->expected(-1);
  fit->add_option("--tau", raw_taus,
                  "quantiles; values >= 1 are percentages (default 50)")
      ->expected(-1);
  fit->add_option("--ll", config.ll, "lower censoring limit");
  fit->add_option("--ul", config.ul, "upper censoring limit");
  fit->add_option("--reps", config.reps, "bootstrap replications (default 50)");
  fit->add_option("--bwidth", config.bwidth, "objective smoothing bandwidth");
  fit->add_option("--pbwidth", config.pbwidth, "prediction smoothing bandwidth");
  fit->add_option("--seed", config.seed, "master RNG seed (default 0)");
  fit->add_option("--qcen", config.qcen,
                  "prefix for predicted censored quantile columns");
  fit->add_option("--pcen", config.pcen, "prefix for censoring probability columns");
  fit->add_option("--p1", config.p1, "prefix for P(depvar=1|x) columns");
  fit->add_option("--json", config.json_path, "write full-precision results here");
  fit->add_option("--out", config.out_csv,
                  "copy of the input CSV with prediction columns appended");
  fit->add_option("--test-homogeneity", config.homogeneity,
                  "Wald test that a covariate (or ALL) is constant across quantiles");
  fit->add_option("--test-symmetry", config.sym_deltas,
                  "deltas in (0,0.5) for the symmetry test")
      ->expected(-1);
  fit->add_option("--symmetry-mode", sym_mode, "perdelta or averaged (default)")
      ->check(CLI::IsMember({"perdelta", "averaged"}));

  auto* sim = app.add_subcommand("simulate",
                                 "Benchmark the estimators on simulated data");
  std::vector<double> sim_taus;
  sim->add_option("--dgp", config.dgp, "censored, pooled or binary")->required();
  sim->add_flag("--heter", config.heter, "heteroscedastic censored DGP");
  sim->add_option("--n", config.n, "sample size (default 2000)");
  sim->add_option("--taus", sim_taus, "quantiles (default 20 50 80)")->expected(-1);
  sim->add_option("--mc", config.mc, "Monte Carlo repetitions (default 10)");
  sim->add_option("--seed", config.seed, "master RNG seed (default 0)");
  sim->add_option("--out", config.out_csv, "benchmark table CSV path");
  sim->add_option("--json", config.json_path, "JSON summary path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    config.cmd = CliConfig::Cmd::Help;
    config.help_text = app.help();
    return config;
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  if (fit->parsed()) {
    config.cmd = CliConfig::Cmd::Fit;
    config.taus = normalize_taus(raw_taus.empty() ? std::vector<double>{50.0}
                                                  : raw_taus);
    if (config.ll && config.ul && !(*config.ll < *config.ul))
      throw usage_error("ll must be below ul");
    if (config.reps < 2) throw usage_error("reps must be at least 2");
    for (double d : config.sym_deltas)
      if (!(d > 0 && d < 0.5))
        throw usage_error("symmetry delta outside (0,0.5): " + std::to_string(d));
    config.sym_mode = sym_mode == "perdelta" ? SymmetryMode::PerDelta
                                             : SymmetryMode::Averaged;
    if ((!config.qcen.empty() || !config.pcen.empty() || !config.p1.empty()) &&
        config.out_csv.empty())
      throw usage_error("prediction prefixes need --out for the augmented CSV");
  } else if (sim->parsed()) {
    config.cmd = CliConfig::Cmd::Simulate;
    config.taus = normalize_taus(sim_taus.empty()
                                     ? std::vector<double>{20.0, 50.0, 80.0}
                                     : sim_taus);
    if (config.dgp != "censored" && config.dgp != "pooled" && config.dgp != "binary")
      throw usage_error("unknown dgp: " + config.dgp);
    if (config.mc < 1) throw usage_error("mc must be at least 1");
  } else {
    config.cmd = CliConfig::Cmd::Help;
    config.help_text = app.help();
  }
  return config;
}

namespace {

ModelSpec spec_from_config(const CliConfig& config, const VectorXd& y) {
  ModelSpec spec;
  spec.kind = detect_model_kind(y, config.ll, config.ul);
  if (config.ll) spec.c_L = *config.ll;
  if (config.ul) spec.c_H = *config.ul;
  spec.taus = config.taus;
  spec.reps = config.reps;
  spec.bwidth = config.bwidth;
  spec.pbwidth = config.pbwidth;
  spec.seed = config.seed;
  spec.validate();
  return spec;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  out << text;
}

}  // namespace

int run_fit(const CliConfig& config, std::ostream& out, std::ostream& err) {
  CsvTable table = read_csv_file(config.input);

  std::vector<std::pair<std::string, VectorXd>> columns;
  columns.emplace_back(config.depvar, table.numeric_column(config.depvar));
  for (const auto& c : config.covars)
    columns.emplace_back(c, table.numeric_column(c));

  Dataset d = build_dataset(columns, config.depvar, config.covars, true);
  for (const auto& w : d.warnings) err << "warning: " << w << '\n';
  if (d.dropped_rows > 0)
    err << "note: dropped " << d.dropped_rows
        << (d.dropped_rows == 1 ? " row" : " rows") << " with missing values\n";

  ModelSpec spec = spec_from_config(config, d.y);
  FitResult fit = fit_all(d, spec);

  json doc = fit_to_json(fit, config.depvar, d.warnings, d.dropped_rows);

  if (!config.homogeneity.empty())
    doc["tests"].push_back(test_to_json(
        "Homogeneity across quantiles: " + config.homogeneity,
        homogeneity_test(fit, config.homogeneity)));
  if (!config.sym_deltas.empty())
    doc["tests"].push_back(test_to_json(
        "Symmetry about the median",
        symmetry_test(fit, config.sym_deltas, config.sym_mode)));

  const bool want_preds =
      !config.qcen.empty() || !config.pcen.empty() || !config.p1.empty();
  if (want_preds) {
    if (spec.kind == ModelKind::Binary && (!config.qcen.empty() || !config.pcen.empty()))
      throw data_error("qcen/pcen predictions require a censored model");
    if (spec.kind != ModelKind::Binary && !config.p1.empty())
      throw data_error("p1 predictions require a binary model");
    if (!config.pcen.empty() && !std::isfinite(spec.c_L) && !std::isfinite(spec.c_H))
      throw data_error("pcen predictions require at least one censoring limit");
    PredictionSet preds = build_predictions(fit, d.X, config.qcen, config.pcen,
                                            config.p1, config.pbwidth);
    doc["predictions"] = predictions_to_json(preds);
    for (const auto& [name, values] : preds.columns)
      table.append_column(name, values, d.row_index);
    write_csv_file(config.out_csv, table);
  }

  out << render_fit_report(doc);
  out << render_tests(doc);
  if (doc.contains("predictions")) {
    out << "\nPrediction columns written to " << config.out_csv << " (pbw = "
        << format_sig7(doc["predictions"]["pbw"].get<double>())
        << ", quantile crossing fraction = "
        << format_sig7(doc["predictions"]["crossing_fraction"].get<double>())
        << ")\n";
  }

  if (!config.json_path.empty()) write_text_file(config.json_path, doc.dump(2) + "\n");

  if (!fit.all_converged()) {
    err << "error: optimizer did not converge for every quantile\n";
    return 4;
  }
  return 0;
}

int run_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  BenchmarkConfig bench;
  bench.n = config.n;
  bench.reps = config.mc;
  bench.taus = config.taus;
  bench.seed = config.seed;
  if (config.dgp == "censored")
    bench.dgps = {config.heter ? "censored-het" : "censored-hom"};
  else if (config.dgp == "pooled")
    bench.dgps = {"censored-pooled"};
  else
    bench.dgps = {"binary"};

  std::vector<BenchmarkRow> rows = run_benchmark(bench);

  out << "dgp              tau   estimator      truth        mean        bias       mc_se\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line << r.dgp << std::string(r.dgp.size() < 16 ? 16 - r.dgp.size() : 1, ' ')
         << format_sig7(r.tau) << "   " << r.estimator
         << std::string(r.estimator.size() < 12 ? 12 - r.estimator.size() : 1, ' ');
    auto cell = [](double v) {
      std::string s = std::isfinite(v) ? format_sig7(v) : std::string(".");
      return s.size() < 12 ? std::string(12 - s.size(), ' ') + s : s;
    };
    line << cell(r.truth) << cell(r.mean_estimate) << cell(r.bias) << cell(r.mc_se);
    out << line.str() << '\n';
  }

  if (!config.out_csv.empty()) write_text_file(config.out_csv, benchmark_csv(rows));
  if (!config.json_path.empty()) {
    json doc;
    doc["config"] = {{"n", bench.n},
                     {"reps", bench.reps},
                     {"taus", bench.taus},
                     {"seed", bench.seed},
                     {"dgps", bench.dgps}};
    json jrows = json::array();
    for (const auto& r : rows) {
      json jr;
      jr["dgp"] = r.dgp;
      jr["tau"] = r.tau;
      jr["estimator"] = r.estimator;
      jr["truth"] = std::isfinite(r.truth) ? json(r.truth) : json(nullptr);
      jr["mean_estimate"] = r.mean_estimate;
      jr["bias"] = std::isfinite(r.bias) ? json(r.bias) : json(nullptr);
      jr["mc_se"] = r.mc_se;
      jr["n"] = r.n;
      jr["reps"] = r.reps;
      jrows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(jrows);
    write_text_file(config.json_path, doc.dump(2) + "\n");
  }
  (void)err;
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CliConfig config;
  try {
    config = parse_cli(args);
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    switch (config.cmd) {
      case CliConfig::Cmd::Help:
        out << config.help_text;
        return 0;
      case CliConfig::Cmd::Fit:
        return run_fit(config, out, err);
      case CliConfig::Cmd::Simulate:
        return run_simulate(config, out, err);
    }
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const data_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const numeric_error& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace ldvqr
