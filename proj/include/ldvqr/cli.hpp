#pragma once

#include "ldvqr/core.hpp"
#include "ldvqr/inference.hpp"

#include <iosfwd>

namespace ldvqr {

struct CliConfig {
  enum class Cmd { Fit, Simulate, Help };
  Cmd cmd = Cmd::Fit;
  std::string help_text;  // set when --help was requested

  // fit
  std::string input;
  std::string depvar;
  std::vector<std::string> covars;
  std::vector<double> taus;  // normalized to (0,1), sorted, unique
  std::optional<double> ll, ul, bwidth, pbwidth;
  int reps = 50;
  std::uint64_t seed = 0;
  std::string qcen, pcen, p1;
  std::string json_path, out_csv;
  std::string homogeneity;  // covariate name or "ALL"; empty = not requested
  std::vector<double> sym_deltas;
  SymmetryMode sym_mode = SymmetryMode::Averaged;

  // simulate
  std::string dgp = "censored";
  bool heter = false;
  std::size_t n = 2000;
  int mc = 10;
};

/// Quantile tokens: values >= 1 are percentages, smaller ones fractions.
/// Returns the sorted, de-duplicated list in (0,1).
std::vector<double> normalize_taus(const std::vector<double>& raw);

/// Parses argv (without the program name). Throws usage_error on bad input.
CliConfig parse_cli(const std::vector<std::string>& args);

int run_fit(const CliConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Dispatch plus exit-code mapping: 0 success, 2 usage, 3 data, 4 numerical.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ldvqr
