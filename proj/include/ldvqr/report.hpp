#pragma once

#include "ldvqr/core.hpp"
#include "ldvqr/inference.hpp"
#include "ldvqr/predict.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace ldvqr {

/// 7 significant digits, the table precision.
std::string format_sig7(double v);

/// Full-precision JSON document for a fit; the printed report is rendered
/// from this document so the two can never disagree.
nlohmann::json fit_to_json(const FitResult& fit, const std::string& depvar,
                           const std::vector<std::string>& warnings,
                           long dropped_rows);

nlohmann::json test_to_json(const std::string& name, const WaldResult& wald);

nlohmann::json predictions_to_json(const PredictionSet& preds);

/// Header plus per-quantile coefficient table, rendered from the JSON doc.
std::string render_fit_report(const nlohmann::json& doc);

/// One block per entry of doc["tests"].
std::string render_tests(const nlohmann::json& doc);

}  // namespace ldvqr
