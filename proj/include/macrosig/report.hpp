#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "macrosig/eval.hpp"

namespace macrosig::report {

using Json = nlohmann::ordered_json;

// The report's canonical form is the JSON document; markdown and SVG render
// from it, so parse -> re-emit is byte-identical.

std::string render_markdown(const Json& report);

// Horizontal bar chart of (name, weight) pairs as standalone SVG.
std::string svg_importance(const std::string& title,
                           const std::vector<std::pair<std::string, double>>& items);

// Correlation heatmap (blue negative, white zero, red positive).
std::string svg_correlation(const std::vector<std::string>& names,
                            const Eigen::MatrixXd& values);

// Percentage with two decimals, Table-5 style ("96.33").
std::string pct2(double fraction);

Json metrics_to_json(const eval::Metrics& m);
Json confusion_to_json(const eval::ConfusionMatrix& cm);

}  // namespace macrosig::report
