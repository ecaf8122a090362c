#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macrosig/arima.hpp"
#include "macrosig/dataset.hpp"
#include "macrosig/featsel.hpp"
#include "macrosig/models.hpp"
#include "macrosig/report.hpp"

namespace macrosig::pipeline {

using Json = nlohmann::ordered_json;

struct TransformEntry {
  std::string name;   // output column (defaults to `column`)
  std::string column; // source column (minuend for spreads)
  TransformSpec spec;
};

struct PipelineConfig {
  std::string input;
  std::string label;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::optional<MonthRange> window;
  std::vector<TransformEntry> transforms;

  int backcast_max_k = 3;
  int backcast_max_q = 3;
  arima::Criterion backcast_criterion = arima::Criterion::Aic;

  SplitSpec split;
  featsel::BorutaConfig boruta;
  double correlation_threshold = 0.8;
  std::vector<int> reset_powers = {2, 3, 5};
  int cv_folds = 0;  // 0 disables the per-model CV block in the report
  int n_threads = 1;

  models::ProbitSpec probit;
  models::LogitSpec logit;
  models::EnetSpec elastic_net;
  models::ForestSpec random_forest;
  std::vector<int> forest_max_features_candidates;  // empty -> 1..p
  int forest_cv_trees = 200;
  models::GbmSpec gradient_boosting;
  models::MlpSpec neural_network;

  Json echo;  // raw config document, echoed into the report
};

// Parses and validates the JSON config document (see README for the schema).
// Throws ConfigError; never touches the filesystem.
PipelineConfig parse_config(const Json& doc);
PipelineConfig load_config(const std::string& path);
Json config_to_json(const PipelineConfig& config);

struct RunResult {
  Json report;                  // canonical report document
  Panel panel;                  // aligned full panel after selection stages
  std::vector<models::TrainedModel> trained;  // six models, fixed order
};

// Executes ingest -> backcast -> transform -> align -> select -> split ->
// train -> evaluate and writes every artifact under output_dir (panel CSVs,
// model JSONs, report.json/report.md, SVGs). Reruns with the same config are
// byte-identical. Throws ConfigError before anything is written, StageError
// afterwards.
RunResult run(const PipelineConfig& config);

// Stage-level entry points shared by run() and the CLI subcommands.
std::vector<MonthlySeries> backcast_stage(std::vector<MonthlySeries> series,
                                          const PipelineConfig& config,
                                          Json* record = nullptr);

void emit_report_files(const Json& report, const std::string& output_dir);

}  // namespace macrosig::pipeline
