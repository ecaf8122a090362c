#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "macrosig/dataset.hpp"
#include "macrosig/ensembles.hpp"
#include "macrosig/eval.hpp"
#include "macrosig/linmodels.hpp"
#include "macrosig/neural.hpp"

namespace macrosig::models {

struct ProbitSpec {
  double tol = 1e-8;
  int max_iter = 100;
};
struct LogitSpec {
  double tol = 1e-8;
  int max_iter = 100;
};
struct EnetSpec {
  std::vector<double> lambda_grid;    // empty -> default_lambda_grid()
  std::vector<double> l1_ratio_grid;  // empty -> default_l1_ratio_grid()
  int cv_folds = 5;
};
struct ForestSpec {
  trees::CartParams params = trees::CartParams::forest_defaults();
  int n_trees = 500;
  int n_threads = 1;
};
struct GbmSpec {
  trees::CartParams params = trees::CartParams::boosting_defaults();
  double learning_rate = 0.01;
  int n_estimators = 500;
};
struct MlpSpec {
  nn::MlpConfig config;
};
// Test hook: `make` maps training data to a score function.
struct CustomSpec {
  std::function<std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>(
      const Eigen::MatrixXd&, const Eigen::VectorXi&)> make;
};

using ModelSpec =
    std::variant<ProbitSpec, LogitSpec, EnetSpec, ForestSpec, GbmSpec, MlpSpec, CustomSpec>;

std::vector<double> default_lambda_grid();
std::vector<double> default_l1_ratio_grid();
std::string family_name(const ModelSpec& spec);

struct CustomFit {
  std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> score;
};

// A fitted model plus the training-split standardization constants applied
// before every fit and prediction. `score` is a probability for every family
// except the elastic net, whose linear prediction is thresholded directly.
struct TrainedModel {
  std::string family;
  std::vector<std::string> feature_names;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;
  std::variant<lin::GlmFit, lin::EnetFit, trees::ForestFit, trees::GbmFit, nn::MlpFit,
               CustomFit> fit;
  lin::EnetCvResult enet_cv;  // populated for the elastic-net family
};

TrainedModel train_model(const ModelSpec& spec, const Eigen::MatrixXd& X,
                         const Eigen::VectorXi& y,
                         const std::vector<std::string>& feature_names,
                         std::uint64_t seed);

Eigen::VectorXd score(const TrainedModel& model, const Eigen::MatrixXd& X);
Eigen::VectorXi classify(const TrainedModel& model, const Eigen::MatrixXd& X,
                         double threshold = 0.5);

// Ranked importances where the family defines them (trees, boosting, enet);
// empty otherwise.
std::vector<std::pair<std::string, double>> importances(const TrainedModel& model);

}  // namespace macrosig::models

namespace macrosig::eval {

// Stratified CV over one model family: per fold the standardization constants
// come from that fold's training rows only, the model is fit there and
// scored on the held-out rows. (Lives with the model registry so the core
// metric helpers stay dependency-free.)
CvResult cross_validate(const models::ModelSpec& spec, const Panel& panel, int k,
                        std::uint64_t seed);

}  // namespace macrosig::eval
