#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "macrosig/rng.hpp"

namespace macrosig::trees {

enum class SplitCriterion { Gini, Variance };

struct CartParams {
  int max_depth = 8;
  int min_samples_leaf = 1;
  int max_features = 0;  // <= 0 means all features
  SplitCriterion criterion = SplitCriterion::Gini;

  static CartParams forest_defaults() { return {8, 1, 0, SplitCriterion::Gini}; }
  static CartParams boosting_defaults() { return {3, 5, 6, SplitCriterion::Variance}; }
};

// Node record; feature == -1 marks a leaf. Rows route x[feature] <= threshold
// to the left child.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;  // class-1 fraction (classification) or mean target
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }
  // Leaf node index reached by x (used for boosting leaf updates).
  int leaf_index(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return i;
  }
  int depth() const;
};

// Greedy best-split CART over midpoints of consecutive sorted unique values.
// At each node max_features candidate features are drawn without replacement
// from rng; ties between splits break on (feature index, threshold).
// `importances`, when given, accumulates n_node * impurity_decrease per split.
Tree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const CartParams& params, rng::Engine& rng,
              Eigen::VectorXd* importances = nullptr,
              const std::vector<int>* row_subset = nullptr);

struct ForestFit {
  std::vector<Tree> trees;
  CartParams params;
  Eigen::VectorXd importances;  // nonnegative, sums to 1
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
};

// Bagged classification forest. Tree b trains on a bootstrap sample drawn
// from a generator derived only from (seed, b), so results are bit-identical
// for any n_threads. `bootstrap = false` is a test hook.
ForestFit fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                     const CartParams& params, int n_trees = 500,
                     std::uint64_t seed = 0, int n_threads = 1,
                     bool bootstrap = true,
                     std::vector<std::string> feature_names = {});

Eigen::VectorXd predict_proba(const ForestFit& fit, const Eigen::MatrixXd& X);

struct GbmFit {
  double f0 = 0;  // initial log-odds
  std::vector<Tree> trees;
  double learning_rate = 0.01;
  CartParams params;
  Eigen::VectorXd importances;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::vector<double> train_deviance;  // mean binomial deviance after each stage
};

// Binomial-deviance gradient boosting: F0 = prevalence log-odds, stages fit
// regression trees to y - sigmoid(F) and replace leaf values with the
// one-step Newton estimate sum(r) / sum(p(1-p)) over the leaf.
GbmFit fit_gbm(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
               double learning_rate = 0.01, int n_estimators = 500,
               CartParams params = CartParams::boosting_defaults(),
               std::uint64_t seed = 0, std::vector<std::string> feature_names = {});

Eigen::VectorXd predict_proba(const GbmFit& fit, const Eigen::MatrixXd& X);

// Stratified k-fold CV over candidate max_features values; loss is the MSE
// between predicted class-1 probability and the 0/1 label. Ties take the
// smaller candidate.
std::pair<int, std::vector<double>> cv_max_features(
    const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
    const std::vector<int>& candidates, const CartParams& params, int n_trees,
    int k = 5, std::uint64_t seed = 0, int n_threads = 1);

// Normalized impurity-decrease importances, descending, name tie-break.
std::vector<std::pair<std::string, double>> tree_importances(
    const Eigen::VectorXd& importances, const std::vector<std::string>& names);

Eigen::VectorXi classify(const Eigen::VectorXd& proba, double threshold = 0.5);

}  // namespace macrosig::trees
