#include "macrosig/ensembles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "macrosig/errors.hpp"
#include "macrosig/eval.hpp"

namespace macrosig::trees {

int Tree::depth() const {
  std::function<int(int)> walk = [&](int i) -> int {
    if (nodes[i].feature < 0) return 0;
    return 1 + std::max(walk(nodes[i].left), walk(nodes[i].right));
  };
  return nodes.empty() ? 0 : walk(0);
}

namespace {

// Node impurity over rows [lo, hi) of the workspace index array.
// Gini for 0/1 targets is 2p(1-p); variance is the mean squared deviation.
struct NodeStats {
  double sum = 0;
  double sum_sq = 0;
  int n = 0;

  double impurity(SplitCriterion c) const {
    double mean = sum / n;
    if (c == SplitCriterion::Gini) return 2.0 * mean * (1.0 - mean);
    return sum_sq / n - mean * mean;
  }
};

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double decrease = 0;
  int n_left = 0;
};

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const CartParams& params;
  rng::Engine& rng;
  Eigen::VectorXd* importances;
  int n_total;

  std::vector<TreeNode> nodes;
  std::vector<int> idx;                      // row indices, partitioned in place
  std::vector<std::pair<double, double>> scratch;  // (x, y) pairs for sorting

  int build(int lo, int hi, int depth) {
    const int n = hi - lo;
    NodeStats stats;
    for (int i = lo; i < hi; ++i) {
      double v = y[idx[i]];
      stats.sum += v;
      stats.sum_sq += v * v;
      stats.n += 1;
    }
    const double node_impurity = stats.impurity(params.criterion);

    int node_id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[node_id].value = stats.sum / n;

    if (depth >= params.max_depth || n < 2 * params.min_samples_leaf ||
        node_impurity <= 1e-15)
      return node_id;

    BestSplit best = find_split(lo, hi, stats, node_impurity);
    if (!best.found) return node_id;

    if (importances)
      (*importances)[best.feature] += best.decrease * n / n_total;

    // Partition rows by the chosen split, preserving relative order.
    std::stable_partition(idx.begin() + lo, idx.begin() + hi, [&](int r) {
      return X(r, best.feature) <= best.threshold;
    });

    int mid = lo + best.n_left;
    int left = build(lo, mid, depth + 1);
    int right = build(mid, hi, depth + 1);
    nodes[node_id].feature = best.feature;
    nodes[node_id].threshold = best.threshold;
    nodes[node_id].left = left;
    nodes[node_id].right = right;
    return node_id;
  }

  BestSplit find_split(int lo, int hi, const NodeStats& stats, double node_impurity) {
    const int p = static_cast<int>(X.cols());
    int mf = params.max_features;
    if (mf <= 0 || mf > p) mf = p;
    std::vector<int> candidates = rng::sample_without_replacement(rng, p, mf);
    std::sort(candidates.begin(), candidates.end());

    const int n = hi - lo;
    const int min_leaf = params.min_samples_leaf;
    BestSplit best;
    for (int f : candidates) {
      scratch.clear();
      for (int i = lo; i < hi; ++i) scratch.emplace_back(X(idx[i], f), y[idx[i]]);
      std::sort(scratch.begin(), scratch.end());

      double left_sum = 0, left_sq = 0;
      for (int i = 0; i + 1 < n; ++i) {
        double v = scratch[i].second;
        left_sum += v;
        left_sq += v * v;
        if (scratch[i].first == scratch[i + 1].first) continue;
        int nl = i + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;

        double lm = left_sum / nl, rm = (stats.sum - left_sum) / nr;
        double imp_l, imp_r;
        if (params.criterion == SplitCriterion::Gini) {
          imp_l = 2.0 * lm * (1.0 - lm);
          imp_r = 2.0 * rm * (1.0 - rm);
        } else {
          imp_l = left_sq / nl - lm * lm;
          imp_r = (stats.sum_sq - left_sq) / nr - rm * rm;
        }
        double decrease =
            node_impurity - (nl * imp_l + nr * imp_r) / n;
        if (decrease <= 1e-15) continue;
        double threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
        // Deterministic winner: larger decrease, then smaller feature index,
        // then smaller threshold.
        if (!best.found || decrease > best.decrease ||
            (decrease == best.decrease &&
             (f < best.feature || (f == best.feature && threshold < best.threshold)))) {
          best = {true, f, threshold, decrease, nl};
        }
      }
    }
    return best;
  }
};

void check_both_classes(const Eigen::VectorXi& y) {
  bool has0 = false, has1 = false;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] == 0) has0 = true;
    else if (y[i] == 1) has1 = true;
    else throw NonBinaryInput("label must be 0/1, got " + std::to_string(y[i]));
  }
  if (!has0 || !has1) throw SingleClassLabel("both classes must be present");
}

std::vector<std::string> default_names(int p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

void run_parallel(int n_jobs, int n_threads, const std::function<void(int)>& job) {
  n_threads = std::max(1, n_threads);
  if (n_threads == 1) {
    for (int b = 0; b < n_jobs; ++b) job(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    workers.emplace_back([&] {
      for (int b = next.fetch_add(1); b < n_jobs; b = next.fetch_add(1)) job(b);
    });
  for (auto& w : workers) w.join();
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Numerically stable mean binomial deviance 2/n * sum(softplus(F) - y F).
double mean_deviance(const Eigen::VectorXd& f, const Eigen::VectorXi& y) {
  double acc = 0;
  for (int i = 0; i < f.size(); ++i) {
    double z = f[i];
    acc += std::max(z, 0.0) - y[i] * z + std::log1p(std::exp(-std::fabs(z)));
  }
  return 2.0 * acc / f.size();
}

}  // namespace

Tree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const CartParams& params, rng::Engine& rng,
              Eigen::VectorXd* importances, const std::vector<int>* row_subset) {
  const int n = row_subset ? static_cast<int>(row_subset->size())
                           : static_cast<int>(X.rows());
  if (n == 0) throw EmptyData("fit_tree: no rows");

  TreeBuilder builder{X, y, params, rng, importances, n, {}, {}, {}};
  if (row_subset)
    builder.idx = *row_subset;
  else {
    builder.idx.resize(n);
    for (int i = 0; i < n; ++i) builder.idx[i] = i;
  }
  builder.build(0, n, 0);
  return Tree{std::move(builder.nodes)};
}

ForestFit fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                     const CartParams& params, int n_trees, std::uint64_t seed,
                     int n_threads, bool bootstrap,
                     std::vector<std::string> feature_names) {
  check_both_classes(y);
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());

  ForestFit fit;
  fit.params = params;
  fit.seed = seed;
  fit.feature_names = feature_names.empty() ? default_names(p) : std::move(feature_names);
  fit.trees.resize(n_trees);
  Eigen::VectorXd yd = y.cast<double>();

  std::vector<Eigen::VectorXd> per_tree_importance(n_trees, Eigen::VectorXd::Zero(p));
  run_parallel(n_trees, n_threads, [&](int b) {
    auto eng = rng::make_engine(rng::derive_seed(seed, static_cast<std::uint64_t>(b)));
    std::vector<int> rows(n);
    if (bootstrap)
      for (int i = 0; i < n; ++i) rows[i] = static_cast<int>(rng::next_index(eng, n));
    else
      for (int i = 0; i < n; ++i) rows[i] = i;
    fit.trees[b] = fit_tree(X, yd, params, eng, &per_tree_importance[b], &rows);
  });

  // Aggregate in tree order so the result is independent of scheduling.
  Eigen::VectorXd total = Eigen::VectorXd::Zero(p);
  for (int b = 0; b < n_trees; ++b) total += per_tree_importance[b];
  double s = total.sum();
  fit.importances = s > 0 ? (total / s).eval() : total;
  return fit;
}

Eigen::VectorXd predict_proba(const ForestFit& fit, const Eigen::MatrixXd& X) {
  Eigen::VectorXd proba = Eigen::VectorXd::Zero(X.rows());
  for (int i = 0; i < X.rows(); ++i) {
    double acc = 0;
    for (const Tree& t : fit.trees) acc += t.predict(X.row(i));
    proba[i] = acc / static_cast<double>(fit.trees.size());
  }
  return proba;
}

GbmFit fit_gbm(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
               double learning_rate, int n_estimators, CartParams params,
               std::uint64_t seed, std::vector<std::string> feature_names) {
  check_both_classes(y);
  if (learning_rate <= 0.0 || learning_rate > 1.0)
    throw Error("fit_gbm: learning_rate must be in (0, 1]");
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  params.criterion = SplitCriterion::Variance;

  GbmFit fit;
  fit.learning_rate = learning_rate;
  fit.params = params;
  fit.seed = seed;
  fit.feature_names = feature_names.empty() ? default_names(p) : std::move(feature_names);

  double prevalence = y.cast<double>().mean();
  fit.f0 = std::log(prevalence / (1.0 - prevalence));

  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, fit.f0);
  Eigen::VectorXd importance_total = Eigen::VectorXd::Zero(p);
  fit.trees.reserve(n_estimators);
  fit.train_deviance.reserve(n_estimators);

  Eigen::VectorXd residual(n), weight(n);
  for (int m = 0; m < n_estimators; ++m) {
    for (int i = 0; i < n; ++i) {
      double pi = sigmoid(f[i]);
      residual[i] = y[i] - pi;
      weight[i] = pi * (1.0 - pi);
    }

    auto eng = rng::make_engine(rng::derive_seed(seed, static_cast<std::uint64_t>(m)));
    Eigen::VectorXd stage_importance = Eigen::VectorXd::Zero(p);
    Tree tree = fit_tree(X, residual, params, eng, &stage_importance);

    // One-step Newton per leaf: sum(residual) / sum(p(1-p)), with a floor on
    // the curvature and a cap so a fully saturated leaf stays finite.
    std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      int leaf = tree.leaf_index(X.row(i));
      num[leaf] += residual[i];
      den[leaf] += weight[i];
    }
    for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
      if (tree.nodes[j].feature >= 0) continue;
      double v = num[j] / std::max(den[j], 1e-12);
      tree.nodes[j].value = std::clamp(v, -10.0, 10.0);
    }

    for (int i = 0; i < n; ++i)
      f[i] += learning_rate * tree.predict(X.row(i));
    importance_total += stage_importance;
    fit.trees.push_back(std::move(tree));
    fit.train_deviance.push_back(mean_deviance(f, y));
  }

  double s = importance_total.sum();
  fit.importances = s > 0 ? (importance_total / s).eval() : importance_total;
  return fit;
}

Eigen::VectorXd predict_proba(const GbmFit& fit, const Eigen::MatrixXd& X) {
  Eigen::VectorXd proba(X.rows());
  for (int i = 0; i < X.rows(); ++i) {
    double f = fit.f0;
    for (const Tree& t : fit.trees) f += fit.learning_rate * t.predict(X.row(i));
    proba[i] = sigmoid(f);
  }
  return proba;
}

std::pair<int, std::vector<double>> cv_max_features(
    const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
    const std::vector<int>& candidates, const CartParams& params, int n_trees,
    int k, std::uint64_t seed, int n_threads) {
  if (candidates.empty()) throw Error("cv_max_features: empty candidate list");
  const int p = static_cast<int>(X.cols());
  for (int m : candidates)
    if (m < 1 || m > p) throw Error("cv_max_features: candidate out of 1..p");

  std::vector<int> folds = eval::stratified_kfold(y, k, seed);
  std::vector<double> mean_loss(candidates.size(), 0.0);

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    CartParams cp = params;
    cp.max_features = candidates[ci];
    double loss_acc = 0;
    for (int fold = 0; fold < k; ++fold) {
      std::vector<int> train_rows, test_rows;
      for (int i = 0; i < y.size(); ++i)
        (folds[i] == fold ? test_rows : train_rows).push_back(i);

      Eigen::MatrixXd Xtr(train_rows.size(), p), Xte(test_rows.size(), p);
      Eigen::VectorXi ytr(train_rows.size()), yte(test_rows.size());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        Xtr.row(i) = X.row(train_rows[i]);
        ytr[i] = y[train_rows[i]];
      }
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        Xte.row(i) = X.row(test_rows[i]);
        yte[i] = y[test_rows[i]];
      }

      // Common random numbers across candidates: the per-fold seed ignores
      // the candidate index, so identical data yields identical bootstraps
      // and the loss curve compares like for like.
      std::uint64_t fold_seed = rng::derive_seed(seed, fold);
      ForestFit fit = fit_forest(Xtr, ytr, cp, n_trees, fold_seed, n_threads);
      Eigen::VectorXd proba = predict_proba(fit, Xte);
      loss_acc += (proba - yte.cast<double>()).squaredNorm() / proba.size();
    }
    mean_loss[ci] = loss_acc / k;
  }

  int best = 0;
  for (std::size_t ci = 1; ci < candidates.size(); ++ci) {
    bool better = mean_loss[ci] < mean_loss[best] ||
                  (mean_loss[ci] == mean_loss[best] && candidates[ci] < candidates[best]);
    if (better) best = static_cast<int>(ci);
  }
  return {candidates[best], mean_loss};
}

std::vector<std::pair<std::string, double>> tree_importances(
    const Eigen::VectorXd& importances, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(names.size());
  for (std::size_t j = 0; j < names.size(); ++j)
    out.emplace_back(names[j], importances[static_cast<int>(j)]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

Eigen::VectorXi classify(const Eigen::VectorXd& proba, double threshold) {
  Eigen::VectorXi out(proba.size());
  for (int i = 0; i < proba.size(); ++i) out[i] = proba[i] > threshold ? 1 : 0;
  return out;
}

}  // namespace macrosig::trees
