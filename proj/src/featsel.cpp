#include "macrosig/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "macrosig/errors.hpp"
#include "macrosig/rng.hpp"

namespace macrosig::featsel {

CorrelationMatrix pairwise_pearson(const Panel& panel, bool include_label) {
  const int n = panel.rows();
  const int p = panel.cols() + (include_label ? 1 : 0);

  Eigen::MatrixXd cols(n, p);
  CorrelationMatrix cm;
  cm.names = panel.feature_names;
  cols.leftCols(panel.cols()) = panel.features;
  if (include_label) {
    cols.col(p - 1) = panel.label.cast<double>();
    cm.names.push_back(panel.label_name);
  }

  Eigen::MatrixXd centered(n, p);
  Eigen::VectorXd norms(p);
  for (int j = 0; j < p; ++j) {
    centered.col(j) = cols.col(j).array() - cols.col(j).mean();
    norms[j] = centered.col(j).norm();
    if (norms[j] == 0.0)
      throw ZeroVarianceColumn("pairwise_pearson: column '" + cm.names[j] +
                               "' has zero variance");
  }

  cm.values.resize(p, p);
  for (int i = 0; i < p; ++i) {
    cm.values(i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) {
      double r = centered.col(i).dot(centered.col(j)) / (norms[i] * norms[j]);
      r = std::clamp(r, -1.0, 1.0);
      cm.values(i, j) = r;
      cm.values(j, i) = r;
    }
  }
  return cm;
}

double binomial_two_sided_p(int hits, int n) {
  // log C(n, i) - n log 2, summed over each tail.
  auto log_pmf = [n](int i) {
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
           n * std::numbers::ln2;
  };
  double upper = 0.0, lower = 0.0;
  for (int i = hits; i <= n; ++i) upper += std::exp(log_pmf(i));
  for (int i = 0; i <= hits; ++i) lower += std::exp(log_pmf(i));
  return std::min(1.0, 2.0 * std::min(upper, lower));
}

std::vector<std::string> BorutaReport::confirmed() const {
  std::vector<std::string> out;
  for (const auto& f : features)
    if (f.decision == BorutaDecision::Confirmed) out.push_back(f.name);
  return out;
}

BorutaReport boruta(const Panel& panel, const BorutaConfig& config) {
  const int n = panel.rows();
  const int p = panel.cols();
  if (p < 2) throw TooFewFeatures("boruta: need at least 2 features");
  if (config.n_iterations < 20) throw Error("boruta: n_iterations must be >= 20");
  if (config.alpha <= 0 || config.alpha >= 0.5)
    throw Error("boruta: alpha must be in (0, 0.5)");
  {
    bool has0 = false, has1 = false;
    for (int i = 0; i < n; ++i) (panel.label[i] ? has1 : has0) = true;
    if (!has0 || !has1) throw SingleClassLabel("boruta: both classes must be present");
  }

  BorutaReport report;
  report.iterations = config.n_iterations;
  report.features.resize(p);
  for (int j = 0; j < p; ++j) report.features[j].name = panel.feature_names[j];

  trees::CartParams params = config.forest;
  if (params.max_features <= 0)
    params.max_features = std::max(1, static_cast<int>(std::sqrt(2.0 * p)));

  Eigen::MatrixXd augmented(n, 2 * p);
  augmented.leftCols(p) = panel.features;
  std::vector<int> perm(n);

  auto stream = rng::make_engine(config.seed);
  for (int it = 0; it < config.n_iterations; ++it) {
    // Shadow columns: independent row permutations of each real feature.
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i) perm[i] = i;
      rng::shuffle(perm, stream);
      for (int i = 0; i < n; ++i) augmented(i, p + j) = panel.features(perm[i], j);
    }

    std::uint64_t forest_seed = rng::derive_seed(config.seed, 0x626f72 + it);
    trees::ForestFit forest = trees::fit_forest(augmented, panel.label, params,
                                                config.n_trees, forest_seed,
                                                config.n_threads);

    double mzsa = forest.importances.tail(p).maxCoeff();
    report.mzsa_history.push_back(mzsa);
    for (int j = 0; j < p; ++j) {
      double imp = forest.importances[j];
      report.features[j].importance_history.push_back(imp);
      if (imp > mzsa) ++report.features[j].hit_count;
    }
  }

  const double cutoff = config.alpha / p;  // Bonferroni across features
  for (auto& f : report.features) {
    f.p_value = binomial_two_sided_p(f.hit_count, config.n_iterations);
    if (f.p_value < cutoff)
      f.decision = 2 * f.hit_count > config.n_iterations ? BorutaDecision::Confirmed
                                                         : BorutaDecision::Rejected;
    else
      f.decision = BorutaDecision::Tentative;
  }
  return report;
}

std::vector<std::string> prune_correlated(const Panel& panel,
                                          const std::vector<std::string>& candidates,
                                          double threshold) {
  std::vector<std::string> names = candidates;
  std::sort(names.begin(), names.end());
  for (const auto& name : names)
    if (panel.column_index(name) < 0)
      throw Error("prune_correlated: unknown feature '" + name + "'");

  Panel sub = panel.select_columns(names);
  CorrelationMatrix cm = pairwise_pearson(sub, true);
  const int p = static_cast<int>(names.size());
  Eigen::VectorXd label_corr(p);
  for (int j = 0; j < p; ++j) label_corr[j] = std::fabs(cm.values(j, p));

  std::vector<bool> alive(p, true);
  while (true) {
    int bi = -1, bj = -1;
    double worst = threshold;
    for (int i = 0; i < p; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < p; ++j) {
        if (!alive[j]) continue;
        if (std::fabs(cm.values(i, j)) > worst) {
          worst = std::fabs(cm.values(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    // Drop the pair member less correlated with the label; ties drop the
    // lexicographically later name (bj, since names are sorted).
    int drop = label_corr[bi] < label_corr[bj] ? bi
             : label_corr[bj] < label_corr[bi] ? bj
                                               : bj;
    alive[drop] = false;
  }

  std::vector<std::string> out;
  for (int j = 0; j < p; ++j)
    if (alive[j]) out.push_back(names[j]);
  return out;
}

}  // namespace macrosig::featsel
