#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "macrosig/dataset.hpp"
#include "macrosig/ensembles.hpp"

namespace macrosig::featsel {

struct CorrelationMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // symmetric, unit diagonal, entries in [-1, 1]
};

// Pearson correlations across panel columns; the label is appended as the
// final column when include_label is set.
CorrelationMatrix pairwise_pearson(const Panel& panel, bool include_label);

struct BorutaConfig {
  int n_iterations = 100;
  double alpha = 0.05;
  trees::CartParams forest = trees::CartParams::forest_defaults();
  int n_trees = 300;
  std::uint64_t seed = 0;
  int n_threads = 1;
};

enum class BorutaDecision { Confirmed, Rejected, Tentative };

struct BorutaFeature {
  std::string name;
  BorutaDecision decision = BorutaDecision::Tentative;
  int hit_count = 0;
  double p_value = 1;  // two-sided binomial, before Bonferroni
  std::vector<double> importance_history;
};

struct BorutaReport {
  std::vector<BorutaFeature> features;  // panel column order
  std::vector<double> mzsa_history;
  int iterations = 0;

  std::vector<std::string> confirmed() const;
};

// Shadow-attribute Boruta: each iteration appends an independently permuted
// copy of every feature, fits a random forest on the augmented matrix and
// records a hit for features whose importance exceeds the maximum shadow
// importance (MZSA). Decisions come from a two-sided binomial test of the
// hit count against Binomial(iterations, 0.5), Bonferroni-corrected across
// features. Iterations run sequentially so the permutation stream is fixed;
// the forest inside an iteration may use n_threads.
BorutaReport boruta(const Panel& panel, const BorutaConfig& config);

// Greedy pruning: while any candidate pair has |r| above the threshold, drop
// from the worst pair the feature less correlated with the label (ties drop
// the lexicographically later name). Candidates are canonicalized by name,
// so the result ignores input order.
std::vector<std::string> prune_correlated(const Panel& panel,
                                          const std::vector<std::string>& candidates,
                                          double threshold = 0.8);

// Exact two-sided binomial tail for hits ~ Binomial(n, 0.5).
double binomial_two_sided_p(int hits, int n);

}  // namespace macrosig::featsel
