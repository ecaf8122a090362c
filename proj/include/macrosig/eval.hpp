#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace macrosig::eval {

// Positive class is the recession label 1.
struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long total() const { return tp + fp + fn + tn; }
};

struct Metrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

ConfusionMatrix confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

// Accuracy/precision/recall/F1 with the zero-count conventions: precision 0
// when tp+fp = 0, recall 0 when tp+fn = 0, f1 = 0 when precision+recall = 0.
Metrics metrics(const ConfusionMatrix& cm);

// Fold index per row. Within each class: seeded shuffle then round-robin
// dealing, with a fold cursor running on across classes so overall fold
// sizes also differ by at most one.
std::vector<int> stratified_kfold(const Eigen::VectorXi& labels, int k,
                                  std::uint64_t seed);

struct CvResult {
  std::vector<Metrics> per_fold;
  Metrics mean;
  Metrics stddev;  // population (1/k) standard deviation
  std::vector<int> fold_assignment;
  std::vector<std::string> warnings;
};

CvResult summarize_folds(std::vector<Metrics> per_fold, std::vector<int> assignment,
                         std::vector<std::string> warnings);

}  // namespace macrosig::eval
