#include "macrosig/eval.hpp"

#include <cmath>
#include <string>

#include "macrosig/errors.hpp"
#include "macrosig/rng.hpp"

namespace macrosig::eval {

ConfusionMatrix confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
  if (y_true.size() != y_pred.size())
    throw LengthMismatch("confusion: lengths " + std::to_string(y_true.size()) +
                         " vs " + std::to_string(y_pred.size()));
  if (y_true.size() < 1) throw LengthMismatch("confusion: empty input");

  ConfusionMatrix cm;
  for (int i = 0; i < y_true.size(); ++i) {
    int t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw NonBinaryInput("confusion: values must be 0/1, row " + std::to_string(i));
    if (t == 1 && p == 1) ++cm.tp;
    else if (t == 0 && p == 1) ++cm.fp;
    else if (t == 1 && p == 0) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix("metrics: empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();
  m.precision = cm.tp + cm.fp > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fp) : 0.0;
  m.recall = cm.tp + cm.fn > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
      ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
      : 0.0;
  return m;
}

std::vector<int> stratified_kfold(const Eigen::VectorXi& labels, int k,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (k < 2) throw Error("stratified_kfold: k must be >= 2");
  if (k > n) throw KTooLarge("stratified_kfold: k = " + std::to_string(k) +
                             " > n = " + std::to_string(n));

  std::vector<int> idx0, idx1;
  for (int i = 0; i < n; ++i) {
    if (labels[i] == 1)
      idx1.push_back(i);
    else if (labels[i] == 0)
      idx0.push_back(i);
    else
      throw NonBinaryInput("stratified_kfold: labels must be 0/1");
  }

  std::vector<int> fold(n, -1);
  int cursor = 0;
  int cls = 0;
  for (auto* idx : {&idx0, &idx1}) {
    auto eng = rng::make_engine(rng::derive_seed(seed, cls++));
    rng::shuffle(*idx, eng);
    for (int i : *idx) fold[i] = cursor++ % k;
  }
  return fold;
}

namespace {

Metrics accumulate(const std::vector<Metrics>& folds, bool stddev) {
  const double k = static_cast<double>(folds.size());
  Metrics mean{};
  for (const auto& m : folds) {
    mean.accuracy += m.accuracy / k;
    mean.precision += m.precision / k;
    mean.recall += m.recall / k;
    mean.f1 += m.f1 / k;
  }
  if (!stddev) return mean;
  Metrics var{};
  for (const auto& m : folds) {
    var.accuracy += (m.accuracy - mean.accuracy) * (m.accuracy - mean.accuracy) / k;
    var.precision += (m.precision - mean.precision) * (m.precision - mean.precision) / k;
    var.recall += (m.recall - mean.recall) * (m.recall - mean.recall) / k;
    var.f1 += (m.f1 - mean.f1) * (m.f1 - mean.f1) / k;
  }
  return Metrics{std::sqrt(var.accuracy), std::sqrt(var.precision),
                 std::sqrt(var.recall), std::sqrt(var.f1)};
}

}  // namespace

CvResult summarize_folds(std::vector<Metrics> per_fold, std::vector<int> assignment,
                         std::vector<std::string> warnings) {
  CvResult r;
  r.per_fold = std::move(per_fold);
  r.fold_assignment = std::move(assignment);
  r.warnings = std::move(warnings);
  r.mean = accumulate(r.per_fold, false);
  r.stddev = accumulate(r.per_fold, true);
  return r;
}

}  // namespace macrosig::eval
