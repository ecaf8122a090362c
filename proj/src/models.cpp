#include "macrosig/models.hpp"

#include <cmath>

#include "macrosig/errors.hpp"
#include "macrosig/rng.hpp"

namespace macrosig::models {

std::vector<double> default_lambda_grid() {
  // 16 log-spaced values over 1e-4 .. 1.
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(std::pow(10.0, -4.0 + 4.0 * i / 15.0));
  return grid;
}

std::vector<double> default_l1_ratio_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::string family_name(const ModelSpec& spec) {
  struct Visitor {
    std::string operator()(const ProbitSpec&) const { return "probit"; }
    std::string operator()(const LogitSpec&) const { return "logit"; }
    std::string operator()(const EnetSpec&) const { return "elastic_net"; }
    std::string operator()(const ForestSpec&) const { return "random_forest"; }
    std::string operator()(const GbmSpec&) const { return "gradient_boosting"; }
    std::string operator()(const MlpSpec&) const { return "neural_network"; }
    std::string operator()(const CustomSpec&) const { return "custom"; }
  };
  return std::visit(Visitor{}, spec);
}

namespace {

void fit_standardization(const Eigen::MatrixXd& X, Eigen::VectorXd& means,
                         Eigen::VectorXd& sds) {
  const int p = static_cast<int>(X.cols());
  means.resize(p);
  sds.resize(p);
  for (int j = 0; j < p; ++j) {
    means[j] = X.col(j).mean();
    double var = (X.col(j).array() - means[j]).square().mean();
    sds[j] = var > 0 ? std::sqrt(var) : 1.0;
  }
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& means,
                                      const Eigen::VectorXd& sds) {
  Eigen::MatrixXd Z(X.rows(), X.cols());
  for (int j = 0; j < X.cols(); ++j)
    Z.col(j) = (X.col(j).array() - means[j]) / sds[j];
  return Z;
}

}  // namespace

TrainedModel train_model(const ModelSpec& spec, const Eigen::MatrixXd& X,
                         const Eigen::VectorXi& y,
                         const std::vector<std::string>& feature_names,
                         std::uint64_t seed) {
  TrainedModel model;
  model.family = family_name(spec);
  model.feature_names = feature_names;
  fit_standardization(X, model.means, model.sds);
  Eigen::MatrixXd Z = apply_standardization(X, model.means, model.sds);

  if (const auto* s = std::get_if<ProbitSpec>(&spec)) {
    model.fit = lin::fit_glm(Z, y, lin::GlmFamily::Probit, s->tol, s->max_iter);
  } else if (const auto* s = std::get_if<LogitSpec>(&spec)) {
    model.fit = lin::fit_glm(Z, y, lin::GlmFamily::Logit, s->tol, s->max_iter);
  } else if (const auto* s = std::get_if<EnetSpec>(&spec)) {
    auto lambdas = s->lambda_grid.empty() ? default_lambda_grid() : s->lambda_grid;
    auto ratios = s->l1_ratio_grid.empty() ? default_l1_ratio_grid() : s->l1_ratio_grid;
    model.enet_cv = lin::cv_elastic_net(Z, y.cast<double>(), lambdas, ratios,
                                        s->cv_folds, seed, feature_names);
    model.fit = model.enet_cv.refit;
  } else if (const auto* s = std::get_if<ForestSpec>(&spec)) {
    model.fit = trees::fit_forest(Z, y, s->params, s->n_trees, seed, s->n_threads,
                                  true, feature_names);
  } else if (const auto* s = std::get_if<GbmSpec>(&spec)) {
    model.fit = trees::fit_gbm(Z, y, s->learning_rate, s->n_estimators, s->params,
                               seed, feature_names);
  } else if (const auto* s = std::get_if<MlpSpec>(&spec)) {
    nn::MlpConfig cfg = s->config;
    cfg.seed = cfg.seed ^ seed;
    nn::MlpFit net = nn::init(cfg, static_cast<int>(X.cols()));
    model.fit = nn::train(net, Z, y, cfg);
  } else if (const auto* s = std::get_if<CustomSpec>(&spec)) {
    model.fit = CustomFit{s->make(Z, y)};
  }
  return model;
}

Eigen::VectorXd score(const TrainedModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.means.size())
    throw DimensionMismatch("score: expected " + std::to_string(model.means.size()) +
                            " features, got " + std::to_string(X.cols()));
  Eigen::MatrixXd Z = apply_standardization(X, model.means, model.sds);

  struct Visitor {
    const Eigen::MatrixXd& Z;
    Eigen::VectorXd operator()(const lin::GlmFit& f) const {
      return lin::predict_proba(f, Z);
    }
    Eigen::VectorXd operator()(const lin::EnetFit& f) const {
      return lin::predict_linear(f, Z);
    }
    Eigen::VectorXd operator()(const trees::ForestFit& f) const {
      return trees::predict_proba(f, Z);
    }
    Eigen::VectorXd operator()(const trees::GbmFit& f) const {
      return trees::predict_proba(f, Z);
    }
    Eigen::VectorXd operator()(const nn::MlpFit& f) const {
      Eigen::VectorXd logits = nn::forward(f, Z);
      Eigen::VectorXd p(logits.size());
      for (int i = 0; i < logits.size(); ++i)
        p[i] = logits[i] >= 0 ? 1.0 / (1.0 + std::exp(-logits[i]))
                              : std::exp(logits[i]) / (1.0 + std::exp(logits[i]));
      return p;
    }
    Eigen::VectorXd operator()(const CustomFit& f) const { return f.score(Z); }
  };
  return std::visit(Visitor{Z}, model.fit);
}

Eigen::VectorXi classify(const TrainedModel& model, const Eigen::MatrixXd& X,
                         double threshold) {
  Eigen::VectorXd s = score(model, X);
  Eigen::VectorXi out(s.size());
  for (int i = 0; i < s.size(); ++i) out[i] = s[i] > threshold ? 1 : 0;
  return out;
}

std::vector<std::pair<std::string, double>> importances(const TrainedModel& model) {
  if (const auto* f = std::get_if<trees::ForestFit>(&model.fit))
    return trees::tree_importances(f->importances, f->feature_names);
  if (const auto* f = std::get_if<trees::GbmFit>(&model.fit))
    return trees::tree_importances(f->importances, f->feature_names);
  if (const auto* f = std::get_if<lin::EnetFit>(&model.fit))
    return lin::enet_importance(*f);
  return {};
}

}  // namespace macrosig::models

namespace macrosig::eval {

CvResult cross_validate(const models::ModelSpec& spec, const Panel& panel, int k,
                        std::uint64_t seed) {
  std::vector<int> folds = stratified_kfold(panel.label, k, rng::derive_seed(seed, 0xf01d));

  std::vector<std::string> warnings;
  {
    int pos = 0;
    for (int i = 0; i < panel.label.size(); ++i) pos += panel.label[i];
    int neg = static_cast<int>(panel.label.size()) - pos;
    if (pos < k || neg < k)
      warnings.push_back("class count below k; folds cannot all contain both classes");
  }

  std::vector<Metrics> per_fold;
  per_fold.reserve(k);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<int> tr, te;
    for (int i = 0; i < panel.rows(); ++i) (folds[i] == fold ? te : tr).push_back(i);
    Panel train = panel.select_rows(tr);
    Panel test = panel.select_rows(te);
    try {
      models::TrainedModel m = models::train_model(
          spec, train.features, train.label, train.feature_names,
          rng::derive_seed(seed, 1 + fold));
      ConfusionMatrix cm = confusion(test.label, models::classify(m, test.features));
      per_fold.push_back(metrics(cm));
    } catch (const Error& e) {
      throw CvFoldError("fold " + std::to_string(fold) + ": " + e.what());
    }
  }
  return summarize_folds(std::move(per_fold), std::move(folds), std::move(warnings));
}

}  // namespace macrosig::eval
