#include "macrosig/model_io.hpp"

#include <fstream>

#include "macrosig/errors.hpp"

namespace macrosig::models {

namespace {

Json vec_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const Json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

Json mat_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const Json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j].get<double>();
  return m;
}

Json cart_params_to_json(const trees::CartParams& p) {
  return Json{{"max_depth", p.max_depth},
              {"min_samples_leaf", p.min_samples_leaf},
              {"max_features", p.max_features},
              {"criterion", p.criterion == trees::SplitCriterion::Gini ? "gini" : "variance"}};
}

trees::CartParams cart_params_from_json(const Json& j) {
  trees::CartParams p;
  p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.max_features = j.at("max_features").get<int>();
  p.criterion = j.at("criterion").get<std::string>() == "gini"
      ? trees::SplitCriterion::Gini
      : trees::SplitCriterion::Variance;
  return p;
}

}  // namespace

Json tree_to_json(const trees::Tree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  return nodes;
}

trees::Tree tree_from_json(const Json& j) {
  trees::Tree t;
  t.nodes.reserve(j.size());
  for (const auto& n : j)
    t.nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(),
                       n[3].get<int>(), n[4].get<double>()});
  return t;
}

Json model_to_json(const TrainedModel& model) {
  Json j;
  j["schema"] = "macrosig-model/1";
  j["family"] = model.family;
  j["feature_names"] = model.feature_names;
  j["standardization"] = Json{{"means", vec_to_json(model.means)},
                              {"sds", vec_to_json(model.sds)}};

  Json fit;
  if (const auto* f = std::get_if<lin::GlmFit>(&model.fit)) {
    fit["coefficients"] = vec_to_json(f->coefficients);
    fit["std_errors"] = vec_to_json(f->std_errors);
    fit["z_values"] = vec_to_json(f->z_values);
    fit["p_values"] = vec_to_json(f->p_values);
    fit["loglik"] = f->loglik;
    fit["loglik_null"] = f->loglik_null;
    fit["pseudo_r2"] = f->pseudo_r2;
    fit["llr_p_value"] = f->llr_p_value;
    fit["converged"] = f->converged;
    fit["n_obs"] = f->n_obs;
  } else if (const auto* f = std::get_if<lin::EnetFit>(&model.fit)) {
    fit["intercept"] = f->intercept;
    fit["coefficients"] = vec_to_json(f->coefficients);
    fit["lambda"] = f->lambda;
    fit["l1_ratio"] = f->l1_ratio;
    fit["n_iterations"] = f->n_iterations;
    fit["converged"] = f->converged;
    fit["feature_means"] = vec_to_json(f->feature_means);
    fit["feature_sds"] = vec_to_json(f->feature_sds);
    fit["feature_names"] = f->feature_names;
  } else if (const auto* f = std::get_if<trees::ForestFit>(&model.fit)) {
    fit["params"] = cart_params_to_json(f->params);
    fit["importances"] = vec_to_json(f->importances);
    fit["seed"] = f->seed;
    fit["feature_names"] = f->feature_names;
    Json ts = Json::array();
    for (const auto& t : f->trees) ts.push_back(tree_to_json(t));
    fit["trees"] = std::move(ts);
  } else if (const auto* f = std::get_if<trees::GbmFit>(&model.fit)) {
    fit["f0"] = f->f0;
    fit["learning_rate"] = f->learning_rate;
    fit["params"] = cart_params_to_json(f->params);
    fit["importances"] = vec_to_json(f->importances);
    fit["seed"] = f->seed;
    fit["feature_names"] = f->feature_names;
    fit["train_deviance"] = f->train_deviance;
    Json ts = Json::array();
    for (const auto& t : f->trees) ts.push_back(tree_to_json(t));
    fit["trees"] = std::move(ts);
  } else if (const auto* f = std::get_if<nn::MlpFit>(&model.fit)) {
    fit["layer_sizes"] = f->layer_sizes;
    Json ws = Json::array(), bs = Json::array();
    for (const auto& w : f->weights) ws.push_back(mat_to_json(w));
    for (const auto& b : f->biases) bs.push_back(vec_to_json(b));
    fit["weights"] = std::move(ws);
    fit["biases"] = std::move(bs);
    fit["loss_history"] = f->loss_history;
  } else {
    throw Error("model_to_json: custom models do not serialize");
  }
  j["fit"] = std::move(fit);
  return j;
}

TrainedModel model_from_json(const Json& j) {
  if (j.value("schema", "") != "macrosig-model/1")
    throw Error("model_from_json: unknown schema");

  TrainedModel model;
  model.family = j.at("family").get<std::string>();
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.means = vec_from_json(j.at("standardization").at("means"));
  model.sds = vec_from_json(j.at("standardization").at("sds"));

  const Json& fit = j.at("fit");
  if (model.family == "probit" || model.family == "logit") {
    lin::GlmFit f;
    f.family = model.family == "probit" ? lin::GlmFamily::Probit : lin::GlmFamily::Logit;
    f.coefficients = vec_from_json(fit.at("coefficients"));
    f.std_errors = vec_from_json(fit.at("std_errors"));
    f.z_values = vec_from_json(fit.at("z_values"));
    f.p_values = vec_from_json(fit.at("p_values"));
    f.loglik = fit.at("loglik").get<double>();
    f.loglik_null = fit.at("loglik_null").get<double>();
    f.pseudo_r2 = fit.at("pseudo_r2").get<double>();
    f.llr_p_value = fit.at("llr_p_value").get<double>();
    f.converged = fit.at("converged").get<bool>();
    f.n_obs = fit.at("n_obs").get<int>();
    model.fit = std::move(f);
  } else if (model.family == "elastic_net") {
    lin::EnetFit f;
    f.intercept = fit.at("intercept").get<double>();
    f.coefficients = vec_from_json(fit.at("coefficients"));
    f.lambda = fit.at("lambda").get<double>();
    f.l1_ratio = fit.at("l1_ratio").get<double>();
    f.n_iterations = fit.at("n_iterations").get<int>();
    f.converged = fit.at("converged").get<bool>();
    f.feature_means = vec_from_json(fit.at("feature_means"));
    f.feature_sds = vec_from_json(fit.at("feature_sds"));
    f.feature_names = fit.at("feature_names").get<std::vector<std::string>>();
    model.fit = std::move(f);
  } else if (model.family == "random_forest") {
    trees::ForestFit f;
    f.params = cart_params_from_json(fit.at("params"));
    f.importances = vec_from_json(fit.at("importances"));
    f.seed = fit.at("seed").get<std::uint64_t>();
    f.feature_names = fit.at("feature_names").get<std::vector<std::string>>();
    for (const auto& t : fit.at("trees")) f.trees.push_back(tree_from_json(t));
    model.fit = std::move(f);
  } else if (model.family == "gradient_boosting") {
    trees::GbmFit f;
    f.f0 = fit.at("f0").get<double>();
    f.learning_rate = fit.at("learning_rate").get<double>();
    f.params = cart_params_from_json(fit.at("params"));
    f.importances = vec_from_json(fit.at("importances"));
    f.seed = fit.at("seed").get<std::uint64_t>();
    f.feature_names = fit.at("feature_names").get<std::vector<std::string>>();
    f.train_deviance = fit.at("train_deviance").get<std::vector<double>>();
    for (const auto& t : fit.at("trees")) f.trees.push_back(tree_from_json(t));
    model.fit = std::move(f);
  } else if (model.family == "neural_network") {
    nn::MlpFit f;
    f.layer_sizes = fit.at("layer_sizes").get<std::vector<int>>();
    for (const auto& w : fit.at("weights")) f.weights.push_back(mat_from_json(w));
    for (const auto& b : fit.at("biases")) f.biases.push_back(vec_from_json(b));
    f.loss_history = fit.at("loss_history").get<std::vector<double>>();
    model.fit = std::move(f);
  } else {
    throw Error("model_from_json: unknown family '" + model.family + "'");
  }
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open '" + path + "'");
  Json j = Json::parse(in);
  return model_from_json(j);
}

}  // namespace macrosig::models
