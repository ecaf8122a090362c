#include "macrosig/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "macrosig/arima.hpp"
#include "macrosig/model_io.hpp"
#include "macrosig/rng.hpp"
#include "macrosig/stattests.hpp"

namespace macrosig::pipeline {

namespace fs = std::filesystem;

namespace {

TransformKind parse_kind(const std::string& kind) {
  if (kind == "level") return TransformKind::Level;
  if (kind == "yoy_pct") return TransformKind::YoYPct;
  if (kind == "monthly_return_pct") return TransformKind::MonthlyReturnPct;
  if (kind == "first_diff") return TransformKind::FirstDiff;
  if (kind == "spread") return TransformKind::Spread;
  throw ConfigError("unknown transform kind '" + kind + "'");
}

std::string kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Level: return "level";
    case TransformKind::YoYPct: return "yoy_pct";
    case TransformKind::MonthlyReturnPct: return "monthly_return_pct";
    case TransformKind::FirstDiff: return "first_diff";
    case TransformKind::Spread: return "spread";
  }
  return "level";
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

struct StageGuard {
  // Rethrows library errors with the failing stage's name attached.
  template <typename Fn>
  static auto run(const std::string& stage, Fn&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError("stage '" + stage + "': " + e.what());
    }
  }
};

}  // namespace

PipelineConfig parse_config(const Json& doc) {
  PipelineConfig cfg;
  cfg.echo = doc;
  if (!doc.contains("input")) throw ConfigError("config requires 'input'");
  if (!doc.contains("label")) throw ConfigError("config requires 'label'");
  if (!doc.contains("seed")) throw ConfigError("config requires 'seed'");
  cfg.input = doc.at("input").get<std::string>();
  cfg.label = doc.at("label").get<std::string>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.output_dir = get_or<std::string>(doc, "output_dir", "macrosig_out");

  if (doc.contains("window")) {
    const Json& w = doc.at("window");
    cfg.window = MonthRange{MonthDate::parse(w.at("first").get<std::string>()),
                            MonthDate::parse(w.at("last").get<std::string>())};
    if (cfg.window->first > cfg.window->last)
      throw ConfigError("window first month is after the last month");
  }

  for (const Json& t : get_or<Json>(doc, "transforms", Json::array())) {
    TransformEntry entry;
    entry.spec.kind = parse_kind(t.at("kind").get<std::string>());
    if (entry.spec.kind == TransformKind::Spread) {
      entry.spec.minuend = t.at("minuend").get<std::string>();
      entry.spec.subtrahend = t.at("subtrahend").get<std::string>();
      entry.column = entry.spec.minuend;
      entry.name = get_or<std::string>(
          t, "name", entry.spec.minuend + "_minus_" + entry.spec.subtrahend);
    } else {
      entry.column = t.at("column").get<std::string>();
      entry.name = get_or<std::string>(t, "name", entry.column);
    }
    cfg.transforms.push_back(std::move(entry));
  }

  if (doc.contains("backcast")) {
    const Json& b = doc.at("backcast");
    cfg.backcast_max_k = get_or<int>(b, "max_k", 3);
    cfg.backcast_max_q = get_or<int>(b, "max_q", 3);
    std::string crit = get_or<std::string>(b, "criterion", "aic");
    if (crit != "aic" && crit != "bic")
      throw ConfigError("backcast criterion must be 'aic' or 'bic'");
    cfg.backcast_criterion = crit == "aic" ? arima::Criterion::Aic : arima::Criterion::Bic;
  }

  if (doc.contains("split")) {
    const Json& s = doc.at("split");
    cfg.split.train_fraction = get_or<double>(s, "train_fraction", 0.75);
    if (cfg.split.train_fraction <= 0.0 || cfg.split.train_fraction >= 1.0)
      throw ConfigError("split train_fraction must be in (0,1)");
    std::string mode = get_or<std::string>(s, "mode", "chronological");
    if (mode == "chronological")
      cfg.split.mode = SplitSpec::Mode::Chronological;
    else if (mode == "random")
      cfg.split.mode = SplitSpec::Mode::Random;
    else
      throw ConfigError("split mode must be 'chronological' or 'random'");
  }
  cfg.split.seed = cfg.seed;

  if (doc.contains("boruta")) {
    const Json& b = doc.at("boruta");
    cfg.boruta.n_iterations = get_or<int>(b, "iterations", 100);
    cfg.boruta.alpha = get_or<double>(b, "alpha", 0.05);
    cfg.boruta.n_trees = get_or<int>(b, "n_trees", 300);
    cfg.boruta.forest.max_depth = get_or<int>(b, "max_depth", 8);
    cfg.boruta.forest.min_samples_leaf = get_or<int>(b, "min_samples_leaf", 1);
    cfg.boruta.forest.max_features = get_or<int>(b, "max_features", 0);
  }

  cfg.correlation_threshold = get_or<double>(doc, "correlation_threshold", 0.8);
  cfg.reset_powers = get_or<std::vector<int>>(doc, "reset_powers", {2, 3, 5});
  cfg.cv_folds = get_or<int>(doc, "cv_folds", 0);
  cfg.n_threads = get_or<int>(doc, "n_threads", 1);
  cfg.boruta.n_threads = cfg.n_threads;

  const Json& m = get_or<Json>(doc, "models", Json::object());
  if (m.contains("probit")) {
    cfg.probit.tol = get_or<double>(m.at("probit"), "tol", 1e-8);
    cfg.probit.max_iter = get_or<int>(m.at("probit"), "max_iter", 100);
  }
  if (m.contains("logit")) {
    cfg.logit.tol = get_or<double>(m.at("logit"), "tol", 1e-8);
    cfg.logit.max_iter = get_or<int>(m.at("logit"), "max_iter", 100);
  }
  if (m.contains("elastic_net")) {
    const Json& e = m.at("elastic_net");
    cfg.elastic_net.lambda_grid = get_or<std::vector<double>>(e, "lambda_grid", {});
    cfg.elastic_net.l1_ratio_grid = get_or<std::vector<double>>(e, "l1_ratio_grid", {});
    cfg.elastic_net.cv_folds = get_or<int>(e, "cv_folds", 5);
  }
  if (m.contains("random_forest")) {
    const Json& f = m.at("random_forest");
    cfg.random_forest.n_trees = get_or<int>(f, "n_trees", 500);
    cfg.random_forest.params.max_depth = get_or<int>(f, "max_depth", 8);
    cfg.random_forest.params.min_samples_leaf = get_or<int>(f, "min_samples_leaf", 1);
    cfg.forest_max_features_candidates =
        get_or<std::vector<int>>(f, "max_features_candidates", {});
    cfg.forest_cv_trees = get_or<int>(f, "cv_trees", 200);
  }
  cfg.random_forest.n_threads = cfg.n_threads;
  if (m.contains("gradient_boosting")) {
    const Json& g = m.at("gradient_boosting");
    cfg.gradient_boosting.learning_rate = get_or<double>(g, "learning_rate", 0.01);
    cfg.gradient_boosting.n_estimators = get_or<int>(g, "n_estimators", 500);
    cfg.gradient_boosting.params.max_features = get_or<int>(g, "max_features", 6);
    cfg.gradient_boosting.params.max_depth = get_or<int>(g, "max_depth", 3);
    cfg.gradient_boosting.params.min_samples_leaf = get_or<int>(g, "min_samples_leaf", 5);
  }
  if (m.contains("neural_network")) {
    const Json& n = m.at("neural_network");
    cfg.neural_network.config.learning_rate = get_or<double>(n, "learning_rate", 0.01);
    cfg.neural_network.config.epochs = get_or<int>(n, "epochs", 2000);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

Json config_to_json(const PipelineConfig& cfg) {
  Json doc;
  doc["input"] = cfg.input;
  doc["label"] = cfg.label;
  doc["seed"] = cfg.seed;
  doc["output_dir"] = cfg.output_dir;
  if (cfg.window)
    doc["window"] = Json{{"first", cfg.window->first.to_string()},
                         {"last", cfg.window->last.to_string()}};
  Json ts = Json::array();
  for (const auto& t : cfg.transforms) {
    Json e{{"kind", kind_name(t.spec.kind)}, {"name", t.name}};
    if (t.spec.kind == TransformKind::Spread) {
      e["minuend"] = t.spec.minuend;
      e["subtrahend"] = t.spec.subtrahend;
    } else {
      e["column"] = t.column;
    }
    ts.push_back(std::move(e));
  }
  doc["transforms"] = std::move(ts);
  doc["backcast"] = Json{
      {"max_k", cfg.backcast_max_k},
      {"max_q", cfg.backcast_max_q},
      {"criterion", cfg.backcast_criterion == arima::Criterion::Aic ? "aic" : "bic"}};
  doc["split"] = Json{
      {"train_fraction", cfg.split.train_fraction},
      {"mode", cfg.split.mode == SplitSpec::Mode::Chronological ? "chronological"
                                                                : "random"}};
  doc["boruta"] = Json{{"iterations", cfg.boruta.n_iterations},
                       {"alpha", cfg.boruta.alpha},
                       {"n_trees", cfg.boruta.n_trees},
                       {"max_depth", cfg.boruta.forest.max_depth},
                       {"min_samples_leaf", cfg.boruta.forest.min_samples_leaf},
                       {"max_features", cfg.boruta.forest.max_features}};
  doc["correlation_threshold"] = cfg.correlation_threshold;
  doc["reset_powers"] = cfg.reset_powers;
  doc["cv_folds"] = cfg.cv_folds;
  doc["n_threads"] = cfg.n_threads;
  doc["models"] = Json{
      {"probit", Json{{"tol", cfg.probit.tol}, {"max_iter", cfg.probit.max_iter}}},
      {"logit", Json{{"tol", cfg.logit.tol}, {"max_iter", cfg.logit.max_iter}}},
      {"elastic_net", Json{{"lambda_grid", cfg.elastic_net.lambda_grid},
                           {"l1_ratio_grid", cfg.elastic_net.l1_ratio_grid},
                           {"cv_folds", cfg.elastic_net.cv_folds}}},
      {"random_forest",
       Json{{"n_trees", cfg.random_forest.n_trees},
            {"max_depth", cfg.random_forest.params.max_depth},
            {"min_samples_leaf", cfg.random_forest.params.min_samples_leaf},
            {"max_features_candidates", cfg.forest_max_features_candidates},
            {"cv_trees", cfg.forest_cv_trees}}},
      {"gradient_boosting",
       Json{{"learning_rate", cfg.gradient_boosting.learning_rate},
            {"n_estimators", cfg.gradient_boosting.n_estimators},
            {"max_features", cfg.gradient_boosting.params.max_features},
            {"max_depth", cfg.gradient_boosting.params.max_depth},
            {"min_samples_leaf", cfg.gradient_boosting.params.min_samples_leaf}}},
      {"neural_network", Json{{"learning_rate", cfg.neural_network.config.learning_rate},
                              {"epochs", cfg.neural_network.config.epochs}}}};
  return doc;
}

std::vector<MonthlySeries> backcast_stage(std::vector<MonthlySeries> series,
                                          const PipelineConfig& config, Json* record) {
  Json fills = Json::array();
  for (auto& s : series) {
    const int head = s.missing_head();
    if (head == 0) continue;
    // Normality check motivating the ARIMA repair over mean imputation;
    // recorded per repaired series.
    stats::JarqueBeraResult jb = stats::jarque_bera(s.values.tail(s.observed()));
    arima::FittedArima fitted;
    s = arima::backcast_head(s, config.backcast_max_k, config.backcast_max_q,
                             config.backcast_criterion, &fitted);
    if (record) {
      Json ar = Json::array(), ma = Json::array();
      for (int i = 0; i < fitted.ar.size(); ++i) ar.push_back(fitted.ar[i]);
      for (int i = 0; i < fitted.ma.size(); ++i) ma.push_back(fitted.ma[i]);
      fills.push_back(Json{
          {"series", s.name},
          {"filled", head},
          {"jarque_bera", Json{{"statistic", jb.statistic},
                               {"p_value", jb.p_value},
                               {"skewness", jb.skewness},
                               {"excess_kurtosis", jb.excess_kurtosis}}},
          {"order", Json{{"k", fitted.order.k}, {"d", fitted.order.d}, {"q", fitted.order.q}}},
          {"ar", std::move(ar)},
          {"ma", std::move(ma)},
          {"intercept", fitted.intercept},
          {"sigma2", fitted.sigma2},
          {"loglik", fitted.loglik},
          {"aic", fitted.aic},
          {"bic", fitted.bic},
          {"n_observations", fitted.n_effective}});
    }
  }
  if (record) *record = std::move(fills);
  return series;
}

namespace {

struct ModelRun {
  std::string family;
  std::string display;
  models::ModelSpec spec;
};

}  // namespace

RunResult run(const PipelineConfig& config) {
  // ---- validate against the input before writing anything ----
  std::vector<MonthlySeries> raw = StageGuard::run("load", [&] {
    return load_csv(config.input);
  });

  auto find_series = [&](const std::string& name) -> const MonthlySeries* {
    for (const auto& s : raw)
      if (s.name == name) return &s;
    return nullptr;
  };
  if (!find_series(config.label))
    throw ConfigError("label column '" + config.label + "' not found in '" +
                      config.input + "'");
  for (const auto& t : config.transforms) {
    if (!find_series(t.column))
      throw ConfigError("transform references unknown column '" + t.column + "'");
    if (t.spec.kind == TransformKind::Spread && !find_series(t.spec.subtrahend))
      throw ConfigError("transform references unknown column '" + t.spec.subtrahend + "'");
    if (t.name == config.label)
      throw ConfigError("transform output collides with the label column");
  }

  Json report;
  report["schema"] = "macrosig-report/1";
  report["seed"] = config.seed;
  report["config"] = config.echo.is_null() ? config_to_json(config) : config.echo;
  Json stages = Json::array();
  stages.push_back(Json{{"stage", "load"},
                        {"input", config.input},
                        {"columns", static_cast<int>(raw.size())},
                        {"rows", raw.empty() ? 0 : raw.front().length()}});

  // ---- backcast ----
  Json backcast_record;
  std::vector<MonthlySeries> repaired = StageGuard::run("backcast", [&] {
    const MonthlySeries* label = find_series(config.label);
    if (label->missing_head() > 0)
      throw Error("label column has a missing head");
    return backcast_stage(raw, config, &backcast_record);
  });
  stages.push_back(Json{{"stage", "backcast"},
                        {"max_k", config.backcast_max_k},
                        {"max_q", config.backcast_max_q},
                        {"fills", backcast_record}});

  // ---- transforms ----
  std::vector<MonthlySeries> transformed = StageGuard::run("transform", [&] {
    std::map<std::string, const MonthlySeries*> pool;
    for (const auto& s : repaired) pool[s.name] = &s;

    std::vector<MonthlySeries> out;
    std::vector<std::string> consumed;
    for (const auto& t : config.transforms) {
      if (t.spec.kind == TransformKind::Spread) {
        MonthlySeries s = spread(*pool.at(t.spec.minuend), *pool.at(t.spec.subtrahend),
                                 t.name);
        out.push_back(std::move(s));
      } else {
        MonthlySeries s = transform(*pool.at(t.column), t.spec);
        s.name = t.name;
        out.push_back(std::move(s));
        consumed.push_back(t.column);
      }
    }
    // Columns without an explicit transform pass through as levels.
    for (const auto& s : repaired) {
      if (s.name == config.label) continue;
      bool referenced = false;
      for (const auto& c : consumed) referenced |= c == s.name;
      for (const auto& o : out) referenced |= o.name == s.name;
      if (!referenced) out.push_back(s);
    }
    return out;
  });
  stages.push_back(Json{{"stage", "transform"},
                        {"configured", static_cast<int>(config.transforms.size())},
                        {"columns", static_cast<int>(transformed.size())}});

  // ---- align ----
  const MonthlySeries* label_series = find_series(config.label);
  Panel panel = StageGuard::run("align", [&] {
    MonthRange window;
    if (config.window) {
      window = *config.window;
    } else {
      MonthDate first = label_series->first_observed_date();
      MonthDate last = label_series->last_date();
      for (const auto& s : transformed) {
        first = std::max(first, s.first_observed_date());
        last = std::min(last, s.last_date());
      }
      window = MonthRange{first, last};
    }
    return align(transformed, *label_series, window);
  });
  stages.push_back(Json{{"stage", "align"},
                        {"rows", panel.rows()},
                        {"columns", panel.cols()},
                        {"first", panel.dates.front().to_string()},
                        {"last", panel.dates.back().to_string()}});

  // ---- select: Boruta, then correlation pruning ----
  featsel::BorutaConfig boruta_cfg = config.boruta;
  boruta_cfg.seed = rng::derive_seed(config.seed, 0xb0);
  featsel::BorutaReport boruta_report =
      StageGuard::run("select", [&] { return featsel::boruta(panel, boruta_cfg); });
  std::vector<std::string> confirmed = boruta_report.confirmed();
  if (confirmed.empty())
    throw StageError("stage 'select': Boruta confirmed no features");

  std::vector<std::string> selected = StageGuard::run("select", [&] {
    return featsel::prune_correlated(panel, confirmed, config.correlation_threshold);
  });
  featsel::CorrelationMatrix confirmed_corr = StageGuard::run("select", [&] {
    Panel sub = panel.select_columns(confirmed);
    return featsel::pairwise_pearson(sub, true);
  });

  Json selection;
  {
    Json feats = Json::array();
    for (const auto& f : boruta_report.features) {
      std::string decision = f.decision == featsel::BorutaDecision::Confirmed ? "confirmed"
          : f.decision == featsel::BorutaDecision::Rejected ? "rejected"
                                                            : "tentative";
      feats.push_back(Json{{"name", f.name},
                           {"decision", decision},
                           {"hit_count", f.hit_count},
                           {"p_value", f.p_value}});
    }
    Json corr;
    corr["names"] = confirmed_corr.names;
    Json rows = Json::array();
    for (int i = 0; i < confirmed_corr.values.rows(); ++i) {
      Json row = Json::array();
      for (int j = 0; j < confirmed_corr.values.cols(); ++j)
        row.push_back(confirmed_corr.values(i, j));
      rows.push_back(std::move(row));
    }
    corr["values"] = std::move(rows);

    std::vector<std::string> pruned;
    for (const auto& c : confirmed)
      if (std::find(selected.begin(), selected.end(), c) == selected.end())
        pruned.push_back(c);

    selection["boruta"] = std::move(feats);
    selection["iterations"] = boruta_report.iterations;
    selection["confirmed"] = confirmed;
    selection["pruned"] = pruned;
    selection["selected"] = selected;
    selection["correlation"] = std::move(corr);
  }
  report["selection"] = selection;
  stages.push_back(Json{{"stage", "select"},
                        {"confirmed", static_cast<int>(confirmed.size())},
                        {"selected", static_cast<int>(selected.size())},
                        {"threshold", config.correlation_threshold}});

  Panel selected_panel = panel.select_columns(selected);

  // ---- split ----
  SplitSpec split_spec = config.split;
  auto [train, test] = StageGuard::run("split", [&] { return split(selected_panel, split_spec); });
  stages.push_back(Json{{"stage", "split"},
                        {"train_rows", train.rows()},
                        {"test_rows", test.rows()},
                        {"mode", split_spec.mode == SplitSpec::Mode::Chronological
                                     ? "chronological"
                                     : "random"}});

  // ---- RESET misspecification check on the training design ----
  Json reset_record = Json::array();
  StageGuard::run("reset", [&] {
    Eigen::MatrixXd X(train.rows(), train.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(train.cols()) = train.features;
    stats::ResetResult rr =
        stats::reset_ramsey(X, train.label.cast<double>(), config.reset_powers);
    for (const auto& e : rr.entries)
      reset_record.push_back(Json{{"power", e.power},
                                  {"f_statistic", e.f_statistic},
                                  {"p_value", e.p_value}});
    return 0;
  });
  stages.push_back(Json{{"stage", "reset"}, {"entries", reset_record}});

  // ---- train and evaluate the six families ----
  models::ForestSpec forest_spec = config.random_forest;
  Json forest_cv;
  StageGuard::run("train", [&] {
    std::vector<int> candidates = config.forest_max_features_candidates;
    if (candidates.empty())
      for (int mf = 1; mf <= train.cols(); ++mf) candidates.push_back(mf);
    auto [best, losses] = trees::cv_max_features(
        train.features, train.label, candidates, forest_spec.params,
        config.forest_cv_trees, 5, rng::derive_seed(config.seed, 0xcf), config.n_threads);
    forest_spec.params.max_features = best;
    forest_cv["candidates"] = candidates;
    forest_cv["mean_mse"] = losses;
    forest_cv["best"] = best;
    return 0;
  });

  const std::vector<ModelRun> runs = {
      {"probit", "Probit", config.probit},
      {"logit", "Logit", config.logit},
      {"elastic_net", "Elastic Net", config.elastic_net},
      {"random_forest", "Random Forest", forest_spec},
      {"gradient_boosting", "Gradient Boosting", config.gradient_boosting},
      {"neural_network", "Neural Network", config.neural_network},
  };

  RunResult result;
  Json model_reports = Json::array();
  for (std::size_t mi = 0; mi < runs.size(); ++mi) {
    const ModelRun& mr = runs[mi];
    models::TrainedModel trained = StageGuard::run("train " + mr.family, [&] {
      return models::train_model(mr.spec, train.features, train.label,
                                 train.feature_names,
                                 rng::derive_seed(config.seed, 0x700 + mi));
    });

    Json entry;
    entry["family"] = mr.family;
    entry["display"] = mr.display;
    StageGuard::run("evaluate " + mr.family, [&] {
      eval::ConfusionMatrix cm =
          eval::confusion(test.label, models::classify(trained, test.features));
      eval::Metrics met = eval::metrics(cm);
      entry["confusion"] = report::confusion_to_json(cm);
      entry["metrics"] = report::metrics_to_json(met);
      entry["accuracy_pct"] = report::pct2(met.accuracy);
      entry["f1_pct"] = report::pct2(met.f1);
      return 0;
    });

    // Family diagnostics worth surfacing in the report.
    Json diag;
    if (const auto* f = std::get_if<lin::GlmFit>(&trained.fit)) {
      diag["loglik"] = f->loglik;
      diag["loglik_null"] = f->loglik_null;
      diag["pseudo_r2"] = f->pseudo_r2;
      diag["llr_p_value"] = f->llr_p_value;
      diag["converged"] = f->converged;
      diag["n_obs"] = f->n_obs;
    } else if (const auto* f = std::get_if<lin::EnetFit>(&trained.fit)) {
      diag["lambda"] = f->lambda;
      diag["l1_ratio"] = f->l1_ratio;
      diag["converged"] = f->converged;
    } else if (std::get_if<trees::ForestFit>(&trained.fit)) {
      diag["n_trees"] = config.random_forest.n_trees;
      diag["max_features"] = forest_spec.params.max_features;
      diag["max_features_cv"] = forest_cv;
    } else if (const auto* f = std::get_if<trees::GbmFit>(&trained.fit)) {
      diag["n_estimators"] = static_cast<int>(f->trees.size());
      diag["learning_rate"] = f->learning_rate;
      diag["final_deviance"] = f->train_deviance.back();
    } else if (const auto* f = std::get_if<nn::MlpFit>(&trained.fit)) {
      diag["layer_sizes"] = f->layer_sizes;
      diag["final_loss"] = f->loss_history.back();
      diag["epochs"] = static_cast<int>(f->loss_history.size());
    }
    entry["diagnostics"] = std::move(diag);

    Json imp = Json::array();
    for (const auto& [name, w] : models::importances(trained))
      imp.push_back(Json{{"feature", name}, {"weight", w}});
    entry["importances"] = std::move(imp);

    if (config.cv_folds >= 2) {
      eval::CvResult cv = StageGuard::run("cross-validate " + mr.family, [&] {
        return eval::cross_validate(mr.spec, selected_panel, config.cv_folds,
                                    rng::derive_seed(config.seed, 0xc0 + mi));
      });
      Json folds = Json::array();
      for (const auto& f : cv.per_fold) folds.push_back(report::metrics_to_json(f));
      entry["cv"] = Json{{"k", config.cv_folds},
                         {"per_fold", folds},
                         {"mean", report::metrics_to_json(cv.mean)},
                         {"stddev", report::metrics_to_json(cv.stddev)}};
    }

    model_reports.push_back(std::move(entry));
    result.trained.push_back(std::move(trained));
  }
  report["models"] = std::move(model_reports);

  // Table-5 style summary grid.
  {
    Json summary;
    Json cols = Json::array(), acc = Json::array(), f1 = Json::array();
    for (const auto& m : report["models"]) {
      cols.push_back(m.at("display"));
      acc.push_back(m.at("accuracy_pct"));
      f1.push_back(m.at("f1_pct"));
    }
    summary["columns"] = std::move(cols);
    summary["accuracy_pct"] = std::move(acc);
    summary["f1_pct"] = std::move(f1);
    report["summary"] = std::move(summary);
  }
  report["stages"] = std::move(stages);

  // ---- artifacts ----
  StageGuard::run("report", [&] {
    fs::create_directories(config.output_dir);
    fs::create_directories(config.output_dir + "/models");
    save_csv(panel, config.output_dir + "/panel.csv");
    save_csv(train, config.output_dir + "/train.csv");
    save_csv(test, config.output_dir + "/test.csv");
    for (std::size_t mi = 0; mi < runs.size(); ++mi)
      models::save_model(result.trained[mi],
                         config.output_dir + "/models/" + runs[mi].family + ".json");
    emit_report_files(report, config.output_dir);
    return 0;
  });

  result.report = std::move(report);
  result.panel = std::move(selected_panel);
  return result;
}

void emit_report_files(const Json& report, const std::string& output_dir) {
  fs::create_directories(output_dir);
  write_text(output_dir + "/report.json", report.dump(2) + "\n");
  write_text(output_dir + "/report.md", report::render_markdown(report));

  // Correlation heatmap of the Boruta-confirmed features.
  if (report.contains("selection")) {
    const Json& corr = report.at("selection").at("correlation");
    std::vector<std::string> names = corr.at("names").get<std::vector<std::string>>();
    Eigen::MatrixXd values(names.size(), names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = 0; j < names.size(); ++j)
        values(static_cast<int>(i), static_cast<int>(j)) =
            corr.at("values")[i][j].get<double>();
    write_text(output_dir + "/corr.svg", report::svg_correlation(names, values));
  }

  if (report.contains("models")) {
    for (const auto& m : report.at("models")) {
      if (!m.contains("importances") || m.at("importances").empty()) continue;
      std::vector<std::pair<std::string, double>> items;
      for (const auto& e : m.at("importances"))
        items.emplace_back(e.at("feature").get<std::string>(),
                           e.at("weight").get<double>());
      std::string family = m.at("family").get<std::string>();
      write_text(output_dir + "/importance_" + family + ".svg",
                 report::svg_importance(m.at("display").get<std::string>() +
                                            " variable importance",
                                        items));
    }
  }
}

}  // namespace macrosig::pipeline
