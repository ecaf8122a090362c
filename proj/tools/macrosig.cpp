// macrosig command line: recession-signal toolkit.
//
// Subcommands: run, backcast, select, train, evaluate, test, report.
// Exit codes: 0 success, 2 configuration/usage error, 1 stage failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "macrosig/arima.hpp"
#include "macrosig/dataset.hpp"
#include "macrosig/errors.hpp"
#include "macrosig/featsel.hpp"
#include "macrosig/model_io.hpp"
#include "macrosig/models.hpp"
#include "macrosig/pipeline.hpp"
#include "macrosig/report.hpp"
#include "macrosig/stattests.hpp"

using Json = nlohmann::ordered_json;
using namespace macrosig;

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << content;
}

// Writes a set of monthly series back to CSV, empty cells for missing heads.
void save_series_csv(const std::vector<MonthlySeries>& series, const std::string& path) {
  if (series.empty()) throw Error("no series to write");
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  MonthDate start = series.front().start;
  int len = series.front().length();
  out << "date";
  for (const auto& s : series) out << ',' << s.name;
  out << '\n';
  for (int i = 0; i < len; ++i) {
    out << start.plus_months(i).to_string();
    for (const auto& s : series) {
      out << ',';
      if (!std::isnan(s.values[i])) out << format_double(s.values[i]);
    }
    out << '\n';
  }
}

Eigen::VectorXd column_values(const std::vector<MonthlySeries>& series,
                              const std::string& name) {
  for (const auto& s : series)
    if (s.name == name) return s.values.tail(s.observed());
  throw Error("column '" + name + "' not found");
}

int run_command(const std::string& config_path, std::uint64_t* seed_override,
                const std::string& output_override) {
  pipeline::PipelineConfig cfg = pipeline::load_config(config_path);
  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.split.seed = *seed_override;
    cfg.echo["seed"] = *seed_override;
  }
  if (!output_override.empty()) {
    cfg.output_dir = output_override;
    cfg.echo["output_dir"] = output_override;
  }
  pipeline::RunResult result = pipeline::run(cfg);
  std::cout << report::render_markdown(result.report);
  std::cout << "\nartifacts written to " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macrosig: recession nowcasting toolkit"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "execute the full pipeline from a config");
  std::string run_config, run_output;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  run_cmd->add_option("--config", run_config, "pipeline config JSON")->required();
  run_cmd->add_option("--seed", run_seed, "override the config seed")
      ->each([&](const std::string&) { run_seed_set = true; });
  run_cmd->add_option("--output", run_output, "override the output directory");

  // ---- backcast ----
  auto* bc_cmd = app.add_subcommand("backcast", "fill a missing head by ARIMA backcasting");
  std::string bc_input, bc_column, bc_output, bc_criterion = "aic";
  int bc_max_k = 3, bc_max_q = 3;
  bc_cmd->add_option("--input", bc_input)->required();
  bc_cmd->add_option("--column", bc_column)->required();
  bc_cmd->add_option("--max-k", bc_max_k);
  bc_cmd->add_option("--max-q", bc_max_q);
  bc_cmd->add_option("--criterion", bc_criterion)->check(CLI::IsMember({"aic", "bic"}));
  bc_cmd->add_option("--output", bc_output)->required();

  // ---- select ----
  auto* sel_cmd = app.add_subcommand("select", "Boruta + correlation pruning");
  std::string sel_input, sel_label = "Recession", sel_svg, sel_output;
  int sel_iterations = 100, sel_trees = 300, sel_threads = 1;
  double sel_threshold = 0.8, sel_alpha = 0.05;
  std::uint64_t sel_seed = 0;
  sel_cmd->add_option("--input", sel_input)->required();
  sel_cmd->add_option("--label", sel_label);
  sel_cmd->add_option("--iterations", sel_iterations);
  sel_cmd->add_option("--trees", sel_trees);
  sel_cmd->add_option("--alpha", sel_alpha);
  sel_cmd->add_option("--seed", sel_seed);
  sel_cmd->add_option("--threshold", sel_threshold);
  sel_cmd->add_option("--threads", sel_threads);
  sel_cmd->add_option("--svg", sel_svg, "write a correlation heatmap");
  sel_cmd->add_option("--output", sel_output, "write the JSON report here instead of stdout");

  // ---- train ----
  auto* tr_cmd = app.add_subcommand("train", "fit one model family on a panel CSV");
  std::string tr_input, tr_label = "Recession", tr_model, tr_output;
  std::uint64_t tr_seed = 0;
  int tr_ntrees = 500, tr_max_features = 0, tr_estimators = 500, tr_epochs = 2000;
  int tr_max_depth = 0, tr_cv_folds = 5;
  double tr_learning_rate = 0.01;
  tr_cmd->add_option("--input", tr_input)->required();
  tr_cmd->add_option("--label", tr_label);
  tr_cmd->add_option("--model", tr_model)
      ->required()
      ->check(CLI::IsMember({"probit", "logit", "elastic_net", "random_forest",
                             "gradient_boosting", "neural_network"}));
  tr_cmd->add_option("--output", tr_output)->required();
  tr_cmd->add_option("--seed", tr_seed);
  tr_cmd->add_option("--n-trees", tr_ntrees);
  tr_cmd->add_option("--max-features", tr_max_features);
  tr_cmd->add_option("--n-estimators", tr_estimators);
  tr_cmd->add_option("--learning-rate", tr_learning_rate);
  tr_cmd->add_option("--epochs", tr_epochs);
  tr_cmd->add_option("--max-depth", tr_max_depth);
  tr_cmd->add_option("--cv-folds", tr_cv_folds);

  // ---- evaluate ----
  auto* ev_cmd = app.add_subcommand("evaluate", "score a saved model on a test CSV");
  std::string ev_model, ev_test, ev_label = "Recession";
  bool ev_table = false;
  ev_cmd->add_option("--model", ev_model)->required();
  ev_cmd->add_option("--test", ev_test)->required();
  ev_cmd->add_option("--label", ev_label);
  ev_cmd->add_flag("--table", ev_table, "print a summary-table row instead of JSON");

  // ---- test ----
  auto* test_cmd = app.add_subcommand("test", "statistical tests on CSV columns");
  test_cmd->require_subcommand(1);
  auto* jb_cmd = test_cmd->add_subcommand("jb", "Jarque-Bera normality");
  std::string jb_input, jb_column;
  jb_cmd->add_option("--input", jb_input)->required();
  jb_cmd->add_option("--column", jb_column)->required();
  auto* adf_cmd = test_cmd->add_subcommand("adf", "augmented Dickey-Fuller");
  std::string adf_input, adf_column;
  int adf_max_lag = 12;
  adf_cmd->add_option("--input", adf_input)->required();
  adf_cmd->add_option("--column", adf_column)->required();
  adf_cmd->add_option("--max-lag", adf_max_lag);
  auto* rs_cmd = test_cmd->add_subcommand("reset", "RESET misspecification test");
  std::string rs_input, rs_label = "Recession";
  std::vector<int> rs_powers = {2, 3, 5};
  rs_cmd->add_option("--input", rs_input)->required();
  rs_cmd->add_option("--label", rs_label);
  rs_cmd->add_option("--powers", rs_powers);

  // ---- report ----
  auto* rp_cmd = app.add_subcommand("report", "re-emit report files from report.json");
  std::string rp_report, rp_output;
  rp_cmd->add_option("--report", rp_report)->required();
  rp_cmd->add_option("--output", rp_output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd)
      return run_command(run_config, run_seed_set ? &run_seed : nullptr, run_output);

    if (*bc_cmd) {
      std::vector<MonthlySeries> series = load_csv(bc_input);
      bool found = false;
      arima::FittedArima fitted;
      for (auto& s : series) {
        if (s.name != bc_column) continue;
        found = true;
        s = arima::backcast_head(
            s, bc_max_k, bc_max_q,
            bc_criterion == "aic" ? arima::Criterion::Aic : arima::Criterion::Bic,
            &fitted);
      }
      if (!found) throw ConfigError("column '" + bc_column + "' not found");
      save_series_csv(series, bc_output);
      Json sidecar;
      sidecar["column"] = bc_column;
      sidecar["order"] = Json{{"k", fitted.order.k}, {"d", fitted.order.d},
                              {"q", fitted.order.q}};
      Json ar = Json::array(), ma = Json::array();
      for (int i = 0; i < fitted.ar.size(); ++i) ar.push_back(fitted.ar[i]);
      for (int i = 0; i < fitted.ma.size(); ++i) ma.push_back(fitted.ma[i]);
      sidecar["ar"] = ar;
      sidecar["ma"] = ma;
      sidecar["intercept"] = fitted.intercept;
      sidecar["sigma2"] = fitted.sigma2;
      sidecar["n_observations"] = fitted.n_effective;
      sidecar["loglik"] = fitted.loglik;
      sidecar["aic"] = fitted.aic;
      sidecar["bic"] = fitted.bic;
      write_text_file(bc_output + ".json", sidecar.dump(2) + "\n");
      std::cout << sidecar.dump(2) << "\n";
      return 0;
    }

    if (*sel_cmd) {
      Panel panel = panel_from_csv(sel_input, sel_label);
      featsel::BorutaConfig cfg;
      cfg.n_iterations = sel_iterations;
      cfg.alpha = sel_alpha;
      cfg.n_trees = sel_trees;
      cfg.seed = sel_seed;
      cfg.n_threads = sel_threads;
      featsel::BorutaReport rep = featsel::boruta(panel, cfg);
      std::vector<std::string> confirmed = rep.confirmed();
      std::vector<std::string> selected =
          confirmed.empty() ? confirmed
                            : featsel::prune_correlated(panel, confirmed, sel_threshold);

      Json out;
      Json feats = Json::array();
      for (const auto& f : rep.features)
        feats.push_back(Json{
            {"name", f.name},
            {"decision", f.decision == featsel::BorutaDecision::Confirmed ? "confirmed"
                         : f.decision == featsel::BorutaDecision::Rejected ? "rejected"
                                                                           : "tentative"},
            {"hit_count", f.hit_count},
            {"p_value", f.p_value}});
      out["iterations"] = rep.iterations;
      out["features"] = std::move(feats);
      out["confirmed"] = confirmed;
      out["selected"] = selected;

      featsel::CorrelationMatrix cm = featsel::pairwise_pearson(panel, true);
      Json corr;
      corr["names"] = cm.names;
      Json rows = Json::array();
      for (int i = 0; i < cm.values.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < cm.values.cols(); ++j) row.push_back(cm.values(i, j));
        rows.push_back(std::move(row));
      }
      corr["values"] = std::move(rows);
      out["correlation"] = std::move(corr);
      if (!sel_svg.empty())
        write_text_file(sel_svg, report::svg_correlation(cm.names, cm.values));
      if (!sel_output.empty())
        write_text_file(sel_output, out.dump(2) + "\n");
      else
        std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*tr_cmd) {
      Panel panel = panel_from_csv(tr_input, tr_label);
      models::ModelSpec spec;
      if (tr_model == "probit") spec = models::ProbitSpec{};
      else if (tr_model == "logit") spec = models::LogitSpec{};
      else if (tr_model == "elastic_net") {
        models::EnetSpec s;
        s.cv_folds = tr_cv_folds;
        spec = s;
      } else if (tr_model == "random_forest") {
        models::ForestSpec s;
        s.n_trees = tr_ntrees;
        if (tr_max_features > 0) s.params.max_features = tr_max_features;
        if (tr_max_depth > 0) s.params.max_depth = tr_max_depth;
        spec = s;
      } else if (tr_model == "gradient_boosting") {
        models::GbmSpec s;
        s.learning_rate = tr_learning_rate;
        s.n_estimators = tr_estimators;
        if (tr_max_features > 0) s.params.max_features = tr_max_features;
        if (tr_max_depth > 0) s.params.max_depth = tr_max_depth;
        spec = s;
      } else {
        models::MlpSpec s;
        s.config.learning_rate = tr_learning_rate;
        s.config.epochs = tr_epochs;
        spec = s;
      }
      models::TrainedModel model =
          models::train_model(spec, panel.features, panel.label, panel.feature_names,
                              tr_seed);
      models::save_model(model, tr_output);
      std::cout << "wrote " << tr_output << "\n";
      return 0;
    }

    if (*ev_cmd) {
      models::TrainedModel model = models::load_model(ev_model);
      Panel panel = panel_from_csv(ev_test, ev_label);
      Panel ordered = panel.select_columns(model.feature_names);
      eval::ConfusionMatrix cm =
          eval::confusion(ordered.label, models::classify(model, ordered.features));
      eval::Metrics met = eval::metrics(cm);
      if (ev_table) {
        std::cout << "| Metric | " << model.family << " |\n|---|---|\n"
                  << "| Accuracy | " << report::pct2(met.accuracy) << "% |\n"
                  << "| F1 Score | " << report::pct2(met.f1) << "% |\n";
      } else {
        Json out;
        out["family"] = model.family;
        out["confusion"] = report::confusion_to_json(cm);
        out["metrics"] = report::metrics_to_json(met);
        out["accuracy_pct"] = report::pct2(met.accuracy);
        out["f1_pct"] = report::pct2(met.f1);
        std::cout << out.dump(2) << "\n";
      }
      return 0;
    }

    if (*jb_cmd) {
      auto v = column_values(load_csv(jb_input), jb_column);
      stats::JarqueBeraResult r = stats::jarque_bera(v);
      Json out{{"column", jb_column},     {"statistic", r.statistic},
               {"p_value", r.p_value},    {"skewness", r.skewness},
               {"excess_kurtosis", r.excess_kurtosis},
               {"mean", r.mean},          {"std", r.std_dev},
               {"min", r.min},            {"max", r.max},
               {"n", r.n}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*adf_cmd) {
      auto v = column_values(load_csv(adf_input), adf_column);
      stats::AdfResult r = stats::adf_test(v, adf_max_lag);
      Json out{{"column", adf_column},
               {"statistic", r.statistic},
               {"chosen_lag", r.chosen_lag},
               {"stationary_at_5pct", r.stationary_at_5pct}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*rs_cmd) {
      Panel panel = panel_from_csv(rs_input, rs_label);
      Eigen::MatrixXd X(panel.rows(), panel.cols() + 1);
      X.col(0).setOnes();
      X.rightCols(panel.cols()) = panel.features;
      stats::ResetResult r =
          stats::reset_ramsey(X, panel.label.cast<double>(), rs_powers);
      Json entries = Json::array();
      for (const auto& e : r.entries)
        entries.push_back(Json{{"power", e.power},
                               {"f_statistic", e.f_statistic},
                               {"p_value", e.p_value}});
      std::cout << Json{{"entries", entries}}.dump(2) << "\n";
      return 0;
    }

    if (*rp_cmd) {
      std::ifstream in(rp_report);
      if (!in) throw IoFailure("cannot open '" + rp_report + "'");
      Json rep = Json::parse(in);
      pipeline::emit_report_files(rep, rp_output);
      std::cout << "report files written to " << rp_output << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
