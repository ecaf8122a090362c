#include <doctest.h>

#include <cmath>

#include "macrosig/ensembles.hpp"
#include "macrosig/errors.hpp"
#include "oracles.hpp"

using namespace macrosig;
namespace rng = macrosig::rng;

namespace {

// Interleaved half-moons with Gaussian jitter; Bayes accuracy ~ 1.
struct Moons {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
};

Moons two_moons(std::uint64_t seed, int n, double noise = 0.12) {
  auto eng = rng::make_engine(seed);
  Moons m;
  m.X.resize(n, 2);
  m.y.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = rng::next_unit(eng) * 3.14159265358979;
    int cls = i % 2;
    double x0 = cls == 0 ? std::cos(t) : 1.0 - std::cos(t);
    double x1 = cls == 0 ? std::sin(t) : 0.5 - std::sin(t);
    m.X(i, 0) = x0 + noise * rng::next_normal(eng);
    m.X(i, 1) = x1 + noise * rng::next_normal(eng);
    m.y[i] = cls;
  }
  return m;
}

// 1-D data separable at zero: x < 0 -> 0, x >= 0 -> 1.
Moons separable_1d(std::uint64_t seed, int n) {
  auto eng = rng::make_engine(seed);
  Moons m;
  m.X.resize(n, 1);
  m.y.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = rng::next_normal(eng);
    while (std::fabs(x) < 1e-3) x = rng::next_normal(eng);
    m.X(i, 0) = x;
    m.y[i] = x >= 0 ? 1 : 0;
  }
  return m;
}

// Exhaustive brute-force best depth-1 split on 1-D data: every midpoint of
// consecutive sorted unique values, impurity recomputed from scratch.
std::pair<int, double> brute_force_stump(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& y,
                                         trees::SplitCriterion crit) {
  const int n = static_cast<int>(x.size());
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  auto impurity = [&](const std::vector<double>& vals) {
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    if (crit == trees::SplitCriterion::Gini) return 2.0 * mean * (1.0 - mean);
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    return var / vals.size();
  };

  std::vector<double> all(y.data(), y.data() + n);
  double parent = impurity(all);
  double best_dec = -1, best_thr = 0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    double thr = 0.5 * (sorted[i] + sorted[i + 1]);
    std::vector<double> left, right;
    for (int r = 0; r < n; ++r) (x[r] <= thr ? left : right).push_back(y[r]);
    double dec = parent - (left.size() * impurity(left) + right.size() * impurity(right)) / n;
    if (dec > best_dec) {
      best_dec = dec;
      best_thr = thr;
    }
  }
  return {best_dec > 0 ? 0 : -1, best_thr};
}

}  // namespace

TEST_CASE("fit_tree on a pure class is a single leaf") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(10);
  auto eng = rng::make_engine(1);
  trees::Tree t = trees::fit_tree(X, y, trees::CartParams::forest_defaults(), eng);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].feature == -1);
  CHECK(t.nodes[0].value == 1.0);
}

TEST_CASE("fit_tree separates 1-D threshold data at depth 1") {
  Moons m = separable_1d(5, 200);
  auto eng = rng::make_engine(2);
  trees::CartParams params = trees::CartParams::forest_defaults();
  trees::Tree t = trees::fit_tree(m.X, m.y.cast<double>(), params, eng);
  CHECK(t.depth() == 1);
  int correct = 0;
  for (int i = 0; i < m.X.rows(); ++i)
    correct += (t.predict(m.X.row(i)) > 0.5 ? 1 : 0) == m.y[i];
  CHECK(correct == 200);
}

TEST_CASE("fit_tree is deterministic given the rng state") {
  Moons m = two_moons(7, 100);
  trees::CartParams params = trees::CartParams::forest_defaults();
  std::vector<trees::Tree> fits;
  for (int rep = 0; rep < 5; ++rep) {
    auto eng = rng::make_engine(42);
    fits.push_back(trees::fit_tree(m.X, m.y.cast<double>(), params, eng));
  }
  for (int rep = 1; rep < 5; ++rep) {
    REQUIRE(fits[rep].nodes.size() == fits[0].nodes.size());
    for (std::size_t i = 0; i < fits[0].nodes.size(); ++i) {
      CHECK(fits[rep].nodes[i].feature == fits[0].nodes[i].feature);
      CHECK(fits[rep].nodes[i].threshold == fits[0].nodes[i].threshold);
      CHECK(fits[rep].nodes[i].value == fits[0].nodes[i].value);
    }
  }
}

TEST_CASE("depth-1 learned split equals the exhaustive oracle") {
  for (int seed = 0; seed < 10; ++seed) {
    Moons m = two_moons(100 + seed, 80);
    Eigen::MatrixXd X = m.X.col(0);
    trees::CartParams params;
    params.max_depth = 1;
    params.criterion = trees::SplitCriterion::Gini;
    auto eng = rng::make_engine(seed);
    trees::Tree t = trees::fit_tree(X, m.y.cast<double>(), params, eng);
    auto [feat, thr] = brute_force_stump(X.col(0), m.y.cast<double>(), params.criterion);
    REQUIRE(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == thr);
  }
}

TEST_CASE("forest of one tree without bootstrap equals fit_tree") {
  Moons m = two_moons(9, 120);
  trees::CartParams params = trees::CartParams::forest_defaults();
  params.max_features = 2;
  trees::ForestFit forest =
      trees::fit_forest(m.X, m.y, params, 1, 77, 1, /*bootstrap=*/false);

  auto eng = rng::make_engine(rng::derive_seed(77, 0));
  trees::Tree solo = trees::fit_tree(m.X, m.y.cast<double>(), params, eng);
  Eigen::VectorXd pf = trees::predict_proba(forest, m.X);
  for (int i = 0; i < m.X.rows(); ++i)
    CHECK(pf[i] == solo.predict(m.X.row(i)));
}

TEST_CASE("forest reaches 0.9 accuracy on held-out two-moons data") {
  double acc_sum = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Moons train = two_moons(200 + seed, 400);
    Moons test = two_moons(900 + seed, 200);
    trees::CartParams params = trees::CartParams::forest_defaults();
    params.max_features = 1;
    trees::ForestFit f = trees::fit_forest(train.X, train.y, params, 200, seed);
    Eigen::VectorXi pred = trees::classify(trees::predict_proba(f, test.X));
    int correct = 0;
    for (int i = 0; i < test.y.size(); ++i) correct += pred[i] == test.y[i];
    acc_sum += static_cast<double>(correct) / test.y.size();
  }
  CHECK(acc_sum / 10.0 >= 0.9);
}

TEST_CASE("planted informative feature dominates forest importances") {
  int top = 0;
  for (int seed = 0; seed < 10; ++seed) {
    auto eng = rng::make_engine(3000 + seed);
    const int n = 300, p = 10;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) X(i, j) = rng::next_normal(eng);
      y[i] = X(i, 0) > 0 ? 1 : 0;  // feature 0 is the signal
    }
    trees::CartParams params = trees::CartParams::forest_defaults();
    params.max_features = 3;
    trees::ForestFit f = trees::fit_forest(X, y, params, 100, seed);
    int argmax = 0;
    f.importances.maxCoeff(&argmax);
    if (argmax == 0) ++top;
  }
  CHECK(top >= 9);
}

TEST_CASE("forest predictions are bit-identical across 1, 2, 8 threads") {
  Moons m = two_moons(55, 300);
  trees::CartParams params = trees::CartParams::forest_defaults();
  params.max_features = 1;
  Eigen::VectorXd base;
  for (int threads : {1, 2, 8}) {
    trees::ForestFit f = trees::fit_forest(m.X, m.y, params, 64, 1234, threads);
    Eigen::VectorXd proba = trees::predict_proba(f, m.X);
    if (threads == 1) {
      base = proba;
      continue;
    }
    for (int i = 0; i < proba.size(); ++i) CHECK(proba[i] == base[i]);
  }
}

TEST_CASE("forest probabilities live in [0,1] and stabilize as B grows") {
  Moons m = two_moons(66, 200);
  Eigen::MatrixXd held(1, 2);
  held << 0.5, 0.25;  // ambiguous point between the moons
  trees::CartParams params = trees::CartParams::forest_defaults();
  params.max_features = 1;

  double prev_var = std::numeric_limits<double>::infinity();
  for (int B : {10, 100, 500}) {
    std::vector<double> preds;
    for (int seed = 0; seed < 20; ++seed) {
      trees::ForestFit f = trees::fit_forest(m.X, m.y, params, B, 4000 + seed);
      double pr = trees::predict_proba(f, held)[0];
      CHECK(pr >= 0.0);
      CHECK(pr <= 1.0);
      preds.push_back(pr);
    }
    double mean = 0;
    for (double p : preds) mean += p;
    mean /= preds.size();
    double var = 0;
    for (double p : preds) var += (p - mean) * (p - mean);
    var /= preds.size();
    CHECK(var <= prev_var);
    prev_var = var;
  }
}

TEST_CASE("cv_max_features plumbing") {
  Moons m = two_moons(77, 200);

  SUBCASE("single candidate is returned") {
    auto [best, losses] = trees::cv_max_features(m.X, m.y, {2},
                                                 trees::CartParams::forest_defaults(),
                                                 50, 5, 9);
    CHECK(best == 2);
    CHECK(losses.size() == 1);
  }

  SUBCASE("full candidate range returns a curve whose min is the winner") {
    auto eng = rng::make_engine(11);
    const int n = 240, p = 12;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) X(i, j) = rng::next_normal(eng);
      y[i] = X(i, 0) + 0.5 * X(i, 1) > 0 ? 1 : 0;
    }
    std::vector<int> candidates;
    for (int c = 1; c <= 12; ++c) candidates.push_back(c);
    auto [best, losses] = trees::cv_max_features(X, y, candidates,
                                                 trees::CartParams::forest_defaults(),
                                                 40, 5, 10);
    REQUIRE(losses.size() == 12);
    double min_loss = *std::min_element(losses.begin(), losses.end());
    CHECK(losses[best - 1] == min_loss);
  }

  SUBCASE("identical duplicated features give a flat curve and the smallest m") {
    Moons base = separable_1d(12, 150);
    Eigen::MatrixXd X(150, 4);
    for (int j = 0; j < 4; ++j) X.col(j) = base.X.col(0);
    auto [best, losses] = trees::cv_max_features(X, base.y, {1, 2, 3, 4},
                                                 trees::CartParams::forest_defaults(),
                                                 30, 5, 13);
    CHECK(best == 1);
    for (double l : losses) CHECK(l == losses[0]);
  }
}

TEST_CASE("gbm initial score is the prevalence log-odds") {
  Moons m = two_moons(88, 219);
  trees::GbmFit f = trees::fit_gbm(m.X, m.y, 0.1, 1);
  double prevalence = m.y.cast<double>().mean();
  CHECK(f.f0 == doctest::Approx(std::log(prevalence / (1 - prevalence))).epsilon(1e-12));
}

TEST_CASE("gbm with unit learning rate drives separable training accuracy to 1") {
  Moons m = separable_1d(99, 150);
  trees::CartParams params = trees::CartParams::boosting_defaults();
  params.max_features = 1;
  trees::GbmFit f = trees::fit_gbm(m.X, m.y, 1.0, 200, params, 3);
  Eigen::VectorXi pred = trees::classify(trees::predict_proba(f, m.X));
  for (int i = 0; i < m.y.size(); ++i) CHECK(pred[i] == m.y[i]);
}

TEST_CASE("gbm training deviance is non-increasing at small learning rates") {
  Moons m = two_moons(111, 250);
  trees::CartParams params = trees::CartParams::boosting_defaults();
  params.max_features = 2;
  trees::GbmFit f = trees::fit_gbm(m.X, m.y, 0.01, 500, params, 5);
  REQUIRE(f.train_deviance.size() == 500);
  for (std::size_t i = 1; i < f.train_deviance.size(); ++i)
    CHECK(f.train_deviance[i] <= f.train_deviance[i - 1] + 1e-12);
}

TEST_CASE("single-stump importances put weight 1 on the split feature") {
  Moons m = separable_1d(13, 100);
  Eigen::MatrixXd X(100, 3);
  X.col(0) = oracles::normal_vector(14, 100);
  X.col(1) = m.X.col(0);
  X.col(2) = oracles::normal_vector(15, 100);
  trees::CartParams params;
  params.max_depth = 1;
  params.max_features = 3;
  trees::ForestFit f = trees::fit_forest(X, m.y, params, 1, 0, 1, false);
  auto ranked = trees::tree_importances(f.importances, f.feature_names);
  CHECK(ranked[0].first == "x1");
  CHECK(ranked[0].second == doctest::Approx(1.0));
  CHECK(f.importances.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.importances.minCoeff() >= 0.0);
}

TEST_CASE("ensemble error paths") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXi ones = Eigen::VectorXi::Ones(10);
  CHECK_THROWS_AS(trees::fit_forest(X, ones, trees::CartParams::forest_defaults(), 10, 0),
                  SingleClassLabel);
  CHECK_THROWS_AS(trees::fit_gbm(X, ones, 0.1, 10), SingleClassLabel);

  Eigen::VectorXd empty_y;
  Eigen::MatrixXd empty_X(0, 2);
  auto eng = rng::make_engine(0);
  CHECK_THROWS_AS(trees::fit_tree(empty_X, empty_y, trees::CartParams::forest_defaults(), eng),
                  EmptyData);
}
