#include <doctest.h>

#include <cmath>

#include "macrosig/arima.hpp"
#include "macrosig/errors.hpp"
#include "oracles.hpp"

using namespace macrosig;

TEST_CASE("difference arithmetic") {
  Eigen::VectorXd a(4);
  a << 1, 2, 3, 4;
  Eigen::VectorXd d1 = arima::difference(a, 1);
  REQUIRE(d1.size() == 3);
  CHECK(d1[0] == 1.0);
  CHECK(d1[1] == 1.0);
  CHECK(d1[2] == 1.0);

  Eigen::VectorXd sq(4);
  sq << 1, 4, 9, 16;
  Eigen::VectorXd d2 = arima::difference(sq, 2);
  REQUIRE(d2.size() == 2);
  CHECK(d2[0] == 2.0);
  CHECK(d2[1] == 2.0);

  CHECK(arima::difference(a, 0) == a);
  CHECK_THROWS_AS(arima::difference(Eigen::VectorXd::Ones(2), 2), TooShort);
}

TEST_CASE("fit (0,0,0) recovers mean and population variance exactly") {
  auto v = oracles::normal_vector(11, 500, 1.5, 2.0);
  auto f = arima::fit(v, {0, 0, 0});
  CHECK(f.mean_only);
  CHECK(std::fabs(f.intercept - v.mean()) < 1e-6);
  double var = (v.array() - v.mean()).square().mean();
  CHECK(std::fabs(f.sigma2 - var) < 1e-6);
  CHECK(f.n_effective == 500);
}

TEST_CASE("fit recovers AR(1) coefficients") {
  int ok = 0;
  for (int seed = 0; seed < 100; ++seed) {
    auto v = oracles::simulate_arma(900 + seed, 2000, 0.5, 0.0);
    auto f = arima::fit(v, {1, 0, 0});
    if (f.ar[0] >= 0.4 && f.ar[0] <= 0.6) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("fit recovers ARMA(1,1) coefficients") {
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto v = oracles::simulate_arma(1700 + seed, 2000, 0.5, 0.3);
    auto f = arima::fit(v, {1, 0, 1});
    if (std::fabs(f.ar[0] - 0.5) <= 0.1 && std::fabs(f.ma[0] - 0.3) <= 0.1) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("loglik never decreases when the order grows (nested models)") {
  auto v = oracles::simulate_arma(31, 800, 0.4, 0.2);
  // Same d and a common comparison through fit's own conditioning: compare
  // orders with equal k so the conditioning sample matches.
  auto base = arima::fit(v, {1, 0, 1});
  auto wider_q = arima::fit(v, {1, 0, 2});
  CHECK(wider_q.loglik >= base.loglik - 1e-6);

  auto base_k = arima::fit(v, {2, 0, 1});
  auto wider_k = arima::fit(v, {2, 0, 2});
  CHECK(wider_k.loglik >= base_k.loglik - 1e-6);
}

TEST_CASE("AIC and BIC recompute from (loglik, p, n) exactly") {
  auto v = oracles::simulate_arma(32, 600, 0.5, 0.3);
  for (auto order : {arima::ArimaOrder{1, 0, 1}, {2, 1, 0}, {0, 0, 2}}) {
    auto f = arima::fit(v, order);
    int p = order.k + order.q + 2;
    CHECK(f.aic == 2.0 * p - 2.0 * f.loglik);
    CHECK(f.bic == p * std::log(static_cast<double>(f.n_effective)) - 2.0 * f.loglik);
  }
}

TEST_CASE("fitted polynomials keep roots outside the unit circle") {
  for (int seed = 0; seed < 10; ++seed) {
    auto v = oracles::simulate_arma(500 + seed, 1000, 0.7, -0.4);
    auto f = arima::fit(v, {2, 0, 2});
    if (f.order.k > 0) CHECK(arima::min_root_modulus(f.ar, false) > 1.0 + 1e-6);
    if (f.order.q > 0) CHECK(arima::min_root_modulus(f.ma, true) > 1.0 + 1e-6);
  }
}

TEST_CASE("auto_fit chooses d = 0 on stationary simulations") {
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto v = oracles::simulate_arma(2100 + seed, 2000, 0.5, 0.3);
    if (arima::auto_fit(v, 1, 1).order.d == 0) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("auto_fit chooses d = 1 on random walks") {
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto v = oracles::random_walk(2400 + seed, 800);
    if (arima::auto_fit(v, 1, 1).order.d == 1) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("auto_fit with AIC recovers (1,1) against its underfits") {
  int ok = 0;
  for (int seed = 0; seed < 50; ++seed) {
    auto v = oracles::simulate_arma(2800 + seed, 2000, 0.5, 0.3);
    auto f = arima::auto_fit(v, 1, 1, arima::Criterion::Aic);
    if (f.order.k == 1 && f.order.d == 0 && f.order.q == 1) ++ok;
  }
  CHECK(ok >= 40);
}

TEST_CASE("auto_fit with BIC recovers (1,1) inside a (2,2) grid") {
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto v = oracles::simulate_arma(3300 + seed, 2000, 0.5, 0.3);
    auto f = arima::auto_fit(v, 2, 2, arima::Criterion::Bic);
    if (f.order.k == 1 && f.order.d == 0 && f.order.q == 1) ++ok;
  }
  CHECK(ok >= 16);
}

TEST_CASE("forecast of a mean model repeats the intercept") {
  arima::FittedArima m;
  m.order = {0, 0, 0};
  m.intercept = 2.5;
  m.mean_only = true;
  Eigen::VectorXd hist = oracles::normal_vector(3, 50);
  Eigen::VectorXd f = arima::forecast(m, hist, 4);
  for (int i = 0; i < 4; ++i) CHECK(f[i] == 2.5);
}

TEST_CASE("forecast AR(1) geometric recursion") {
  arima::FittedArima m;
  m.order = {1, 0, 0};
  m.ar.resize(1);
  m.ar[0] = 0.5;
  m.intercept = 0.0;
  Eigen::VectorXd hist(3);
  hist << 1, 2, 8;
  Eigen::VectorXd f = arima::forecast(m, hist, 3);
  CHECK(f[0] == 4.0);
  CHECK(f[1] == 2.0);
  CHECK(f[2] == 1.0);
}

TEST_CASE("forecast with d=1 mean model drifts by the intercept") {
  arima::FittedArima m;
  m.order = {0, 1, 0};
  m.intercept = 0.75;
  m.mean_only = true;
  Eigen::VectorXd hist(4);
  hist << 1, 2, 4, 10;
  Eigen::VectorXd f = arima::forecast(m, hist, 3);
  CHECK(f[0] == doctest::Approx(10.75));
  CHECK(f[1] == doctest::Approx(11.5));
  CHECK(f[2] == doctest::Approx(12.25));
}

namespace {

MonthlySeries series_with_head(std::uint64_t seed, int head, int observed,
                               double phi = 0.4, double theta = 0.2) {
  MonthlySeries s;
  s.name = "fixture";
  s.start = MonthDate{1986, 1};
  s.values.resize(head + observed);
  for (int i = 0; i < head; ++i) s.values[i] = std::numeric_limits<double>::quiet_NaN();
  s.values.tail(observed) = oracles::simulate_arma(seed, observed, phi, theta, 0.5);
  return s;
}

}  // namespace

TEST_CASE("backcast_head fills a 3-month head and keeps the tail bit-identical") {
  MonthlySeries s = series_with_head(71, 3, 435);
  Eigen::VectorXd tail_before = s.values.tail(435);
  MonthlySeries filled = arima::backcast_head(s, 2, 2);
  CHECK(filled.length() == 438);
  CHECK(filled.missing_head() == 0);
  for (int i = 0; i < 3; ++i) CHECK(std::isfinite(filled.values[i]));
  for (int i = 0; i < 435; ++i) CHECK(filled.values[3 + i] == tail_before[i]);
}

TEST_CASE("backcast_head fills an 18-month head to the full 438 length") {
  MonthlySeries s = series_with_head(72, 18, 420);
  MonthlySeries filled = arima::backcast_head(s, 2, 2);
  CHECK(filled.length() == 438);
  for (int i = 0; i < filled.length(); ++i) CHECK(std::isfinite(filled.values[i]));
}

TEST_CASE("backcast_head on a constant series fills with the constant") {
  MonthlySeries s;
  s.name = "const";
  s.start = MonthDate{1990, 1};
  s.values.resize(70);
  for (int i = 0; i < 5; ++i) s.values[i] = std::numeric_limits<double>::quiet_NaN();
  for (int i = 5; i < 70; ++i) s.values[i] = 3.25;
  MonthlySeries filled = arima::backcast_head(s, 2, 2);
  for (int i = 0; i < 5; ++i) CHECK(filled.values[i] == doctest::Approx(3.25).epsilon(1e-9));
}

TEST_CASE("backcast_head equals reverse(forecast(auto_fit(reverse(x))))") {
  MonthlySeries s = series_with_head(73, 5, 200);
  MonthlySeries filled = arima::backcast_head(s, 2, 2);

  Eigen::VectorXd rev = s.values.tail(200).reverse();
  auto model = arima::auto_fit(rev, 2, 2);
  Eigen::VectorXd fc = arima::forecast(model, rev, 5);
  for (int i = 0; i < 5; ++i) CHECK(filled.values[4 - i] == fc[i]);
}

TEST_CASE("backcast_head error paths") {
  MonthlySeries no_head = series_with_head(74, 0, 100);
  CHECK_THROWS_AS(arima::backcast_head(no_head, 2, 2), NoMissingHead);

  MonthlySeries tiny = series_with_head(75, 4, 40);
  CHECK_THROWS_AS(arima::backcast_head(tiny, 2, 2), TooFewObservations);
}
