#include "macrosig/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "macrosig/errors.hpp"

namespace macrosig::stats {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double beta_cf(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double beta_i(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

double f_sf(double x, int d1, int d2) {
  if (x <= 0.0) return 1.0;
  return beta_i(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
}

JarqueBeraResult jarque_bera(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  if (n < 8) throw TooFewObservations("jarque_bera needs n >= 8, got " + std::to_string(n));
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(values[i]))
      throw Error("jarque_bera: non-finite value at index " + std::to_string(i));

  JarqueBeraResult r;
  r.n = n;
  r.mean = values.mean();
  Eigen::VectorXd c = values.array() - r.mean;
  double m2 = c.array().square().mean();
  if (m2 <= 0.0) throw ZeroVariance("jarque_bera: zero variance");
  double m3 = c.array().cube().mean();
  double m4 = c.array().square().square().mean();
  r.std_dev = std::sqrt(m2);
  r.min = values.minCoeff();
  r.max = values.maxCoeff();
  r.skewness = m3 / std::pow(m2, 1.5);
  r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  r.statistic = n / 6.0 * (r.skewness * r.skewness +
                           0.25 * r.excess_kurtosis * r.excess_kurtosis);
  r.p_value = chi2_sf(r.statistic, 2);
  return r;
}

namespace {

struct OlsSolve {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  double rss = 0;
  Eigen::MatrixXd xtx_inv;
};

OlsSolve ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols())
    throw RankDeficientDesign("design has rank " + std::to_string(qr.rank()) +
                              " < " + std::to_string(X.cols()) + " columns");
  OlsSolve s;
  s.beta = qr.solve(y);
  s.residuals = y - X * s.beta;
  s.rss = s.residuals.squaredNorm();
  s.xtx_inv = (X.transpose() * X).inverse();
  return s;
}

}  // namespace

AdfResult adf_test(const Eigen::VectorXd& values, int max_lag) {
  const int n = static_cast<int>(values.size());
  if (max_lag < 0) max_lag = 0;
  if (n < max_lag + 10)
    throw TooFewObservations("adf_test needs n >= max_lag + 10");

  Eigen::VectorXd dx = values.tail(n - 1) - values.head(n - 1);

  // Regression at lag p over rows t = start..n-2 (0-based on dx):
  // dx[t] = c + gamma * x[t] + sum_i phi_i * dx[t-i].
  auto fit = [&](int p, int start, double* aic) -> double {
    const int rows = static_cast<int>(dx.size()) - start;
    Eigen::MatrixXd X(rows, p + 2);
    Eigen::VectorXd y(rows);
    for (int t = 0; t < rows; ++t) {
      int i = start + t;
      y[t] = dx[i];
      X(t, 0) = 1.0;
      X(t, 1) = values[i];  // level lagged one month relative to dx[i]
      for (int l = 1; l <= p; ++l) X(t, 1 + l) = dx[i - l];
    }
    OlsSolve s;
    try {
      s = ols_solve(X, y);
    } catch (const RankDeficientDesign&) {
      // Degenerate input (e.g. constant series): report a stationary-looking
      // zero statistic rather than failing the gate.
      if (aic) *aic = std::numeric_limits<double>::infinity();
      return 0.0;
    }
    double sigma2 = s.rss / rows;
    if (aic) *aic = rows * std::log(std::max(sigma2, 1e-280)) + 2.0 * (p + 2);
    double se = std::sqrt(std::max(s.rss / (rows - (p + 2)), 1e-280) * s.xtx_inv(1, 1));
    return s.beta[1] / se;
  };

  // Lag selection on the common sample, then refit at the chosen lag.
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_lag; ++p) {
    double aic;
    fit(p, max_lag, &aic);
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = p;
    }
  }

  AdfResult r;
  r.chosen_lag = best_lag;
  r.statistic = fit(best_lag, best_lag, nullptr);
  r.stationary_at_5pct = r.statistic < -2.86;
  return r;
}

ResetResult reset_ramsey(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<int>& powers) {
  std::vector<int> ps = powers;
  std::sort(ps.begin(), ps.end());
  if (ps.empty() || ps.front() < 2)
    throw Error("reset_ramsey: powers must be >= 2");
  if (std::adjacent_find(ps.begin(), ps.end()) != ps.end())
    throw Error("reset_ramsey: duplicate power");

  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  if (n <= k + static_cast<int>(ps.size()))
    throw TooFewObservations("reset_ramsey: too few rows for the requested powers");

  OlsSolve base = ols_solve(X, y);
  Eigen::VectorXd yhat = X * base.beta;
  // Scale fitted values to unit max magnitude so high powers stay conditioned.
  double scale = yhat.array().abs().maxCoeff();
  if (scale == 0.0) scale = 1.0;
  Eigen::VectorXd ys = yhat / scale;

  ResetResult result;
  for (int m : ps) {
    int q = m - 1;
    Eigen::MatrixXd Xa(n, k + q);
    Xa.leftCols(k) = X;
    for (int j = 0; j < q; ++j)
      Xa.col(k + j) = ys.array().pow(double(j + 2));
    OlsSolve aug = ols_solve(Xa, y);
    int df2 = n - (k + q);
    double f = ((base.rss - aug.rss) / q) / (aug.rss / df2);
    if (!(f >= 0.0)) f = 0.0;
    result.entries.push_back({m, f, f_sf(f, q, df2)});
  }
  return result;
}

}  // namespace macrosig::stats
