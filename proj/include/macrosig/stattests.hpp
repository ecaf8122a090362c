#pragma once

#include <Eigen/Dense>
#include <vector>

namespace macrosig::stats {

// Distribution tails. normal_cdf is accurate to ~1e-15 absolute; chi2_sf and
// f_sf to better than 1e-8 over the ranges the tests exercise.
double normal_cdf(double x);
double chi2_sf(double x, int df);
double f_sf(double x, int d1, int d2);

// Regularized incomplete gamma/beta, exposed for reuse by the test oracles.
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double beta_i(double a, double b, double x);

struct JarqueBeraResult {
  double statistic = 0;
  double p_value = 1;
  double skewness = 0;
  double excess_kurtosis = 0;
  double mean = 0;
  double std_dev = 0;
  double min = 0;
  double max = 0;
  int n = 0;
};

// JB = n/6 * (S^2 + K^2/4) with population (1/n) moments; p-value from the
// chi-square(2) upper tail.
JarqueBeraResult jarque_bera(const Eigen::VectorXd& values);

struct AdfResult {
  double statistic = 0;
  int chosen_lag = 0;
  bool stationary_at_5pct = false;
};

// Constant-only ADF regression, lag 0..max_lag chosen by AIC on a common
// sample, final statistic from a refit at the chosen lag. Decision uses the
// asymptotic 5% Dickey-Fuller critical value -2.86.
AdfResult adf_test(const Eigen::VectorXd& values, int max_lag);

struct ResetEntry {
  int power = 2;
  double f_statistic = 0;
  double p_value = 1;
};

struct ResetResult {
  std::vector<ResetEntry> entries;  // ascending power
};

// RESET on the linear auxiliary regression: for each max power m, augment
// the OLS fit with yhat^2..yhat^m and F-test the added coefficients jointly.
ResetResult reset_ramsey(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<int>& powers);

}  // namespace macrosig::stats
