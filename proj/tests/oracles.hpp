// Test-only oracles, independent of the library implementation paths they
// certify: long-double special functions (Taylor series / continued
// fraction / closed forms / quadrature) and seeded data-generating processes.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "macrosig/rng.hpp"

namespace oracles {

namespace rng = macrosig::rng;

constexpr long double kPi = 3.14159265358979323846264338327950288L;

// ---------------------------------------------------------------------------
// High-precision normal CDF: erf Taylor series for moderate arguments, Lentz
// continued fraction for erfc deep in the tail.
// ---------------------------------------------------------------------------

inline long double erf_series(long double z) {
  long double term = z, sum = z, z2 = z * z;
  for (int n = 1; n < 400; ++n) {
    term *= -z2 / n;
    long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-24L * std::fabs(sum)) break;
  }
  return sum * 2.0L / std::sqrt(kPi);
}

// Gauss continued fraction: erfc(z) = e^{-z^2}/sqrt(pi) *
// 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), solid for z >= 2.
inline long double erfc_cf(long double z) {
  const long double tiny = 1e-300L;
  long double c = 1.0L / tiny, d = 1.0L / z, h = d;
  for (int i = 1; i <= 600; ++i) {
    long double a = i / 2.0L;
    d = z + a * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = z + a / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    long double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0L) < 1e-21L) break;
  }
  return std::exp(-z * z) / std::sqrt(kPi) * h;
}

inline long double normal_cdf(long double x) {
  long double z = x / std::sqrt(2.0L);  // erf argument
  if (x < -5.0L) return 0.5L * erfc_cf(-z);
  if (x > 5.0L) return 1.0L - 0.5L * erfc_cf(z);
  return 0.5L * (1.0L + erf_series(z));
}

// ---------------------------------------------------------------------------
// chi-square upper tail. Even df has the elementary closed form
// Q = exp(-x/2) * sum_{j<df/2} (x/2)^j / j!; odd df climbs the recurrence
// Q(a+1,x) = Q(a,x) + x^a e^{-x} / Gamma(a+1) from Q(1/2,x) = erfc(sqrt(x)).
// ---------------------------------------------------------------------------

inline long double chi2_sf(long double x, int df) {
  if (x <= 0.0L) return 1.0L;
  long double h = x / 2.0L;
  if (df % 2 == 0) {
    long double term = 1.0L, sum = 1.0L;
    for (int j = 1; j < df / 2; ++j) {
      term *= h / j;
      sum += term;
    }
    return std::exp(-h) * sum;
  }
  long double r = std::sqrt(h);
  long double q = r > 2.0L ? erfc_cf(r) : 1.0L - erf_series(r);
  long double a = 0.5L;
  while (2 * a < df) {
    q += std::exp(a * std::log(h) - h - std::lgamma(a + 1.0L));
    a += 1.0L;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta from the hypergeometric power series
//   I_x(a,b) = x^a (1-x)^b / (a B(a,b)) * sum_n ((a+b)_n / (a+1)_n) x^n,
// switched through I_x(a,b) = 1 - I_{1-x}(b,a) where the series is slow.
// Yields the F upper tail via f_sf(x; d1, d2) = I_{d2/(d2+d1 x)}(d2/2, d1/2).
// ---------------------------------------------------------------------------

inline long double beta_inc_series(long double a, long double b, long double x) {
  if (x <= 0.0L) return 0.0L;
  if (x >= 1.0L) return 1.0L;
  if (x > (a + 1.0L) / (a + b + 2.0L))
    return 1.0L - beta_inc_series(b, a, 1.0L - x);
  long double log_front = a * std::log(x) + b * std::log1p(-x) - std::log(a) -
                          (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  long double term = 1.0L, sum = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + b + n) / (a + 1.0L + n) * x;
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return std::exp(log_front) * sum;
}

inline long double f_sf_series(long double x, int d1, int d2) {
  if (x <= 0.0L) return 1.0L;
  long double t = d2 / (d2 + static_cast<long double>(d1) * x);
  return beta_inc_series(d2 / 2.0L, d1 / 2.0L, t);
}

// ---------------------------------------------------------------------------
// Seeded data-generating processes.
// ---------------------------------------------------------------------------

inline Eigen::VectorXd normal_vector(std::uint64_t seed, int n, double mean = 0.0,
                                     double sd = 1.0) {
  auto eng = rng::make_engine(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = mean + sd * rng::next_normal(eng);
  return v;
}

inline Eigen::VectorXd exponential_vector(std::uint64_t seed, int n) {
  auto eng = rng::make_engine(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(rng::next_unit_open(eng));
  return v;
}

// ARMA(1,1) with a 200-step burn-in: x_t = c + phi x_{t-1} + e_t + theta e_{t-1}.
inline Eigen::VectorXd simulate_arma(std::uint64_t seed, int n, double phi,
                                     double theta, double intercept = 0.0) {
  auto eng = rng::make_engine(seed);
  Eigen::VectorXd v(n);
  double x = 0.0, e_prev = 0.0;
  for (int i = -200; i < n; ++i) {
    double e = rng::next_normal(eng);
    x = intercept + phi * x + e + theta * e_prev;
    e_prev = e;
    if (i >= 0) v[i] = x;
  }
  return v;
}

inline Eigen::VectorXd random_walk(std::uint64_t seed, int n) {
  auto eng = rng::make_engine(seed);
  Eigen::VectorXd v(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    x += rng::next_normal(eng);
    v[i] = x;
  }
  return v;
}

// Logistic DGP: X ~ N(0,1)^{n x p}, P(y=1) = sigmoid(intercept + X beta).
struct LogisticSample {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
};

inline LogisticSample logistic_dgp(std::uint64_t seed, int n,
                                   const Eigen::VectorXd& beta, double intercept) {
  auto eng = rng::make_engine(seed);
  LogisticSample s;
  s.X.resize(n, beta.size());
  s.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < beta.size(); ++j) s.X(i, j) = rng::next_normal(eng);
    double z = intercept + s.X.row(i).dot(beta);
    double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    s.y[i] = rng::next_unit(eng) < p ? 1 : 0;
  }
  return s;
}

}  // namespace oracles
