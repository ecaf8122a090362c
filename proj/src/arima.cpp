#include "macrosig/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "macrosig/errors.hpp"
#include "macrosig/stattests.hpp"

namespace macrosig::arima {

namespace {

constexpr double kPacfBound = 0.995;  // keeps polynomial roots off the unit circle
constexpr double kRssFloor = 1e-280;
constexpr double kGradTol = 1e-8;
constexpr int kMaxIterations = 500;

// Durbin-Levinson: partial autocorrelations -> stationary AR coefficients.
Eigen::VectorXd pacf_to_ar(const Eigen::VectorXd& pacf) {
  const int k = static_cast<int>(pacf.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j) {
    double a = pacf[j];
    Eigen::VectorXd prev = phi.head(j).eval();
    for (int i = 0; i < j; ++i) phi[i] = prev[i] - a * prev[j - 1 - i];
    phi[j] = a;
  }
  return phi;
}

struct ParamMap {
  int k, q;

  int dim() const { return 1 + k + q; }

  // theta = (intercept, r_ar.., r_ma..) with r unconstrained.
  void decode(const Eigen::VectorXd& theta, double& c, Eigen::VectorXd& ar,
              Eigen::VectorXd& ma) const {
    c = theta[0];
    Eigen::VectorXd pa(k), pm(q);
    for (int i = 0; i < k; ++i) pa[i] = kPacfBound * std::tanh(theta[1 + i]);
    for (int j = 0; j < q; ++j) pm[j] = kPacfBound * std::tanh(theta[1 + k + j]);
    ar = pacf_to_ar(pa);
    // Invertible MA: 1 + sum b_i z^i has roots outside the unit circle exactly
    // when -b is a stationary AR vector.
    ma = -pacf_to_ar(pm);
  }
};

// Conditional sum of squares: residuals start at t = cond (>= k), with
// pre-window residuals treated as zero. A common `cond` across candidate
// orders makes their likelihoods comparable during order selection.
double css_rss(const Eigen::VectorXd& w, double c, const Eigen::VectorXd& ar,
               const Eigen::VectorXd& ma, int cond) {
  const int n = static_cast<int>(w.size());
  const int k = static_cast<int>(ar.size());
  const int q = static_cast<int>(ma.size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  double rss = 0.0;
  for (int t = cond; t < n; ++t) {
    double pred = c;
    for (int i = 0; i < k; ++i) pred += ar[i] * w[t - 1 - i];
    for (int j = 0; j < q; ++j) pred += (t - 1 - j >= cond) ? ma[j] * e[t - 1 - j] : 0.0;
    e[t] = w[t] - pred;
    rss += e[t] * e[t];
  }
  return rss;
}

struct Objective {
  const Eigen::VectorXd& w;
  ParamMap map;
  int cond;
  int n_eff;

  double operator()(const Eigen::VectorXd& theta) const {
    double c;
    Eigen::VectorXd ar, ma;
    map.decode(theta, c, ar, ma);
    double rss = css_rss(w, c, ar, ma, cond);
    if (!std::isfinite(rss)) return std::numeric_limits<double>::infinity();
    return 0.5 * n_eff * std::log(std::max(rss, kRssFloor) / n_eff);
  }
};

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd g(d), xp = x;
  for (int i = 0; i < d; ++i) {
    double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
    xp[i] = x[i] + h;
    double fp = f(xp);
    xp[i] = x[i] - h;
    double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct BfgsResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

BfgsResult bfgs_minimize(const Objective& obj, Eigen::VectorXd x) {
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
  double fx = obj(x);
  if (!std::isfinite(fx)) return {x, fx, std::numeric_limits<double>::infinity(), 0};
  Eigen::VectorXd g = numerical_gradient(obj, x);

  BfgsResult res{x, fx, g.lpNorm<Eigen::Infinity>(), 0};
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    res.iterations = iter;
    if (g.lpNorm<Eigen::Infinity>() < kGradTol) break;

    Eigen::VectorXd p = -(H * g);
    double slope = p.dot(g);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = p.dot(g);
      if (!(slope < 0.0)) break;
    }

    double t = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + t * p;
      f_new = obj(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;

    Eigen::VectorXd g_new = numerical_gradient(obj, x_new);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }

    double df = fx - f_new;
    x = x_new;
    fx = f_new;
    g = g_new;
    res.x = x;
    res.f = fx;
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (df < 1e-12 * (1.0 + std::fabs(fx)) && s.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  res.x = x;
  res.f = fx;
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  return res;
}

double inv_pacf(double coeff) {
  double v = std::clamp(coeff / kPacfBound, -0.99, 0.99);
  return std::atanh(v);
}

}  // namespace

Eigen::VectorXd difference(const Eigen::VectorXd& values, int d) {
  if (static_cast<int>(values.size()) <= d)
    throw TooShort("difference: need more than d = " + std::to_string(d) + " values");
  Eigen::VectorXd w = values;
  for (int r = 0; r < d; ++r)
    w = (w.tail(w.size() - 1) - w.head(w.size() - 1)).eval();
  return w;
}

namespace {

FittedArima fit_conditioned(const Eigen::VectorXd& values, const ArimaOrder& order,
                            int cond) {
  const int n = static_cast<int>(values.size());
  if (n <= order.d + order.k + order.q)
    throw TooShort("fit: series length " + std::to_string(n) +
                   " too short for order (" + std::to_string(order.k) + "," +
                   std::to_string(order.d) + "," + std::to_string(order.q) + ")");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(values[i])) throw Error("fit: non-finite value in series");

  Eigen::VectorXd w = difference(values, order.d);
  cond = std::max(cond, order.k);
  const int n_eff = static_cast<int>(w.size()) - cond;
  if (n_eff < 1) throw TooShort("fit: no effective observations after conditioning");

  FittedArima out;
  out.order = order;
  out.n_effective = n_eff;

  double rss;
  if (order.k == 0 && order.q == 0) {
    out.mean_only = true;
    out.intercept = w.tail(n_eff).mean();
    rss = (w.tail(n_eff).array() - out.intercept).square().sum();
    out.ar.resize(0);
    out.ma.resize(0);
  } else {
    ParamMap map{order.k, order.q};
    Objective obj{w, map, cond, n_eff};

    Eigen::VectorXd x0(map.dim());
    x0[0] = w.mean();
    for (int i = 0; i < order.k; ++i) x0[1 + i] = inv_pacf(0.1);
    for (int j = 0; j < order.q; ++j) x0[1 + order.k + j] = inv_pacf(-0.1);

    // Deterministic restarts from perturbed starts; keep the best optimum.
    const double offsets[4] = {0.0, 0.4, -0.4, 0.9};
    BfgsResult best;
    for (double off : offsets) {
      Eigen::VectorXd x = x0;
      for (int i = 1; i < map.dim(); ++i) x[i] += off;
      BfgsResult r = bfgs_minimize(obj, x);
      if (r.f < best.f) best = r;
    }
    if (!std::isfinite(best.f))
      throw OptimizerDivergence("fit: objective non-finite at every restart, "
                                "best gradient norm " + std::to_string(best.grad_norm));

    map.decode(best.x, out.intercept, out.ar, out.ma);
    rss = css_rss(w, out.intercept, out.ar, out.ma, cond);
    out.grad_norm = best.grad_norm;
    out.iterations = best.iterations;
  }

  out.sigma2 = std::max(rss, kRssFloor) / n_eff;
  out.loglik = -0.5 * n_eff * (std::log(2.0 * std::numbers::pi) + std::log(out.sigma2) + 1.0);
  const int p = out.n_params();
  out.aic = 2.0 * p - 2.0 * out.loglik;
  out.bic = p * std::log(static_cast<double>(n_eff)) - 2.0 * out.loglik;
  return out;
}

}  // namespace

FittedArima fit(const Eigen::VectorXd& values, const ArimaOrder& order) {
  return fit_conditioned(values, order, order.k);
}

FittedArima auto_fit(const Eigen::VectorXd& values, int max_k, int max_q,
                     Criterion criterion, int* failed_fits) {
  if (max_k < 0 || max_q < 0 || max_k > 5 || max_q > 5)
    throw Error("auto_fit: max_k and max_q must be in 0..5");

  const int n = static_cast<int>(values.size());
  int adf_lag = static_cast<int>(12.0 * std::pow(n / 100.0, 0.25));
  adf_lag = std::clamp(adf_lag, 0, std::max(0, n / 2 - 10));

  int d = 2;  // most-differenced fallback when no candidate passes the gate
  for (int cand = 0; cand <= 2; ++cand) {
    if (n <= cand + adf_lag + 10) break;
    Eigen::VectorXd w = difference(values, cand);
    if (stats::adf_test(w, adf_lag).stationary_at_5pct) {
      d = cand;
      break;
    }
  }

  // Candidates are scored on a common conditioning sample (t >= max_k) so
  // their information criteria compare like for like; the winning order is
  // then refit with its natural conditioning.
  int failures = 0;
  bool have_best = false;
  ArimaOrder best_order;
  double best_score = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_k; ++k) {
    for (int q = 0; q <= max_q; ++q) {
      if (k == 0 && q == 0) continue;
      try {
        FittedArima m = fit_conditioned(values, ArimaOrder{k, d, q}, max_k);
        double score = criterion == Criterion::Aic ? m.aic : m.bic;
        if (!have_best || score < best_score) {
          best_order = m.order;
          best_score = score;
          have_best = true;
        }
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  if (!have_best) best_order = ArimaOrder{0, d, 0};
  if (failed_fits) *failed_fits = failures;
  try {
    return fit(values, best_order);
  } catch (const Error&) {
    throw AllFitsFailed("auto_fit: every candidate order failed");
  }
}

Eigen::VectorXd forecast(const FittedArima& model, const Eigen::VectorXd& history,
                         int horizon) {
  const int k = model.order.k, d = model.order.d, q = model.order.q;
  if (horizon < 1) throw Error("forecast: horizon must be >= 1");
  if (static_cast<int>(history.size()) < k + d + 1)
    throw InsufficientHistory("forecast: history shorter than k + d");

  Eigen::VectorXd w = difference(history, d);
  const int n = static_cast<int>(w.size());

  // In-sample residuals under the conditioning convention (zeros before k).
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int t = k; t < n; ++t) {
    double pred = model.intercept;
    for (int i = 0; i < k && t - 1 - i >= 0; ++i) pred += model.ar[i] * w[t - 1 - i];
    for (int j = 0; j < q; ++j) pred += (t - 1 - j >= k) ? model.ma[j] * e[t - 1 - j] : 0.0;
    e[t] = w[t] - pred;
  }

  Eigen::VectorXd wf(horizon);
  auto w_at = [&](int t) { return t < n ? w[t] : wf[t - n]; };
  auto e_at = [&](int t) { return t < n ? e[t] : 0.0; };
  for (int s = 0; s < horizon; ++s) {
    int t = n + s;
    double pred = model.intercept;
    for (int i = 0; i < k; ++i) pred += model.ar[i] * w_at(t - 1 - i);
    for (int j = 0; j < q; ++j) pred += model.ma[j] * e_at(t - 1 - j);
    wf[s] = pred;
  }

  // Cumulative un-differencing from the last levels of each difference order.
  Eigen::VectorXd tails(d);  // tails[j] = last value of the j-times differenced series
  {
    Eigen::VectorXd cur = history;
    for (int j = 0; j < d; ++j) {
      tails[j] = cur[cur.size() - 1];
      cur = (cur.tail(cur.size() - 1) - cur.head(cur.size() - 1)).eval();
    }
  }
  Eigen::VectorXd out(horizon);
  for (int s = 0; s < horizon; ++s) {
    double v = wf[s];
    for (int j = d - 1; j >= 0; --j) {
      v = tails[j] + v;
      tails[j] = v;
    }
    out[s] = v;
  }
  return out;
}

MonthlySeries backcast_head(const MonthlySeries& series, int max_k, int max_q,
                            Criterion criterion, FittedArima* fitted) {
  series.validate();
  const int head = series.missing_head();
  if (head < 1) throw NoMissingHead("series '" + series.name + "' has no missing head");
  const int n_obs = series.observed();
  if (n_obs < 60)
    throw TooFewObservations("backcast_head: need >= 60 observed values, got " +
                             std::to_string(n_obs));

  Eigen::VectorXd rev = series.values.tail(n_obs).reverse();
  FittedArima model = auto_fit(rev, max_k, max_q, criterion);
  Eigen::VectorXd fc = forecast(model, rev, head);
  if (fitted) *fitted = model;

  MonthlySeries out = series;
  for (int s = 0; s < head; ++s) out.values[head - 1 - s] = fc[s];
  return out;
}

double min_root_modulus(const Eigen::VectorXd& coeffs, bool ma_convention) {
  // Polynomial 1 -+ c_1 z - ... (AR: minus, MA: plus), trailing zeros dropped.
  int k = static_cast<int>(coeffs.size());
  while (k > 0 && std::fabs(coeffs[k - 1]) < 1e-12) --k;
  if (k == 0) return std::numeric_limits<double>::infinity();

  Eigen::VectorXd a(k + 1);
  a[0] = 1.0;
  for (int i = 0; i < k; ++i) a[i + 1] = ma_convention ? coeffs[i] : -coeffs[i];

  // Companion matrix of p(z)/a_k; its eigenvalues are the roots of p.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < k; ++i) companion(i, k - 1) = -a[i] / a[k];
  Eigen::VectorXcd ev = companion.eigenvalues();
  double min_mod = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) min_mod = std::min(min_mod, std::abs(ev[i]));
  return min_mod;
}

}  // namespace macrosig::arima
