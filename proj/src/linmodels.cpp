#include "macrosig/linmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "macrosig/errors.hpp"
#include "macrosig/eval.hpp"
#include "macrosig/rng.hpp"
#include "macrosig/stattests.hpp"

namespace macrosig::lin {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kSeparationBound = 30.0;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double link_prob(GlmFamily family, double eta) {
  return family == GlmFamily::Probit ? stats::normal_cdf(eta) : sigmoid(eta);
}

double glm_loglik(GlmFamily family, const Eigen::VectorXd& eta, const Eigen::VectorXi& y) {
  double ll = 0;
  for (int i = 0; i < eta.size(); ++i) {
    double p = clamp_prob(link_prob(family, eta[i]));
    ll += y[i] ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

// Per-row score s = dll/deta and observed-information weight w = -d2ll/deta2.
void glm_weights(GlmFamily family, const Eigen::VectorXd& eta, const Eigen::VectorXi& y,
                 Eigen::VectorXd& s, Eigen::VectorXd& w) {
  for (int i = 0; i < eta.size(); ++i) {
    double p = clamp_prob(link_prob(family, eta[i]));
    if (family == GlmFamily::Logit) {
      s[i] = y[i] - p;
      w[i] = p * (1.0 - p);
    } else {
      double lambda = (y[i] - p) * normal_pdf(eta[i]) / (p * (1.0 - p));
      s[i] = lambda;
      w[i] = lambda * (lambda + eta[i]);
      if (w[i] < 0.0) w[i] = 0.0;  // rare clamp-induced negatives
    }
  }
}

struct NewtonResult {
  Eigen::VectorXd beta;
  double loglik = 0;
  bool converged = false;
  int iterations = 0;
  double score_norm = 0;
};

NewtonResult glm_newton(const Eigen::MatrixXd& Xd, const Eigen::VectorXi& y,
                        GlmFamily family, double tol, int max_iter) {
  const int n = static_cast<int>(Xd.rows());
  const int p = static_cast<int>(Xd.cols());

  NewtonResult res;
  res.beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  res.loglik = glm_loglik(family, eta, y);

  Eigen::VectorXd s(n), w(n);
  for (int iter = 1; iter <= max_iter; ++iter) {
    res.iterations = iter;
    glm_weights(family, eta, y, s, w);
    Eigen::VectorXd grad = Xd.transpose() * s;
    res.score_norm = grad.lpNorm<Eigen::Infinity>();
    if (res.score_norm < tol) {
      res.converged = true;
      return res;
    }

    Eigen::MatrixXd info = Xd.transpose() * w.asDiagonal() * Xd;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw SingularInformation("glm: information matrix not positive definite");
    Eigen::VectorXd step = ldlt.solve(grad);

    double t = 1.0;
    Eigen::VectorXd beta_new, eta_new;
    double ll_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int h = 0; h <= 20; ++h) {
      beta_new = res.beta + t * step;
      eta_new = Xd * beta_new;
      ll_new = glm_loglik(family, eta_new, y);
      if (std::isfinite(ll_new) && ll_new >= res.loglik) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled; report the last iterate as-is

    bool improving = ll_new > res.loglik;
    res.beta = beta_new;
    eta = eta_new;
    res.loglik = ll_new;

    if (improving && res.beta.lpNorm<Eigen::Infinity>() > kSeparationBound)
      throw PerfectSeparation("glm: coefficient magnitude exceeded " +
                              std::to_string(kSeparationBound) +
                              " with still-improving likelihood");
  }
  glm_weights(family, eta, y, s, w);
  res.score_norm = (Xd.transpose() * s).lpNorm<Eigen::Infinity>();
  res.converged = res.score_norm < tol;
  return res;
}

}  // namespace

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw DimensionMismatch("fit_ols: X rows != y length");
  if (X.rows() <= X.cols()) throw RankDeficient("fit_ols: need rows > cols");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols())
    throw RankDeficient("fit_ols: design rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(X.cols()));
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();
  return fit;
}

GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, GlmFamily family,
               double tol, int max_iter) {
  const int n = static_cast<int>(X.rows());
  if (n != y.size()) throw DimensionMismatch("fit_glm: X rows != y length");
  bool has0 = false, has1 = false;
  for (int i = 0; i < n; ++i) (y[i] ? has1 : has0) = true;
  if (!has0 || !has1) throw SingleClassLabel("fit_glm: both classes must be present");

  Eigen::MatrixXd Xd(n, X.cols() + 1);
  Xd.col(0).setOnes();
  Xd.rightCols(X.cols()) = X;

  NewtonResult full = glm_newton(Xd, y, family, tol, max_iter);
  NewtonResult null_fit = glm_newton(Eigen::MatrixXd::Ones(n, 1), y, family, tol, max_iter);

  GlmFit fit;
  fit.family = family;
  fit.coefficients = full.beta;
  fit.loglik = full.loglik;
  fit.loglik_null = null_fit.loglik;
  fit.converged = full.converged;
  fit.n_obs = n;
  fit.iterations = full.iterations;
  fit.score_norm = full.score_norm;

  // Standard errors from the inverse observed information at the optimum.
  Eigen::VectorXd eta = Xd * full.beta;
  Eigen::VectorXd s(n), w(n);
  glm_weights(family, eta, y, s, w);
  Eigen::MatrixXd info = Xd.transpose() * w.asDiagonal() * Xd;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success)
    throw SingularInformation("glm: information matrix singular at optimum");
  Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(Xd.cols(), Xd.cols()));

  const int pc = static_cast<int>(Xd.cols());
  fit.std_errors.resize(pc);
  fit.z_values.resize(pc);
  fit.p_values.resize(pc);
  for (int j = 0; j < pc; ++j) {
    fit.std_errors[j] = std::sqrt(std::max(cov(j, j), 0.0));
    fit.z_values[j] = fit.std_errors[j] > 0 ? fit.coefficients[j] / fit.std_errors[j] : 0.0;
    fit.p_values[j] = 2.0 * stats::normal_cdf(-std::fabs(fit.z_values[j]));
  }

  fit.pseudo_r2 = std::clamp(1.0 - fit.loglik / fit.loglik_null, 0.0, 1.0);
  int df = static_cast<int>(X.cols());
  fit.llr_p_value = df > 0
      ? stats::chi2_sf(2.0 * (fit.loglik - fit.loglik_null), df)
      : 1.0;
  return fit;
}

Eigen::VectorXd predict_proba(const GlmFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() + 1 != fit.coefficients.size())
    throw DimensionMismatch("predict_proba: feature count mismatch");
  Eigen::VectorXd proba(X.rows());
  for (int i = 0; i < X.rows(); ++i) {
    double eta = fit.coefficients[0] + X.row(i).dot(fit.coefficients.tail(X.cols()));
    proba[i] = link_prob(fit.family, eta);
  }
  return proba;
}

Eigen::VectorXi classify(const Eigen::VectorXd& proba, double threshold) {
  Eigen::VectorXi out(proba.size());
  for (int i = 0; i < proba.size(); ++i) out[i] = proba[i] > threshold ? 1 : 0;
  return out;
}

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

void standardize_columns(const Eigen::MatrixXd& X, Eigen::MatrixXd& Z,
                         Eigen::VectorXd& means, Eigen::VectorXd& sds) {
  const int p = static_cast<int>(X.cols());
  means.resize(p);
  sds.resize(p);
  Z.resize(X.rows(), p);
  for (int j = 0; j < p; ++j) {
    means[j] = X.col(j).mean();
    double var = (X.col(j).array() - means[j]).square().mean();
    sds[j] = var > 0 ? std::sqrt(var) : 1.0;
    Z.col(j) = (X.col(j).array() - means[j]) / sds[j];
  }
}

}  // namespace

EnetFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        double lambda, double l1_ratio, double tol, int max_iter,
                        std::vector<std::string> feature_names) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n != y.size()) throw DimensionMismatch("fit_elastic_net: X rows != y length");
  if (n < 2) throw Error("fit_elastic_net: need n >= 2");
  if (lambda < 0 || l1_ratio < 0 || l1_ratio > 1)
    throw Error("fit_elastic_net: lambda >= 0 and l1_ratio in [0,1] required");

  EnetFit fit;
  fit.lambda = lambda;
  fit.l1_ratio = l1_ratio;
  fit.intercept = y.mean();
  if (feature_names.empty()) {
    fit.feature_names.reserve(p);
    for (int j = 0; j < p; ++j) fit.feature_names.push_back("x" + std::to_string(j));
  } else {
    fit.feature_names = std::move(feature_names);
  }

  Eigen::MatrixXd Z;
  standardize_columns(X, Z, fit.feature_means, fit.feature_sds);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y.array() - fit.intercept;
  const double l1 = lambda * l1_ratio;
  const double l2 = lambda * (1.0 - l1_ratio);

  int sweeps = 0;
  double max_delta = 0;
  for (sweeps = 1; sweeps <= max_iter; ++sweeps) {
    max_delta = 0;
    for (int j = 0; j < p; ++j) {
      // Standardized columns have unit (population) second moment, so the
      // coordinate update is a plain soft threshold.
      double z = Z.col(j).dot(r) / n + b[j];
      double bj = soft_threshold(z, l1) / (1.0 + l2);
      if (bj != b[j]) {
        r -= (bj - b[j]) * Z.col(j);
        max_delta = std::max(max_delta, std::fabs(bj - b[j]));
        b[j] = bj;
      }
    }
    if (max_delta < tol) break;
  }
  fit.coefficients = b;
  fit.n_iterations = std::min(sweeps, max_iter);
  fit.converged = max_delta < tol;
  return fit;
}

double enet_objective(const EnetFit& fit, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd pred = predict_linear(fit, X);
  double rss = (y - pred).squaredNorm();
  double l1 = fit.coefficients.lpNorm<1>();
  double l2 = fit.coefficients.squaredNorm();
  return rss / (2.0 * n) +
         fit.lambda * ((1.0 - fit.l1_ratio) / 2.0 * l2 + fit.l1_ratio * l1);
}

double enet_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Z;
  Eigen::VectorXd means, sds;
  standardize_columns(X, Z, means, sds);
  Eigen::VectorXd yc = y.array() - y.mean();
  return (Z.transpose() * yc).lpNorm<Eigen::Infinity>() / X.rows();
}

Eigen::VectorXd predict_linear(const EnetFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() != fit.coefficients.size())
    throw DimensionMismatch("predict_linear: feature count mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), fit.intercept);
  for (int j = 0; j < X.cols(); ++j)
    out += fit.coefficients[j] / fit.feature_sds[j] *
           (X.col(j).array() - fit.feature_means[j]).matrix();
  return out;
}

EnetCvResult cv_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<double>& lambda_grid,
                            const std::vector<double>& l1_ratio_grid, int k,
                            std::uint64_t seed,
                            std::vector<std::string> feature_names) {
  if (lambda_grid.empty() || l1_ratio_grid.empty())
    throw Error("cv_elastic_net: empty grid");
  if (k < 2) throw Error("cv_elastic_net: k must be >= 2");

  // Stratify when y is a 0/1 label, which is how the pipeline uses this.
  bool binary = true;
  Eigen::VectorXi yl(y.size());
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0 || y[i] == 1.0)
      yl[i] = static_cast<int>(y[i]);
    else
      binary = false;
  }
  std::vector<int> folds;
  if (binary) {
    folds = eval::stratified_kfold(yl, k, seed);
  } else {
    folds.resize(y.size());
    auto eng = rng::make_engine(seed);
    std::vector<int> order(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng::shuffle(order, eng);
    for (std::size_t i = 0; i < order.size(); ++i)
      folds[order[i]] = static_cast<int>(i % k);
  }

  EnetCvResult result;
  bool have_best = false;
  double best_loss = 0;
  for (double lambda : lambda_grid) {
    for (double alpha : l1_ratio_grid) {
      std::vector<double> losses;
      losses.reserve(k);
      for (int fold = 0; fold < k; ++fold) {
        std::vector<int> tr, te;
        for (int i = 0; i < y.size(); ++i) (folds[i] == fold ? te : tr).push_back(i);
        Eigen::MatrixXd Xtr(tr.size(), X.cols()), Xte(te.size(), X.cols());
        Eigen::VectorXd ytr(tr.size()), yte(te.size());
        for (std::size_t i = 0; i < tr.size(); ++i) {
          Xtr.row(i) = X.row(tr[i]);
          ytr[i] = y[tr[i]];
        }
        for (std::size_t i = 0; i < te.size(); ++i) {
          Xte.row(i) = X.row(te[i]);
          yte[i] = y[te[i]];
        }
        EnetFit f = fit_elastic_net(Xtr, ytr, lambda, alpha);
        losses.push_back((predict_linear(f, Xte) - yte).squaredNorm() / yte.size());
      }
      double mean = 0;
      for (double l : losses) mean += l;
      mean /= k;
      double var = 0;
      for (double l : losses) var += (l - mean) * (l - mean);
      result.grid.push_back({lambda, alpha, mean, std::sqrt(var / k)});

      // Ties prefer the stronger, sparser model: larger lambda then larger alpha.
      bool better = !have_best || mean < best_loss ||
                    (mean == best_loss &&
                     (lambda > result.best_lambda ||
                      (lambda == result.best_lambda && alpha > result.best_l1_ratio)));
      if (better) {
        have_best = true;
        best_loss = mean;
        result.best_lambda = lambda;
        result.best_l1_ratio = alpha;
      }
    }
  }
  result.refit = fit_elastic_net(X, y, result.best_lambda, result.best_l1_ratio,
                                 1e-7, 10000, std::move(feature_names));
  return result;
}

std::vector<std::pair<std::string, double>> enet_importance(const EnetFit& fit) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(fit.feature_names.size());
  for (std::size_t j = 0; j < fit.feature_names.size(); ++j)
    out.emplace_back(fit.feature_names[j], std::fabs(fit.coefficients[static_cast<int>(j)]));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace macrosig::lin
