#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace macrosig::lin {

enum class GlmFamily { Probit, Logit };

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  double rss = 0;
};

// Orthogonal-decomposition least squares; throws RankDeficient.
OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct GlmFit {
  GlmFamily family = GlmFamily::Logit;
  Eigen::VectorXd coefficients;  // intercept first
  Eigen::VectorXd std_errors;
  Eigen::VectorXd z_values;
  Eigen::VectorXd p_values;
  double loglik = 0;
  double loglik_null = 0;
  double pseudo_r2 = 0;      // McFadden
  double llr_p_value = 1;
  bool converged = false;
  int n_obs = 0;
  int iterations = 0;
  double score_norm = 0;     // max-norm of the score at the returned coefficients
};

// Newton-Raphson MLE with step-halving (at most 20 halvings per step); an
// intercept column is prepended internally. Probabilities are clamped to
// [1e-12, 1-1e-12] inside the likelihood. Non-convergence after max_iter is
// reported through `converged`, not an exception.
GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, GlmFamily family,
               double tol = 1e-8, int max_iter = 100);

Eigen::VectorXd predict_proba(const GlmFit& fit, const Eigen::MatrixXd& X);
Eigen::VectorXi classify(const Eigen::VectorXd& proba, double threshold = 0.5);

struct EnetFit {
  double intercept = 0;             // mean of y
  Eigen::VectorXd coefficients;     // on standardized predictors
  double lambda = 0;
  double l1_ratio = 0;
  int n_iterations = 0;
  bool converged = false;
  Eigen::VectorXd feature_means;    // standardization constants
  Eigen::VectorXd feature_sds;
  std::vector<std::string> feature_names;
};

// Cyclic coordinate descent with soft thresholding on the squared-error
// elastic-net objective; predictors standardized internally to mean 0 /
// variance 1 (population).
EnetFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        double lambda, double l1_ratio, double tol = 1e-7,
                        int max_iter = 10000,
                        std::vector<std::string> feature_names = {});

double enet_objective(const EnetFit& fit, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y);

// Smallest lambda that zeroes every coefficient at l1_ratio = 1.
double enet_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

Eigen::VectorXd predict_linear(const EnetFit& fit, const Eigen::MatrixXd& X);

struct EnetCvResult {
  struct GridPoint {
    double lambda = 0;
    double l1_ratio = 0;
    double mean_loss = 0;
    double std_loss = 0;
  };
  std::vector<GridPoint> grid;
  double best_lambda = 0;
  double best_l1_ratio = 0;
  EnetFit refit;
};

// Stratified k-fold squared-error CV over the full (lambda, l1_ratio) grid;
// ties go to larger lambda, then larger l1_ratio; best pair refit on all data.
EnetCvResult cv_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const std::vector<double>& lambda_grid,
                            const std::vector<double>& l1_ratio_grid, int k = 5,
                            std::uint64_t seed = 0,
                            std::vector<std::string> feature_names = {});

// Descending |standardized coefficient|, name tie-break.
std::vector<std::pair<std::string, double>> enet_importance(const EnetFit& fit);

}  // namespace macrosig::lin
