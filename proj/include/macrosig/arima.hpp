#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "macrosig/dataset.hpp"

namespace macrosig::arima {

enum class Criterion { Aic, Bic };

struct ArimaOrder {
  int k = 0;  // AR order
  int d = 0;  // differencing order, 0..2
  int q = 0;  // MA order
};

struct FittedArima {
  ArimaOrder order;
  Eigen::VectorXd ar;   // alpha_1..alpha_k
  Eigen::VectorXd ma;   // beta_1..beta_q
  double intercept = 0;
  double sigma2 = 0;
  double loglik = 0;
  double aic = 0;
  double bic = 0;
  int n_effective = 0;
  bool mean_only = false;       // k = q = 0 model, fitted in closed form
  double grad_norm = 0;         // optimizer diagnostics
  int iterations = 0;

  int n_params() const { return order.k + order.q + 2; }  // + intercept + variance
};

Eigen::VectorXd difference(const Eigen::VectorXd& values, int d);

// Conditional (CSS) Gaussian maximum likelihood on the d-times differenced
// series. Stationarity/invertibility are guaranteed through a partial
// autocorrelation reparameterization; optimization is BFGS with central
// difference gradients (tol 1e-8 on the gradient norm, 500 iterations, three
// restarts from perturbed starts).
FittedArima fit(const Eigen::VectorXd& values, const ArimaOrder& order);

// d = smallest value in {0,1,2} whose differenced series passes the ADF gate
// at 5% (2 when none pass); then an exhaustive (k,q) grid excluding (0,0)
// ranked by the requested criterion, ties to smaller k then smaller q.
FittedArima auto_fit(const Eigen::VectorXd& values, int max_k, int max_q,
                     Criterion criterion = Criterion::Aic,
                     int* failed_fits = nullptr);

// Iterated one-step conditional-mean forecasts on the differenced scale,
// cumulatively un-differenced back to levels.
Eigen::VectorXd forecast(const FittedArima& model, const Eigen::VectorXd& history,
                         int horizon);

// Reverses the observed values, auto-fits, forecasts the head length and
// fills the missing head with the reversed forecasts. Observed tail is
// bit-identical to the input.
MonthlySeries backcast_head(const MonthlySeries& series, int max_k, int max_q,
                            Criterion criterion = Criterion::Aic,
                            FittedArima* fitted = nullptr);

// Minimum modulus over the roots of 1 - sum c_i z^i (AR convention) or
// 1 + sum c_i z^i (MA convention), via the companion matrix.
double min_root_modulus(const Eigen::VectorXd& coeffs, bool ma_convention);

}  // namespace macrosig::arima
