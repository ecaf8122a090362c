#include "macrosig/neural.hpp"

#include <cmath>
#include <string>

#include "macrosig/errors.hpp"
#include "macrosig/exact_sum.hpp"
#include "macrosig/rng.hpp"

namespace macrosig::nn {

namespace {

double stable_logistic_loss(double z, int y) {
  return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Forward pass for one sample; fills per-layer pre-activations and
// activations when requested (needed by backprop).
double forward_sample(const MlpFit& m, const Eigen::VectorXd& x,
                      std::vector<Eigen::VectorXd>* zs,
                      std::vector<Eigen::VectorXd>* as) {
  Eigen::VectorXd a = x;
  for (int l = 0; l < m.n_layers(); ++l) {
    Eigen::VectorXd z = m.weights[l] * a + m.biases[l];
    if (l + 1 < m.n_layers())
      a = z.cwiseMax(0.0);
    else
      a = z;
    if (zs) zs->push_back(z);
    if (as) as->push_back(a);
  }
  return a[0];
}

struct GradAccum {
  std::vector<std::vector<ExactSum>> w;  // per layer, row-major entries
  std::vector<std::vector<ExactSum>> b;

  explicit GradAccum(const MlpFit& m) {
    for (int l = 0; l < m.n_layers(); ++l) {
      w.emplace_back(m.weights[l].size());
      b.emplace_back(m.biases[l].size());
    }
  }
};

}  // namespace

MlpFit init(const MlpConfig& config, int input_dim) {
  if (input_dim < 1) throw Error("init: input_dim must be >= 1");
  MlpFit m;
  m.layer_sizes = config.layer_sizes.empty()
      ? std::vector<int>{input_dim, 8, 5, 1}
      : config.layer_sizes;
  if (m.layer_sizes.front() != input_dim)
    throw DimensionMismatch("init: layer_sizes[0] != input_dim");
  if (m.layer_sizes.back() != 1)
    throw Error("init: final layer size must be 1");

  auto eng = rng::make_engine(config.seed);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    int fan_in = m.layer_sizes[l];
    int fan_out = m.layer_sizes[l + 1];
    double s = std::sqrt(2.0 / fan_in);
    Eigen::MatrixXd W(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) W(i, j) = rng::next_uniform(eng, -s, s);
    m.weights.push_back(std::move(W));
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

Eigen::VectorXd forward(const MlpFit& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.input_dim())
    throw DimensionMismatch("forward: X has " + std::to_string(X.cols()) +
                            " columns, model expects " +
                            std::to_string(model.input_dim()));
  Eigen::VectorXd logits(X.rows());
  for (int i = 0; i < X.rows(); ++i)
    logits[i] = forward_sample(model, X.row(i).transpose(), nullptr, nullptr);
  return logits;
}

double batch_loss(const MlpFit& model, const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
  ExactSum acc;
  for (int i = 0; i < X.rows(); ++i) {
    double z = forward_sample(model, X.row(i).transpose(), nullptr, nullptr);
    acc.add(stable_logistic_loss(z, y[i]));
  }
  return acc.value() / X.rows();
}

MlpFit train(const MlpFit& model, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
             const MlpConfig& config) {
  if (X.rows() != y.size()) throw DimensionMismatch("train: X rows != y length");
  if (X.cols() != model.input_dim()) throw DimensionMismatch("train: feature mismatch");
  const int n = static_cast<int>(X.rows());
  const int L = model.n_layers();

  MlpFit m = model;
  m.loss_history.clear();
  m.loss_history.reserve(config.epochs);

  GradAccum grads(m);
  std::vector<Eigen::VectorXd> zs, as;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int l = 0; l < L; ++l) {
      for (auto& e : grads.w[l]) e.reset();
      for (auto& e : grads.b[l]) e.reset();
    }

    for (int i = 0; i < n; ++i) {
      zs.clear();
      as.clear();
      Eigen::VectorXd x = X.row(i).transpose();
      double z_out = forward_sample(m, x, &zs, &as);

      // delta at the output: d(mean loss * n)/dz = sigmoid(z) - y
      Eigen::VectorXd delta(1);
      delta[0] = sigmoid(z_out) - y[i];

      for (int l = L - 1; l >= 0; --l) {
        const Eigen::VectorXd& a_prev = l == 0 ? x : as[l - 1];
        const int rows = static_cast<int>(m.weights[l].rows());
        const int cols = static_cast<int>(m.weights[l].cols());
        for (int r = 0; r < rows; ++r) {
          grads.b[l][r].add(delta[r]);
          for (int c = 0; c < cols; ++c)
            grads.w[l][r * cols + c].add(delta[r] * a_prev[c]);
        }
        if (l > 0) {
          Eigen::VectorXd d_prev = m.weights[l].transpose() * delta;
          for (int r = 0; r < d_prev.size(); ++r)
            if (zs[l - 1][r] <= 0.0) d_prev[r] = 0.0;  // relu' at 0 taken as 0
          delta = std::move(d_prev);
        }
      }
    }

    const double scale = config.learning_rate / n;
    for (int l = 0; l < L; ++l) {
      const int cols = static_cast<int>(m.weights[l].cols());
      for (int r = 0; r < m.weights[l].rows(); ++r) {
        m.biases[l][r] -= scale * grads.b[l][r].value();
        for (int c = 0; c < cols; ++c)
          m.weights[l](r, c) -= scale * grads.w[l][r * cols + c].value();
      }
    }

    double loss = batch_loss(m, X, y);
    if (!std::isfinite(loss))
      throw NonFiniteLoss("train: non-finite loss at epoch " + std::to_string(epoch));
    m.loss_history.push_back(loss);
  }
  return m;
}

double gradient_check(const MlpFit& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXi& y, double epsilon) {
  const int n = static_cast<int>(X.rows());
  const int L = model.n_layers();

  // Backprop gradient of the mean loss.
  GradAccum grads(model);
  std::vector<Eigen::VectorXd> zs, as;
  for (int i = 0; i < n; ++i) {
    zs.clear();
    as.clear();
    Eigen::VectorXd x = X.row(i).transpose();
    double z_out = forward_sample(model, x, &zs, &as);
    Eigen::VectorXd delta(1);
    delta[0] = sigmoid(z_out) - y[i];
    for (int l = L - 1; l >= 0; --l) {
      const Eigen::VectorXd& a_prev = l == 0 ? x : as[l - 1];
      const int cols = static_cast<int>(model.weights[l].cols());
      for (int r = 0; r < model.weights[l].rows(); ++r) {
        grads.b[l][r].add(delta[r]);
        for (int c = 0; c < cols; ++c)
          grads.w[l][r * cols + c].add(delta[r] * a_prev[c]);
      }
      if (l > 0) {
        Eigen::VectorXd d_prev = model.weights[l].transpose() * delta;
        for (int r = 0; r < d_prev.size(); ++r)
          if (zs[l - 1][r] <= 0.0) d_prev[r] = 0.0;
        delta = std::move(d_prev);
      }
    }
  }

  MlpFit probe = model;
  double max_rel = 0.0;
  auto check_param = [&](double& slot, double g_bp) {
    double saved = slot;
    slot = saved + epsilon;
    double f_plus = batch_loss(probe, X, y);
    slot = saved - epsilon;
    double f_minus = batch_loss(probe, X, y);
    slot = saved;
    double g_fd = (f_plus - f_minus) / (2.0 * epsilon);
    double rel = std::fabs(g_fd - g_bp) / std::max(1e-8, std::fabs(g_fd) + std::fabs(g_bp));
    max_rel = std::max(max_rel, rel);
  };

  for (int l = 0; l < L; ++l) {
    const int cols = static_cast<int>(probe.weights[l].cols());
    for (int r = 0; r < probe.weights[l].rows(); ++r) {
      check_param(probe.biases[l][r], grads.b[l][r].value() / n);
      for (int c = 0; c < cols; ++c)
        check_param(probe.weights[l](r, c), grads.w[l][r * cols + c].value() / n);
    }
  }
  return max_rel;
}

}  // namespace macrosig::nn
