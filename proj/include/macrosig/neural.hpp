#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace macrosig::nn {

struct MlpConfig {
  std::vector<int> layer_sizes;  // empty -> (input_dim, 8, 5, 1) at init
  double learning_rate = 0.01;
  int epochs = 2000;
  std::uint64_t seed = 0;
};

struct MlpFit {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is (out x in)
  std::vector<Eigen::VectorXd> biases;
  std::vector<double> loss_history;      // post-step loss per epoch

  int input_dim() const { return layer_sizes.front(); }
  int n_layers() const { return static_cast<int>(weights.size()); }
};

// Weights uniform(-s, s) with s = sqrt(2 / fan_in), biases zero; draw order
// is layer by layer, row major, so a seed pins every weight.
MlpFit init(const MlpConfig& config, int input_dim);

// ReLU hidden layers, affine output; returns raw logits (the loss owns the
// sigmoid).
Eigen::VectorXd forward(const MlpFit& model, const Eigen::MatrixXd& X);

// Full-batch gradient descent on mean logistic loss from logits,
// softplus(z) - y z in the stable max(z,0) - y z + log1p(exp(-|z|)) form.
// Per-sample gradients are reduced with an error-free accumulator, so the
// trained model is bitwise invariant to training-row permutations.
MlpFit train(const MlpFit& model, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
             const MlpConfig& config);

// Max relative error between backprop and central finite differences over
// every parameter; intended for small batches (n <= 32).
double gradient_check(const MlpFit& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXi& y, double epsilon = 1e-5);

double batch_loss(const MlpFit& model, const Eigen::MatrixXd& X, const Eigen::VectorXi& y);

}  // namespace macrosig::nn
