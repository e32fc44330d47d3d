// Dense-network toolkit: batched forward/backward for ReLU MLPs, Adam, and a
// finite-difference gradient checker. Small enough that 64-bit determinism is
// cheap, which keeps tests tolerance-free.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdsim/rng.hpp"

namespace tdsim {

// Multilayer perceptron, ReLU on hidden layers, identity output.
// Inputs/outputs are column vectors; batches are matrices with one column
// per sample.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, std::mt19937_64& init_rng);

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = input
    std::vector<Eigen::MatrixXd> pre;          // pre-activation per layer
  };

  struct Grads {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input,
                          Cache* cache = nullptr) const;
  Eigen::VectorXd forward_vec(const Eigen::VectorXd& input) const;

  // Activations of the last hidden layer (feature map for neural-linear
  // bandits).
  Eigen::VectorXd last_hidden(const Eigen::VectorXd& input) const;

  // Exact reverse-mode gradients of a scalar loss given d(loss)/d(output)
  // for the batch used to fill `cache`. Gradients are summed over the batch.
  Grads backward(const Cache& cache, const Eigen::MatrixXd& output_grad) const;

  Grads zero_grads() const;

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  int parameter_count() const;

  int num_layers() const { return static_cast<int>(weights_.size()); }
  Eigen::MatrixXd& weights(int layer) { return weights_[layer]; }
  const Eigen::MatrixXd& weights(int layer) const { return weights_[layer]; }
  Eigen::VectorXd& biases(int layer) { return biases_[layer]; }
  const Eigen::VectorXd& biases(int layer) const { return biases_[layer]; }

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);

  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

  bool same_architecture(const Mlp& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

// Parameter count from the layer sizes alone.
int parameter_count(const std::vector<int>& layer_sizes);

// Bias-corrected Adam over the MLP's parameters.
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  void step(Mlp& net, const Mlp::Grads& grads);
  std::int64_t steps_taken() const { return t_; }

 private:
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

// Central finite differences of L = 0.5 * ||f(x) - y||^2 with respect to
// every parameter; returns the max relative error against the analytic
// gradients. Uses only forward passes, so it is an independent oracle for
// backward().
double gradient_check(Mlp& net, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, double h = 1e-5);

// Elementwise mean of equally-shaped models.
Mlp fedavg(const std::vector<const Mlp*>& models);

// Exact (bitwise) parameter equality; architectures must match.
bool equal_params(const Mlp& a, const Mlp& b);

// Numerically stable softmax / log-softmax over a vector.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

}  // namespace tdsim
