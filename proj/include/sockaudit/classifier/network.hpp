#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sockaudit::classifier {

struct DenseLayer {
  Eigen::MatrixXd weights;  // outputs x inputs
  Eigen::VectorXd bias;
};

// Column-wise softmax; each column of logits is one sample.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

// Fully connected ReLU network with a softmax output layer. Samples are
// columns of the input matrix.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, const std::vector<std::size_t>& hidden, std::size_t outputs,
      std::uint64_t seed);
  explicit Mlp(std::vector<DenseLayer> layers);

  std::size_t input_size() const;
  std::size_t output_size() const;

  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& inputs) const;

  // Mean cross-entropy of the batch. When dropout > 0 an inverted-dropout
  // mask drawn from rng is applied after every hidden layer. If grads is
  // non-null it receives d(loss)/d(parameter) with the same shapes as
  // layers().
  double loss(const Eigen::MatrixXd& inputs, std::span<const std::size_t> labels, double dropout,
              std::mt19937_64* rng, std::vector<DenseLayer>* grads) const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
};

// Adam update state matched to an Mlp's parameter shapes.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& model, double step);
  void apply(Mlp& model, const std::vector<DenseLayer>& grads);

 private:
  double step_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  long t_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

}  // namespace sockaudit::classifier
