#include "sockaudit/classifier/network.hpp"

#include <cmath>
#include <string>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::classifier {

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double max = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - max).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

Mlp::Mlp(std::size_t inputs, const std::vector<std::size_t>& hidden, std::size_t outputs,
         std::uint64_t seed) {
  if (inputs == 0 || outputs == 0) throw InvalidArgument("network needs inputs and outputs");
  std::mt19937_64 rng(seed);
  std::size_t fan_in = inputs;
  auto add_layer = [&](std::size_t out) {
    // He-uniform initialization suits ReLU layers.
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = dist(rng);
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
    layers_.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto h : hidden) add_layer(h);
  add_layer(outputs);
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].bias.size() != layers_[i].weights.rows() ||
        (i > 0 && layers_[i].weights.cols() != layers_[i - 1].weights.rows())) {
      throw InvalidArgument("inconsistent layer shapes at layer " + std::to_string(i));
    }
  }
}

std::size_t Mlp::input_size() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.cols());
}

std::size_t Mlp::output_size() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weights.rows());
}

Eigen::MatrixXd Mlp::probabilities(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_size()) {
    throw DimensionMismatch("input has " + std::to_string(inputs.rows()) + " features, model expects " +
                            std::to_string(input_size()));
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = ((layers_[l].weights * a).colwise() + layers_[l].bias).cwiseMax(0.0);
  }
  return softmax_columns((layers_.back().weights * a).colwise() + layers_.back().bias);
}

double Mlp::loss(const Eigen::MatrixXd& inputs, std::span<const std::size_t> labels,
                 double dropout, std::mt19937_64* rng, std::vector<DenseLayer>* grads) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_size()) {
    throw DimensionMismatch("input has " + std::to_string(inputs.rows()) + " features, model expects " +
                            std::to_string(input_size()));
  }
  if (static_cast<std::size_t>(inputs.cols()) != labels.size() || labels.empty()) {
    throw InvalidArgument("batch needs one label per column");
  }
  if (dropout > 0.0 && rng == nullptr) throw InvalidArgument("dropout requires an rng");

  const std::size_t depth = layers_.size();
  const double batch = static_cast<double>(labels.size());
  // activations[l] feeds layer l; pre[l] holds layer l's pre-activation.
  std::vector<Eigen::MatrixXd> activations(depth);
  std::vector<Eigen::MatrixXd> pre(depth);
  std::vector<Eigen::MatrixXd> masks(depth);
  activations[0] = inputs;
  const double keep = 1.0 - dropout;
  std::bernoulli_distribution keep_draw(keep);
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    pre[l] = (layers_[l].weights * activations[l]).colwise() + layers_[l].bias;
    Eigen::MatrixXd a = pre[l].cwiseMax(0.0);
    if (dropout > 0.0) {
      masks[l].resize(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < masks[l].size(); ++i) {
        masks[l].data()[i] = keep_draw(*rng) ? 1.0 / keep : 0.0;
      }
      a = a.cwiseProduct(masks[l]);
    }
    activations[l + 1] = std::move(a);
  }
  pre[depth - 1] =
      (layers_.back().weights * activations[depth - 1]).colwise() + layers_.back().bias;
  const Eigen::MatrixXd probs = softmax_columns(pre[depth - 1]);

  double total = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b] >= static_cast<std::size_t>(probs.rows())) {
      throw InvalidArgument("label " + std::to_string(labels[b]) + " outside output range");
    }
    total -= std::log(std::max(probs(static_cast<Eigen::Index>(labels[b]), static_cast<Eigen::Index>(b)),
                               1e-300));
  }
  const double mean_loss = total / batch;
  if (grads == nullptr) return mean_loss;

  grads->assign(depth, DenseLayer{});
  Eigen::MatrixXd delta = probs;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    delta(static_cast<Eigen::Index>(labels[b]), static_cast<Eigen::Index>(b)) -= 1.0;
  }
  delta /= batch;
  for (std::size_t l = depth; l-- > 0;) {
    (*grads)[l].weights = delta * activations[l].transpose();
    (*grads)[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = layers_[l].weights.transpose() * delta;
    if (dropout > 0.0) upstream = upstream.cwiseProduct(masks[l - 1]);
    delta = upstream.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return mean_loss;
}

AdamOptimizer::AdamOptimizer(const Mlp& model, double step) : step_(step) {
  for (const auto& layer : model.layers()) {
    m_.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                  Eigen::VectorXd::Zero(layer.bias.size())});
  }
  v_ = m_;
}

void AdamOptimizer::apply(Mlp& model, const std::vector<DenseLayer>& grads) {
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= step_ * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + epsilon_);
  };
  auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grads[l].weights, m_[l].weights, v_[l].weights);
    update(layers[l].bias, grads[l].bias, m_[l].bias, v_[l].bias);
  }
}

}  // namespace sockaudit::classifier
