#include "sockaudit/classifier/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::classifier {
namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "sockaudit.classifier";
constexpr int kModelVersion = 1;

json layer_to_json(const DenseLayer& layer) {
  std::vector<double> w(layer.weights.data(), layer.weights.data() + layer.weights.size());
  std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
  return json{{"rows", layer.weights.rows()},
              {"cols", layer.weights.cols()},
              {"weights", w},
              {"bias", b}};
}

DenseLayer layer_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
    throw ParseError("model layer has inconsistent sizes");
  }
  DenseLayer layer;
  layer.weights = Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols);
  layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
  return layer;
}

}  // namespace

std::size_t class_count(ClassSetup setup) { return setup == ClassSetup::kThreeClass ? 3 : 2; }

std::string class_name(ClassSetup setup, std::size_t index) {
  if (index >= class_count(setup)) throw InvalidArgument("class index out of range");
  if (index == kPromotingClass) return "promoting";
  switch (setup) {
    case ClassSetup::kBinaryNoNeutral:
      return "debunking";
    case ClassSetup::kBinaryWithNeutral:
      return "debunking+neutral";
    case ClassSetup::kThreeClass:
      return index == 1 ? "neutral" : "debunking";
  }
  return "";
}

std::vector<std::string> class_names(ClassSetup setup) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < class_count(setup); ++i) names.push_back(class_name(setup, i));
  return names;
}

std::optional<std::size_t> class_index(ClassSetup setup, Stance stance) {
  if (stance == Stance::kPromoting) return kPromotingClass;
  switch (setup) {
    case ClassSetup::kBinaryNoNeutral:
      if (stance == Stance::kNeutral) return std::nullopt;
      return 1;
    case ClassSetup::kBinaryWithNeutral:
      return 1;
    case ClassSetup::kThreeClass:
      return stance == Stance::kNeutral ? 1 : 2;
  }
  return std::nullopt;
}

Stance class_stance(ClassSetup setup, std::size_t index) {
  if (index == kPromotingClass) return Stance::kPromoting;
  switch (setup) {
    case ClassSetup::kBinaryNoNeutral:
      return Stance::kDebunking;
    case ClassSetup::kBinaryWithNeutral:
      return Stance::kNeutral;
    case ClassSetup::kThreeClass:
      return index == 1 ? Stance::kNeutral : Stance::kDebunking;
  }
  return Stance::kNeutral;
}

std::string_view to_string(ClassSetup setup) {
  switch (setup) {
    case ClassSetup::kBinaryNoNeutral:
      return "binary_no_neutral";
    case ClassSetup::kBinaryWithNeutral:
      return "binary_with_neutral";
    case ClassSetup::kThreeClass:
      return "three_class";
  }
  return "three_class";
}

ClassSetup class_setup_from_string(std::string_view text) {
  if (text == "binary_no_neutral") return ClassSetup::kBinaryNoNeutral;
  if (text == "binary_with_neutral") return ClassSetup::kBinaryWithNeutral;
  if (text == "three_class") return ClassSetup::kThreeClass;
  throw InvalidArgument("unknown class setup '" + std::string(text) + "'");
}

ClassifierModel::ClassifierModel(ClassSetup setup, double decision_threshold, double dropout,
                                 Mlp network)
    : setup_(setup), threshold_(decision_threshold), dropout_(dropout), network_(std::move(network)) {
  if (network_.output_size() != class_count(setup_)) {
    throw InvalidArgument("network output width " + std::to_string(network_.output_size()) +
                          " does not match class setup " + std::string(to_string(setup_)));
  }
}

std::vector<double> ClassifierModel::probabilities(std::span<const double> features) const {
  if (features.size() != input_size()) {
    throw DimensionMismatch("feature vector has " + std::to_string(features.size()) +
                            " values, model expects " + std::to_string(input_size()));
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(features.data(),
                                                        static_cast<Eigen::Index>(features.size()));
  Eigen::MatrixXd p = network_.probabilities(x);
  return std::vector<double>(p.data(), p.data() + p.size());
}

void ClassifierModel::save(const std::filesystem::path& path) const {
  json layers = json::array();
  for (const auto& layer : network_.layers()) layers.push_back(layer_to_json(layer));
  json j{{"format", kModelFormat},
         {"version", kModelVersion},
         {"class_setup", to_string(setup_)},
         {"decision_threshold", threshold_},
         {"dropout", dropout_},
         {"layers", layers}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing model '" + path.string() + "'");
}

ClassifierModel ClassifierModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot read model '" + path.string() + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != kModelFormat ||
        j.at("version").get<int>() != kModelVersion) {
      throw ParseError("unsupported model format");
    }
    std::vector<DenseLayer> layers;
    for (const auto& l : j.at("layers")) layers.push_back(layer_from_json(l));
    return ClassifierModel(class_setup_from_string(j.at("class_setup").get<std::string>()),
                           j.at("decision_threshold").get<double>(), j.at("dropout").get<double>(),
                           Mlp(std::move(layers)));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool operator==(const ClassifierModel& a, const ClassifierModel& b) {
  if (a.setup_ != b.setup_ || a.threshold_ != b.threshold_ || a.dropout_ != b.dropout_) return false;
  const auto& la = a.network_.layers();
  const auto& lb = b.network_.layers();
  if (la.size() != lb.size()) return false;
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i].weights.rows() != lb[i].weights.rows() || la[i].weights.cols() != lb[i].weights.cols() ||
        la[i].weights != lb[i].weights || la[i].bias != lb[i].bias) {
      return false;
    }
  }
  return true;
}

Prediction apply_threshold(ClassSetup setup, std::span<const double> probabilities,
                           double threshold) {
  if (probabilities.size() != class_count(setup)) {
    throw DimensionMismatch("expected " + std::to_string(class_count(setup)) + " probabilities");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i) {
    if (probabilities[i] > probabilities[best]) best = i;
  }
  if (best == kPromotingClass && probabilities[best] < threshold) {
    best = 1;
    for (std::size_t i = 2; i < probabilities.size(); ++i) {
      if (probabilities[i] > probabilities[best]) best = i;
    }
  }
  return {class_stance(setup, best), probabilities[best], best};
}

Prediction predict(const ClassifierModel& model, std::span<const double> features) {
  const auto probs = model.probabilities(features);
  return apply_threshold(model.setup(), probs, model.decision_threshold());
}

std::vector<std::size_t> oversample(std::span<const std::size_t> labels, std::size_t classes,
                                    std::mt19937_64& rng) {
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw InvalidArgument("label outside class range");
    by_class[labels[i]].push_back(i);
  }
  std::size_t target = 0;
  for (const auto& members : by_class) target = std::max(target, members.size());
  std::vector<std::size_t> out;
  out.reserve(target * classes);
  for (const auto& members : by_class) {
    out.insert(out.end(), members.begin(), members.end());
    if (members.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t n = members.size(); n < target; ++n) out.push_back(members[pick(rng)]);
  }
  return out;
}

ClassifierModel train_on_indices(std::span<const LabeledExample> corpus,
                                 std::span<const std::size_t> indices, ClassSetup setup,
                                 std::uint64_t seed, const TrainingOptions& options) {
  if (indices.empty()) throw InsufficientData("empty training set");
  if (options.batch_size == 0) throw InvalidArgument("batch_size must be positive");
  const std::size_t dims = corpus[indices.front()].features.size();
  const std::size_t classes = class_count(setup);

  std::vector<std::size_t> targets(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& ex = corpus[indices[i]];
    if (ex.features.size() != dims) {
      throw DimensionMismatch("example " + ex.id + " has " + std::to_string(ex.features.size()) +
                              " features, expected " + std::to_string(dims));
    }
    auto cls = class_index(setup, ex.stance);
    if (!cls) throw InvalidArgument("example " + ex.id + " has a stance the setup drops");
    targets[i] = *cls;
  }

  std::mt19937_64 rng(seed);
  Mlp network(dims, options.hidden, classes, rng());
  AdamOptimizer adam(network, options.step);

  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<DenseLayer> grads;
  Eigen::MatrixXd batch;
  std::vector<std::size_t> batch_labels;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.resize(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(end - start));
      batch_labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        const auto& f = corpus[indices[order[k]]].features;
        batch.col(static_cast<Eigen::Index>(k - start)) =
            Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(dims));
        batch_labels.push_back(targets[order[k]]);
      }
      network.loss(batch, batch_labels, options.dropout, &rng, &grads);
      if (options.optimizer == Optimizer::kAdam) {
        adam.apply(network, grads);
      } else {
        auto& layers = network.layers();
        for (std::size_t l = 0; l < layers.size(); ++l) {
          layers[l].weights -= options.step * grads[l].weights;
          layers[l].bias -= options.step * grads[l].bias;
        }
      }
    }
  }
  return ClassifierModel(setup, options.decision_threshold, options.dropout, std::move(network));
}

ClassifierModel train(std::span<const LabeledExample> corpus, ClassSetup setup, std::uint64_t seed,
                      const TrainingOptions& options) {
  const std::size_t classes = class_count(setup);
  std::vector<std::size_t> kept;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (auto cls = class_index(setup, corpus[i].stance)) {
      kept.push_back(i);
      labels.push_back(*cls);
      ++counts[*cls];
    }
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] < 2) {
      throw InsufficientData("class '" + class_name(setup, c) + "' has " +
                             std::to_string(counts[c]) + " examples (need at least 2)");
    }
  }
  std::mt19937_64 rng(seed);
  auto balanced = oversample(labels, classes, rng);
  for (auto& i : balanced) i = kept[i];
  return train_on_indices(corpus, balanced, setup, rng(), options);
}

}  // namespace sockaudit::classifier
