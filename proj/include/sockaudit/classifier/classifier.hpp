#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sockaudit/classifier/features.hpp"
#include "sockaudit/classifier/network.hpp"
#include "sockaudit/core/types.hpp"

namespace sockaudit::classifier {

// Class layouts. Index 0 is always the promoting class.
//   kBinaryNoNeutral   promoting | debunking            (neutral examples dropped)
//   kBinaryWithNeutral promoting | debunking + neutral
//   kThreeClass        promoting | neutral | debunking
enum class ClassSetup { kBinaryNoNeutral, kBinaryWithNeutral, kThreeClass };

inline constexpr std::size_t kPromotingClass = 0;

std::size_t class_count(ClassSetup setup);
std::string class_name(ClassSetup setup, std::size_t index);
std::vector<std::string> class_names(ClassSetup setup);
// std::nullopt when the setup drops the stance.
std::optional<std::size_t> class_index(ClassSetup setup, Stance stance);
// The merged "other" class of kBinaryWithNeutral maps to kNeutral.
Stance class_stance(ClassSetup setup, std::size_t index);

std::string_view to_string(ClassSetup setup);
ClassSetup class_setup_from_string(std::string_view text);

enum class Optimizer { kSgd, kAdam };

struct TrainingOptions {
  std::vector<std::size_t> hidden = {256, 128, 64, 32};
  double dropout = 0.5;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  double step = 0.01;
  Optimizer optimizer = Optimizer::kAdam;
  double decision_threshold = 0.7;
};

struct LabeledExample {
  std::string id;
  FeatureVector features;
  Stance stance = Stance::kNeutral;
};

class ClassifierModel {
 public:
  ClassifierModel(ClassSetup setup, double decision_threshold, double dropout, Mlp network);

  ClassSetup setup() const { return setup_; }
  double decision_threshold() const { return threshold_; }
  double dropout() const { return dropout_; }
  std::size_t input_size() const { return network_.input_size(); }
  const Mlp& network() const { return network_; }

  // Softmax output for one vector. Throws DimensionMismatch.
  std::vector<double> probabilities(std::span<const double> features) const;

  void save(const std::filesystem::path& path) const;
  static ClassifierModel load(const std::filesystem::path& path);

  friend bool operator==(const ClassifierModel& a, const ClassifierModel& b);

 private:
  ClassSetup setup_;
  double threshold_;
  double dropout_;
  Mlp network_;
};

struct Prediction {
  Stance stance = Stance::kNeutral;
  double confidence = 0.0;
  std::size_t class_index = 0;
};

// Decision rule on a probability vector: argmax, except that the promoting
// class is only returned when its probability reaches the threshold;
// otherwise the most probable non-promoting class is returned.
Prediction apply_threshold(ClassSetup setup, std::span<const double> probabilities,
                           double threshold);

Prediction predict(const ClassifierModel& model, std::span<const double> features);

// Indices into labels such that every class appears as often as the largest
// one: each class keeps all its examples and is topped up with draws (with
// replacement) from itself.
std::vector<std::size_t> oversample(std::span<const std::size_t> labels, std::size_t classes,
                                    std::mt19937_64& rng);

// Examples whose stance the setup drops are ignored. Throws InsufficientData
// naming the class when a class has fewer than two examples.
ClassifierModel train(std::span<const LabeledExample> corpus, ClassSetup setup, std::uint64_t seed,
                      const TrainingOptions& options = {});

// Trains on an explicit list of corpus indices (repeats allowed). Used by
// cross-validation after it has oversampled a training fold.
ClassifierModel train_on_indices(std::span<const LabeledExample> corpus,
                                 std::span<const std::size_t> indices, ClassSetup setup,
                                 std::uint64_t seed, const TrainingOptions& options);

}  // namespace sockaudit::classifier
