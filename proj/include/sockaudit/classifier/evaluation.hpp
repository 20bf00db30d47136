#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sockaudit/classifier/classifier.hpp"

namespace sockaudit::classifier {

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  std::vector<std::string> class_names;
  // confusion[actual][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassMetrics> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t folds = 0;
};

// Precision of a class that is never predicted is reported as 0, as is F1
// when precision and recall are both 0. Weighted averages use support.
EvaluationReport build_report(std::span<const std::size_t> actual,
                              std::span<const std::size_t> predicted,
                              std::vector<std::string> class_names, std::size_t folds);

// Report of a classifier that always predicts the most frequent class.
EvaluationReport majority_baseline(std::span<const std::size_t> actual,
                                   std::vector<std::string> class_names);

struct FoldPlan {
  std::vector<std::size_t> test;   // corpus indices
  std::vector<std::size_t> train;  // corpus indices after oversampling
};

// Stratified k-fold split over the examples the setup keeps. Each class is
// shuffled and dealt round-robin over the folds; each training side is then
// oversampled from its own members only.
//
// Throws InvalidArgument for k < 2 or fewer kept examples than folds, and
// InsufficientData naming the class and fold when a training side would hold
// fewer than two examples of some class.
std::vector<FoldPlan> plan_folds(std::span<const LabeledExample> corpus, ClassSetup setup,
                                 std::size_t k, std::uint64_t seed);

// Trains one model per fold (folds run concurrently) and aggregates the
// held-out predictions into a single report.
EvaluationReport cross_validate(std::span<const LabeledExample> corpus, ClassSetup setup,
                                std::size_t k, std::uint64_t seed,
                                const TrainingOptions& options = {});

// Tab-separated metric table: one row per metric (promoting precision,
// recall, F1, weighted precision, recall, F1, accuracy), one value column.
std::string metrics_table(const EvaluationReport& report);

// Tab-separated confusion matrix with per-row percentages.
std::string confusion_table(const EvaluationReport& report);

}  // namespace sockaudit::classifier
