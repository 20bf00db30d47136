#include "sockaudit/classifier/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::classifier {

EvaluationReport build_report(std::span<const std::size_t> actual,
                              std::span<const std::size_t> predicted,
                              std::vector<std::string> class_names, std::size_t folds) {
  if (actual.size() != predicted.size()) {
    throw InvalidArgument("actual and predicted label counts differ");
  }
  if (actual.empty()) throw InvalidArgument("cannot evaluate an empty prediction set");
  const std::size_t k = class_names.size();
  EvaluationReport r;
  r.class_names = std::move(class_names);
  r.folds = folds;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] >= k || predicted[i] >= k) throw InvalidArgument("label outside class range");
    ++r.confusion[actual[i]][predicted[i]];
  }
  std::size_t correct = 0;
  const double total = static_cast<double>(actual.size());
  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    m.name = r.class_names[c];
    std::size_t predicted_c = 0;
    for (std::size_t a = 0; a < k; ++a) predicted_c += r.confusion[a][c];
    m.support = std::accumulate(r.confusion[c].begin(), r.confusion[c].end(), std::size_t{0});
    const double tp = static_cast<double>(r.confusion[c][c]);
    correct += r.confusion[c][c];
    m.precision = predicted_c == 0 ? 0.0 : tp / static_cast<double>(predicted_c);
    m.recall = m.support == 0 ? 0.0 : tp / static_cast<double>(m.support);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const double weight = static_cast<double>(m.support) / total;
    r.weighted_precision += weight * m.precision;
    r.weighted_recall += weight * m.recall;
    r.weighted_f1 += weight * m.f1;
    r.per_class.push_back(std::move(m));
  }
  r.accuracy = static_cast<double>(correct) / total;
  return r;
}

EvaluationReport majority_baseline(std::span<const std::size_t> actual,
                                   std::vector<std::string> class_names) {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (auto a : actual) {
    if (a >= counts.size()) throw InvalidArgument("label outside class range");
    ++counts[a];
  }
  const auto majority = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<std::size_t> predicted(actual.size(), majority);
  return build_report(actual, predicted, std::move(class_names), 0);
}

std::vector<FoldPlan> plan_folds(std::span<const LabeledExample> corpus, ClassSetup setup,
                                 std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  const std::size_t classes = class_count(setup);
  std::vector<std::vector<std::size_t>> by_class(classes);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (auto cls = class_index(setup, corpus[i].stance)) {
      by_class[*cls].push_back(i);
      ++kept;
    }
  }
  if (kept < k) {
    throw InvalidArgument("corpus has " + std::to_string(kept) + " usable examples for " +
                          std::to_string(k) + " folds");
  }

  std::mt19937_64 rng(seed);
  std::vector<FoldPlan> plans(k);
  std::vector<std::size_t> fold_of(corpus.size(), k);
  std::size_t dealt = 0;  // continues round-robin across classes to balance fold sizes
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto idx : members) {
      fold_of[idx] = dealt % k;
      plans[dealt % k].test.push_back(idx);
      ++dealt;
    }
  }
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> members;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t c = 0; c < classes; ++c) {
      for (auto idx : by_class[c]) {
        if (fold_of[idx] == f) continue;
        members.push_back(idx);
        labels.push_back(c);
        ++counts[c];
      }
    }
    for (std::size_t c = 0; c < classes; ++c) {
      if (counts[c] < 2) {
        throw InsufficientData("class '" + class_name(setup, c) + "' has " +
                               std::to_string(counts[c]) + " training examples in fold " +
                               std::to_string(f));
      }
    }
    auto balanced = oversample(labels, classes, rng);
    plans[f].train.reserve(balanced.size());
    for (auto i : balanced) plans[f].train.push_back(members[i]);
  }
  return plans;
}

EvaluationReport cross_validate(std::span<const LabeledExample> corpus, ClassSetup setup,
                                std::size_t k, std::uint64_t seed,
                                const TrainingOptions& options) {
  const auto plans = plan_folds(corpus, setup, k, seed);
  std::mt19937_64 seeder(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::uint64_t> fold_seeds(k);
  for (auto& s : fold_seeds) s = seeder();

  using FoldResult = std::vector<std::pair<std::size_t, std::size_t>>;  // (actual, predicted)
  std::vector<std::future<FoldResult>> futures;
  for (std::size_t f = 0; f < k; ++f) {
    futures.push_back(std::async(std::launch::async, [&, f] {
      const auto model = train_on_indices(corpus, plans[f].train, setup, fold_seeds[f], options);
      FoldResult out;
      for (auto idx : plans[f].test) {
        const auto p = predict(model, corpus[idx].features);
        out.emplace_back(*class_index(setup, corpus[idx].stance), p.class_index);
      }
      return out;
    }));
  }
  std::vector<std::size_t> actual, predicted;
  for (auto& fut : futures) {
    for (auto [a, p] : fut.get()) {
      actual.push_back(a);
      predicted.push_back(p);
    }
  }
  return build_report(actual, predicted, class_names(setup), k);
}

std::string metrics_table(const EvaluationReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  const auto& prom = r.per_class.at(kPromotingClass);
  out << "metric\tvalue\n"
      << "Precision prom.\t" << prom.precision << '\n'
      << "Recall prom.\t" << prom.recall << '\n'
      << "F1-score prom.\t" << prom.f1 << '\n'
      << "Precision weigh.\t" << r.weighted_precision << '\n'
      << "Recall weigh.\t" << r.weighted_recall << '\n'
      << "F1-score weigh.\t" << r.weighted_f1 << '\n'
      << "Accuracy\t" << r.accuracy << '\n';
  return out.str();
}

std::string confusion_table(const EvaluationReport& r) {
  std::ostringstream out;
  out << "actual";
  for (const auto& name : r.class_names) out << '\t' << name << " (predicted)";
  out << '\n';
  for (std::size_t a = 0; a < r.confusion.size(); ++a) {
    const double row_total = static_cast<double>(
        std::accumulate(r.confusion[a].begin(), r.confusion[a].end(), std::size_t{0}));
    out << r.class_names[a] << " (actual)";
    for (auto c : r.confusion[a]) {
      const long pct = row_total == 0.0 ? 0 : std::lround(100.0 * static_cast<double>(c) / row_total);
      out << '\t' << c << " (" << pct << "%)";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sockaudit::classifier
