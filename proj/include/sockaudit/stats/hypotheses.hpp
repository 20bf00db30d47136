#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/stats/comparison.hpp"

namespace sockaudit::stats {

enum class Verdict { kSupported, kRefuted, kNoSignificantDifference };

std::string_view to_string(Verdict v);

struct HypothesisConfig {
  // Family level. Per-topic tests use alpha / number of topics, the pooled
  // "overall" tests use alpha itself.
  double alpha = 0.05;
  ExtractionConfig extraction;
  PValueMethod method = PValueMethod::kAuto;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t bootstrap_seed = 1;
  double ci_level = 0.95;
};

struct HypothesisVerdict {
  std::string hypothesis;  // "H2.0" .. "H2.3"
  std::string scope;       // topic id or "overall"
  Modality modality = Modality::kRecommendations;
  int phase = 0;           // 1 or 2 for H2.3, else 0
  double statistic = 0.0;  // U of the first-named sample, or DIFF-TO-LINEAR
  std::optional<double> p_value;
  double alpha = 0.0;
  Verdict verdict = Verdict::kNoSignificantDifference;
  std::optional<double> ci_low, ci_high;  // H2.3 bootstrap interval
  std::size_t n_a = 0, n_b = 0;
};

// H2.0  S1 vs E1, expects E1 higher
// H2.1  E1 vs E2, expects E2 lower
// H2.2  S1 vs E2, expects E2 lower
// A significant shift against the expectation is kRefuted.
//
// H2.3  DIFF-TO-LINEAR of the run-mean score series over each phase, for
// recommendations and home. Supported when the bootstrap interval over runs
// contains 0, refuted otherwise.
//
// Deterministic in (records, labels, config).
std::vector<HypothesisVerdict> evaluate_hypotheses(std::span<const RunRecord> records,
                                                   const annotation::ResolvedLabels& labels,
                                                   const HypothesisConfig& config = {});

// Verdict for a U test whose expected direction is "first sample lower"
// (expect_first_lower) or "first sample higher".
Verdict directional_verdict(const MannWhitneyResult& r, std::size_t n_a, std::size_t n_b,
                            double alpha, bool expect_first_lower);

// Inclusive phase bounds used for H2.3.
WatchInterval phase_span(int phase, Modality m, const ProcessParameters& params,
                         const ExtractionConfig& config);

}  // namespace sockaudit::stats
