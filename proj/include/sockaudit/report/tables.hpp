#pragma once

#include <span>
#include <string>
#include <vector>

#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/stats/comparison.hpp"
#include "sockaudit/stats/hypotheses.hpp"

namespace sockaudit::report {

// Every table is tab separated with a header row. Numbers use fixed
// precision so identical inputs give byte-identical files.
std::string format_number(double x, int decimals = 6);
// Four significant digits; p-values span many orders of magnitude.
std::string format_p(double p);

std::string verdicts_tsv(std::span<const stats::HypothesisVerdict> verdicts);

// One row per topic plus "overall": mean and sd at S1, E1 and E2, then p and
// verdict of the three pairwise tests.
std::string comparison_table_tsv(stats::Modality modality, const stats::Extraction& extraction,
                                 std::span<const stats::HypothesisVerdict> verdicts);

// DIFF-TO-LINEAR per scope for recommendations and home in both phases. A
// cell shows "-" when the phase's score change (S1 vs E1 for phase 1, E1 vs
// E2 for phase 2) is not significant.
std::string diff_to_linear_tsv(std::span<const stats::HypothesisVerdict> verdicts);

struct SeriesRow {
  std::string scope;  // topic id or "overall"
  long watch_index = 0;
  double score = 0.0;
  std::size_t runs = 0;
};

// Mean score per watch index, per topic and overall.
std::vector<SeriesRow> series_rows(std::span<const RunRecord> records, stats::Modality modality,
                                   const annotation::ResolvedLabels& labels,
                                   const stats::ExtractionConfig& config);
std::string series_tsv(std::span<const SeriesRow> rows);

struct ProportionRow {
  std::string scope;
  stats::StanceShare share;

  std::size_t total() const {
    return share.promoting + share.neutral + share.debunking + share.unresolved;
  }
};

std::vector<ProportionRow> proportion_rows(std::span<const RunRecord> records,
                                           stats::Modality modality,
                                           const annotation::ResolvedLabels& labels,
                                           const stats::ExtractionConfig& config);
std::string proportions_tsv(std::span<const ProportionRow> rows);

std::string comparison_report_tsv(const stats::ComparisonReport& report);

}  // namespace sockaudit::report
