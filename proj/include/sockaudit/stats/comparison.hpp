#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/core/types.hpp"
#include "sockaudit/metrics/metrics.hpp"
#include "sockaudit/stats/mann_whitney.hpp"

namespace sockaudit::stats {

enum class Modality { kSearch, kRecommendations, kHome };
inline constexpr Modality kModalities[] = {Modality::kSearch, Modality::kRecommendations,
                                           Modality::kHome};

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view text);
SnapshotKind snapshot_kind(Modality m);

enum class Point { kS1, kE1, kE2 };

std::string_view to_string(Point p);

// Where the start anchor sits for search and home, which also have a phase-0
// snapshot. Recommendations always use the first watches.
enum class S1Anchor {
  kBaselineAndFirstWatches,  // phase-0 snapshot plus the first `window` watches
  kBaseline,                 // phase-0 snapshot only
  kFirstWatches,             // first `window` watches only
};

std::string_view to_string(S1Anchor a);
S1Anchor s1_anchor_from_string(std::string_view text);

struct ExtractionConfig {
  std::size_t window = 2;            // watches per comparison point
  std::size_t list_top_n = 10;       // NS over recommendations and home
  std::size_t search_top_n = 10;     // SERP-MS over search results
  S1Anchor s1_anchor = S1Anchor::kBaselineAndFirstWatches;
};

// Inclusive watch-index interval of a comparison point.
struct WatchInterval {
  std::size_t first = 0;
  std::size_t last = 0;
};

WatchInterval point_interval(Point p, Modality m, const ProcessParameters& params,
                             const ExtractionConfig& config);

struct ItemTally {
  std::size_t items = 0;
  std::size_t unlabeled = 0;
  std::size_t discarded = 0;
  std::size_t empty_snapshots = 0;  // nothing scorable left

  ItemTally& operator+=(const ItemTally& o);
};

// NS (recommendations, home) or SERP-MS (search) of the top-n items that carry
// a non-discarded label. Unlabeled and discarded items are dropped; nullopt
// when none remain.
std::optional<double> score_snapshot(const ExposureSnapshot& snapshot, Modality modality,
                                     const annotation::ResolvedLabels& labels,
                                     const ExtractionConfig& config, ItemTally* tally = nullptr);

struct RunPoints {
  std::string run_id;
  std::string topic_id;
  std::vector<double> s1, e1, e2;  // one score per snapshot
};

struct Extraction {
  std::vector<RunPoints> runs;
  ItemTally tally;
  std::vector<std::string> skipped_runs;  // not completed
};

// Scores at S1, E1 and E2 for every completed run. Throws ExtractionError
// naming the run and point when a point has no scorable snapshot. Runs that
// did not complete are listed in skipped_runs.
Extraction extract_comparison_points(std::span<const RunRecord> records, Modality modality,
                                     const annotation::ResolvedLabels& labels,
                                     const ExtractionConfig& config = {});

// Per-run score series: mean score of the run's snapshots at each watch index.
std::vector<metrics::ScoreSeries> run_series(std::span<const RunRecord> records, Modality modality,
                                             const annotation::ResolvedLabels& labels,
                                             const ExtractionConfig& config = {});

// Pointwise mean over the given series; an index is kept when at least one
// series has it.
metrics::ScoreSeries mean_series(std::span<const metrics::ScoreSeries> series);

struct StanceShare {
  long watch_index = 0;
  std::size_t promoting = 0;
  std::size_t neutral = 0;
  std::size_t debunking = 0;
  std::size_t unresolved = 0;  // unlabeled or discarded
};

// Stance counts over the top-n items of every snapshot of a modality, grouped
// by watch index.
std::vector<StanceShare> stance_proportions(std::span<const RunRecord> records, Modality modality,
                                            const annotation::ResolvedLabels& labels,
                                            const ExtractionConfig& config = {});

struct LabelCoverage {
  std::size_t items = 0;
  std::size_t unlabeled = 0;
  std::size_t discarded = 0;
  // Unlabeled videos, most frequent first.
  std::vector<std::pair<VideoId, std::size_t>> missing;

  double unlabeled_fraction() const {
    return items == 0 ? 0.0 : static_cast<double>(unlabeled) / static_cast<double>(items);
  }
};

// Over the scored prefix (top-n) of every snapshot.
LabelCoverage label_coverage(std::span<const RunRecord> records,
                             const annotation::ResolvedLabels& labels,
                             const ExtractionConfig& config = {});

// Cross-study comparison at one point, one row per shared topic plus an
// overall row. Study B significantly lower than A supports the improvement
// hypothesis; significantly higher refutes it.
struct ComparisonRow {
  std::string scope;  // topic id or "overall"
  Modality modality = Modality::kSearch;
  std::size_t n_a = 0, n_b = 0;
  double mean_a = 0.0, sd_a = 0.0, mean_b = 0.0, sd_b = 0.0;
  double u = 0.0;
  double p = 1.0;
  double alpha = 0.0;
  std::string verdict;
};

struct CompareConfig {
  Point point = Point::kE1;
  double alpha = 0.05;
  ExtractionConfig extraction;
  PValueMethod method = PValueMethod::kAuto;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

// Search rows use only snapshots of the shared queries; recommendation and
// home rows use the topics owning them. Throws InvalidArgument when the
// shared query set is empty or neither study holds any of its queries.
ComparisonReport compare_studies(std::span<const RunRecord> records_a,
                                 const annotation::ResolvedLabels& labels_a,
                                 std::span<const RunRecord> records_b,
                                 const annotation::ResolvedLabels& labels_b,
                                 std::span<const std::string> shared_queries,
                                 const CompareConfig& config = {});

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);  // n - 1 denominator, 0 for n < 2

}  // namespace sockaudit::stats
