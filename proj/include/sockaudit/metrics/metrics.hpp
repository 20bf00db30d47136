#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sockaudit/core/types.hpp"

namespace sockaudit::metrics {

// Mean stance of a list, ignoring order. Throws UndefinedScore on an empty
// list: 0 means "balanced", so it is never returned for missing data.
double normalized_score(std::span<const Stance> stances);

// Rank-weighted stance score of an ordered result list: the item at rank r of
// n has weight n - r + 1, normalized by n(n+1)/2. Throws UndefinedScore on an
// empty list.
double serp_ms(std::span<const Stance> stances);

struct ScorePoint {
  long watch_index = 0;
  double score = 0.0;

  friend bool operator==(const ScorePoint&, const ScorePoint&) = default;
};

// Normalized scores indexed by number of watched videos; indices strictly
// increasing.
class ScoreSeries {
 public:
  ScoreSeries() = default;
  explicit ScoreSeries(std::vector<ScorePoint> points);

  const std::vector<ScorePoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::optional<double> at(long watch_index) const;

 private:
  std::vector<ScorePoint> points_;
};

// Sum over i in [s, e] of NS_i minus the straight line through (s, NS_s) and
// (e, NS_e). For a rising segment positive means faster than linear; for a
// falling segment positive means slower than linear.
//
// Throws InvalidArgument if s >= e, or naming the first missing index.
double diff_to_linear(const ScoreSeries& series, long s, long e);

// Jaccard similarity of the two id sets. Two empty lists give 1.
double list_overlap(std::span<const VideoId> a, std::span<const VideoId> b);

// Levenshtein distance over list elements.
std::size_t sequence_edit_distance(std::span<const VideoId> a, std::span<const VideoId> b);

}  // namespace sockaudit::metrics
