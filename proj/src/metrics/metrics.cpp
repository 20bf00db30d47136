#include "sockaudit/metrics/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::metrics {

double normalized_score(std::span<const Stance> stances) {
  if (stances.empty()) throw UndefinedScore("normalized score of an empty list is undefined");
  long sum = 0;
  for (Stance s : stances) sum += stance_value(s);
  return static_cast<double>(sum) / static_cast<double>(stances.size());
}

double serp_ms(std::span<const Stance> stances) {
  if (stances.empty()) throw UndefinedScore("SERP-MS of an empty list is undefined");
  const long n = static_cast<long>(stances.size());
  long weighted = 0;
  for (long r = 1; r <= n; ++r) {
    weighted += stance_value(stances[static_cast<std::size_t>(r - 1)]) * (n - r + 1);
  }
  // Numerator and denominator stay integral, so a single division keeps the
  // result exact up to rounding.
  return static_cast<double>(2 * weighted) / static_cast<double>(n * (n + 1));
}

ScoreSeries::ScoreSeries(std::vector<ScorePoint> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].watch_index <= points_[i - 1].watch_index) {
      throw InvalidArgument("score series watch_index not strictly increasing at " +
                            std::to_string(points_[i].watch_index));
    }
  }
}

std::optional<double> ScoreSeries::at(long watch_index) const {
  auto it = std::lower_bound(
      points_.begin(), points_.end(), watch_index,
      [](const ScorePoint& p, long idx) { return p.watch_index < idx; });
  if (it == points_.end() || it->watch_index != watch_index) return std::nullopt;
  return it->score;
}

double diff_to_linear(const ScoreSeries& series, long s, long e) {
  if (s >= e) {
    throw InvalidArgument("diff_to_linear requires s < e (got s=" + std::to_string(s) +
                          ", e=" + std::to_string(e) + ")");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(e - s + 1));
  for (long i = s; i <= e; ++i) {
    auto v = series.at(i);
    if (!v) {
      throw InvalidArgument("score series has no value at watch_index " + std::to_string(i));
    }
    values.push_back(*v);
  }
  const double start = values.front();
  const double slope = (values.back() - start) / static_cast<double>(e - s);
  double total = 0.0;
  for (long i = s; i <= e; ++i) {
    total += values[static_cast<std::size_t>(i - s)] - start - slope * static_cast<double>(i - s);
  }
  return total;
}

double list_overlap(std::span<const VideoId> a, std::span<const VideoId> b) {
  std::unordered_set<std::string_view> set_a(a.begin(), a.end());
  std::unordered_set<std::string_view> set_b(b.begin(), b.end());
  if (set_a.empty() && set_b.empty()) return 1.0;
  std::size_t shared = 0;
  for (auto id : set_a) shared += set_b.count(id);
  const std::size_t uni = set_a.size() + set_b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

std::size_t sequence_edit_distance(std::span<const VideoId> a, std::span<const VideoId> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitution = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitution});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace sockaudit::metrics
