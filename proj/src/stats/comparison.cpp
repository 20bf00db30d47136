#include "sockaudit/stats/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::stats {
namespace {

// Stances of the scored prefix; std::nullopt entries are unresolved items.
std::vector<std::optional<Stance>> prefix_stances(const ExposureSnapshot& snap, std::size_t top_n,
                                                  const annotation::ResolvedLabels& labels,
                                                  ItemTally* tally) {
  std::vector<std::optional<Stance>> out;
  const std::size_t n = std::min(top_n, snap.items.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = labels.find(snap.items[i].video_id);
    if (tally) ++tally->items;
    if (it == labels.end()) {
      if (tally) ++tally->unlabeled;
      out.push_back(std::nullopt);
    } else {
      if (!it->second && tally) ++tally->discarded;
      out.push_back(it->second);
    }
  }
  return out;
}

std::size_t top_n_for(Modality m, const ExtractionConfig& c) {
  return m == Modality::kSearch ? c.search_top_n : c.list_top_n;
}

bool completed(const RunRecord& r) { return r.status == RunStatus::kCompleted; }

using QueryFilter = const std::unordered_set<std::string>*;

bool selected(const ExposureSnapshot& s, Modality m, QueryFilter queries) {
  if (s.kind != snapshot_kind(m)) return false;
  if (queries && (!s.query || !queries->count(*s.query))) return false;
  return true;
}

std::vector<double> point_scores(const RunRecord& run, Point p, Modality m,
                                 const annotation::ResolvedLabels& labels,
                                 const ExtractionConfig& config, ItemTally& tally,
                                 QueryFilter queries) {
  const auto iv = point_interval(p, m, run.parameters, config);
  std::vector<double> out;
  for (const auto& s : run.snapshots) {
    if (!selected(s, m, queries) || s.watch_index < iv.first || s.watch_index > iv.last) continue;
    if (auto v = score_snapshot(s, m, labels, config, &tally)) out.push_back(*v);
  }
  return out;
}

std::string verdict_text(double p, double alpha, bool lower) {
  if (p >= alpha) return "no-significant-difference";
  return lower ? "supported" : "refuted";
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kSearch:
      return "search";
    case Modality::kRecommendations:
      return "recommendations";
    case Modality::kHome:
      return "home";
  }
  return "search";
}

Modality modality_from_string(std::string_view text) {
  for (auto m : kModalities) {
    if (to_string(m) == text) return m;
  }
  throw ParseError("unknown modality '" + std::string(text) + "'");
}

SnapshotKind snapshot_kind(Modality m) {
  switch (m) {
    case Modality::kSearch:
      return SnapshotKind::kSearch;
    case Modality::kRecommendations:
      return SnapshotKind::kRecommendation;
    case Modality::kHome:
      return SnapshotKind::kHome;
  }
  return SnapshotKind::kSearch;
}

std::string_view to_string(Point p) {
  switch (p) {
    case Point::kS1:
      return "S1";
    case Point::kE1:
      return "E1";
    case Point::kE2:
      return "E2";
  }
  return "S1";
}

std::string_view to_string(S1Anchor a) {
  switch (a) {
    case S1Anchor::kBaselineAndFirstWatches:
      return "baseline+first";
    case S1Anchor::kBaseline:
      return "baseline";
    case S1Anchor::kFirstWatches:
      return "first";
  }
  return "baseline+first";
}

S1Anchor s1_anchor_from_string(std::string_view text) {
  for (auto a : {S1Anchor::kBaselineAndFirstWatches, S1Anchor::kBaseline, S1Anchor::kFirstWatches}) {
    if (to_string(a) == text) return a;
  }
  throw ParseError("unknown S1 anchor '" + std::string(text) + "'");
}

WatchInterval point_interval(Point p, Modality m, const ProcessParameters& params,
                             const ExtractionConfig& config) {
  const std::size_t w = config.window;
  if (w < 1 || w > params.n_prom || w > params.n_deb) {
    throw InvalidArgument("comparison window must lie in [1, min(n_prom, n_deb)]");
  }
  switch (p) {
    case Point::kS1:
      if (m == Modality::kRecommendations) return {1, w};
      switch (config.s1_anchor) {
        case S1Anchor::kBaselineAndFirstWatches:
          return {0, w};
        case S1Anchor::kBaseline:
          return {0, 0};
        case S1Anchor::kFirstWatches:
          return {1, w};
      }
      break;
    case Point::kE1:
      return {params.n_prom - w + 1, params.n_prom};
    case Point::kE2:
      return {params.total_watches() - w + 1, params.total_watches()};
  }
  return {0, 0};
}

ItemTally& ItemTally::operator+=(const ItemTally& o) {
  items += o.items;
  unlabeled += o.unlabeled;
  discarded += o.discarded;
  empty_snapshots += o.empty_snapshots;
  return *this;
}

std::optional<double> score_snapshot(const ExposureSnapshot& snapshot, Modality modality,
                                     const annotation::ResolvedLabels& labels,
                                     const ExtractionConfig& config, ItemTally* tally) {
  std::vector<Stance> stances;
  for (const auto& s : prefix_stances(snapshot, top_n_for(modality, config), labels, tally)) {
    if (s) stances.push_back(*s);
  }
  if (stances.empty()) {
    if (tally) ++tally->empty_snapshots;
    return std::nullopt;
  }
  return modality == Modality::kSearch ? metrics::serp_ms(stances)
                                       : metrics::normalized_score(stances);
}

Extraction extract_comparison_points(std::span<const RunRecord> records, Modality modality,
                                     const annotation::ResolvedLabels& labels,
                                     const ExtractionConfig& config) {
  Extraction ex;
  for (const auto& run : records) {
    if (!completed(run)) {
      ex.skipped_runs.push_back(run.run_id);
      continue;
    }
    RunPoints rp;
    rp.run_id = run.run_id;
    rp.topic_id = run.topic_id;
    for (auto p : {Point::kS1, Point::kE1, Point::kE2}) {
      auto scores = point_scores(run, p, modality, labels, config, ex.tally, nullptr);
      if (scores.empty()) {
        throw ExtractionError("run " + run.run_id + ": no scorable " +
                              std::string(to_string(modality)) + " snapshot at " +
                              std::string(to_string(p)));
      }
      (p == Point::kS1 ? rp.s1 : p == Point::kE1 ? rp.e1 : rp.e2) = std::move(scores);
    }
    ex.runs.push_back(std::move(rp));
  }
  return ex;
}

std::vector<metrics::ScoreSeries> run_series(std::span<const RunRecord> records, Modality modality,
                                             const annotation::ResolvedLabels& labels,
                                             const ExtractionConfig& config) {
  std::vector<metrics::ScoreSeries> out;
  for (const auto& run : records) {
    if (!completed(run)) continue;
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& s : run.snapshots) {
      if (s.kind != snapshot_kind(modality)) continue;
      if (auto v = score_snapshot(s, modality, labels, config)) {
        auto& [sum, n] = acc[s.watch_index];
        sum += *v;
        ++n;
      }
    }
    std::vector<metrics::ScorePoint> points;
    for (const auto& [idx, sn] : acc) {
      points.push_back({static_cast<long>(idx), sn.first / static_cast<double>(sn.second)});
    }
    out.emplace_back(std::move(points));
  }
  return out;
}

metrics::ScoreSeries mean_series(std::span<const metrics::ScoreSeries> series) {
  std::map<long, std::pair<double, std::size_t>> acc;
  for (const auto& s : series) {
    for (const auto& p : s.points()) {
      auto& [sum, n] = acc[p.watch_index];
      sum += p.score;
      ++n;
    }
  }
  std::vector<metrics::ScorePoint> points;
  for (const auto& [idx, sn] : acc) points.push_back({idx, sn.first / static_cast<double>(sn.second)});
  return metrics::ScoreSeries(std::move(points));
}

std::vector<StanceShare> stance_proportions(std::span<const RunRecord> records, Modality modality,
                                            const annotation::ResolvedLabels& labels,
                                            const ExtractionConfig& config) {
  std::map<long, StanceShare> acc;
  for (const auto& run : records) {
    if (!completed(run)) continue;
    for (const auto& s : run.snapshots) {
      if (s.kind != snapshot_kind(modality)) continue;
      auto& share = acc[static_cast<long>(s.watch_index)];
      share.watch_index = static_cast<long>(s.watch_index);
      for (const auto& st : prefix_stances(s, top_n_for(modality, config), labels, nullptr)) {
        if (!st) {
          ++share.unresolved;
        } else if (*st == Stance::kPromoting) {
          ++share.promoting;
        } else if (*st == Stance::kDebunking) {
          ++share.debunking;
        } else {
          ++share.neutral;
        }
      }
    }
  }
  std::vector<StanceShare> out;
  for (auto& [idx, share] : acc) out.push_back(share);
  return out;
}

LabelCoverage label_coverage(std::span<const RunRecord> records,
                             const annotation::ResolvedLabels& labels,
                             const ExtractionConfig& config) {
  LabelCoverage cov;
  std::unordered_map<VideoId, std::size_t> missing;
  for (const auto& run : records) {
    for (const auto& s : run.snapshots) {
      const Modality m = s.kind == SnapshotKind::kSearch           ? Modality::kSearch
                         : s.kind == SnapshotKind::kRecommendation ? Modality::kRecommendations
                                                                   : Modality::kHome;
      const std::size_t n = std::min(top_n_for(m, config), s.items.size());
      for (std::size_t i = 0; i < n; ++i) {
        ++cov.items;
        const auto it = labels.find(s.items[i].video_id);
        if (it == labels.end()) {
          ++cov.unlabeled;
          ++missing[s.items[i].video_id];
        } else if (!it->second) {
          ++cov.discarded;
        }
      }
    }
  }
  cov.missing.assign(missing.begin(), missing.end());
  std::sort(cov.missing.begin(), cov.missing.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return cov;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

ComparisonReport compare_studies(std::span<const RunRecord> records_a,
                                 const annotation::ResolvedLabels& labels_a,
                                 std::span<const RunRecord> records_b,
                                 const annotation::ResolvedLabels& labels_b,
                                 std::span<const std::string> shared_queries,
                                 const CompareConfig& config) {
  if (shared_queries.empty()) throw InvalidArgument("no shared queries to compare");
  const std::unordered_set<std::string> queries(shared_queries.begin(), shared_queries.end());

  // Topics holding a shared query, per study.
  auto topics_of = [&](std::span<const RunRecord> records) {
    std::set<std::string> topics;
    for (const auto& run : records) {
      if (!completed(run)) continue;
      for (const auto& s : run.snapshots) {
        if (s.query && queries.count(*s.query)) {
          topics.insert(run.topic_id);
          break;
        }
      }
    }
    return topics;
  };
  const auto ta = topics_of(records_a);
  const auto tb = topics_of(records_b);
  std::vector<std::string> shared;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(shared));
  if (shared.empty()) throw InvalidArgument("the studies share none of the given queries");

  const double topic_alpha = bonferroni(config.alpha, shared.size());
  ComparisonReport report;
  for (auto m : kModalities) {
    QueryFilter filter = m == Modality::kSearch ? &queries : nullptr;
    auto collect = [&](std::span<const RunRecord> records, const annotation::ResolvedLabels& labels,
                       const std::string* topic) {
      std::vector<double> out;
      ItemTally tally;
      for (const auto& run : records) {
        if (!completed(run)) continue;
        if (topic ? run.topic_id != *topic
                  : !std::binary_search(shared.begin(), shared.end(), run.topic_id)) {
          continue;
        }
        auto s = point_scores(run, config.point, m, labels, config.extraction, tally, filter);
        out.insert(out.end(), s.begin(), s.end());
      }
      return out;
    };
    auto row = [&](const std::string& scope, const std::string* topic, double alpha) {
      const auto a = collect(records_a, labels_a, topic);
      const auto b = collect(records_b, labels_b, topic);
      if (a.empty() || b.empty()) {
        throw ExtractionError("no scorable " + std::string(to_string(m)) + " snapshots at " +
                              std::string(to_string(config.point)) + " for " + scope);
      }
      const auto mw = mann_whitney_u(a, b, config.method);
      ComparisonRow r;
      r.scope = scope;
      r.modality = m;
      r.n_a = a.size();
      r.n_b = b.size();
      r.mean_a = mean(a);
      r.sd_a = sample_sd(a);
      r.mean_b = mean(b);
      r.sd_b = sample_sd(b);
      r.u = mw.u;
      r.p = mw.p;
      r.alpha = alpha;
      // U of A above its null mean: A tends higher, so B is lower.
      const bool b_lower = mw.u > static_cast<double>(a.size() * b.size()) / 2.0;
      r.verdict = verdict_text(mw.p, alpha, b_lower);
      report.rows.push_back(std::move(r));
    };
    for (const auto& t : shared) row(t, &t, topic_alpha);
    row("overall", nullptr, config.alpha);
  }
  return report;
}

}  // namespace sockaudit::stats
