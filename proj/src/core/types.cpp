#include "sockaudit/core/types.hpp"

#include <algorithm>

#include "sockaudit/core/errors.hpp"

namespace sockaudit {

std::optional<Stance> stance_from_int(int value) {
  switch (value) {
    case -1:
      return Stance::kDebunking;
    case 0:
      return Stance::kNeutral;
    case 1:
      return Stance::kPromoting;
    default:
      return std::nullopt;
  }
}

std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::kDebunking:
      return "debunking";
    case Stance::kNeutral:
      return "neutral";
    case Stance::kPromoting:
      return "promoting";
  }
  return "neutral";
}

std::optional<Stance> stance_from_string(std::string_view text) {
  if (text == "debunking") return Stance::kDebunking;
  if (text == "neutral") return Stance::kNeutral;
  if (text == "promoting") return Stance::kPromoting;
  return std::nullopt;
}

AnnotationCode::AnnotationCode(int code) : code_(code) {
  if (!is_admissible(code)) {
    throw InvalidArgument("inadmissible annotation code " + std::to_string(code) +
                          " (expected -1..10)");
  }
}

std::optional<Stance> map_code_to_stance(AnnotationCode code) {
  switch (code.value()) {
    case -1:
    case 2:
    case 9:
    case 10:
      return Stance::kDebunking;
    case 1:
    case 4:
      return Stance::kPromoting;
    case 0:
    case 3:
    case 5:
      return Stance::kNeutral;
    default:  // 6, 7, 8
      return std::nullopt;
  }
}

AnnotationCode code_for_stance(Stance s) { return AnnotationCode(stance_value(s)); }

void validate_topic(const Topic& topic) {
  if (topic.topic_id.empty()) throw InvalidArgument("topic_id must not be empty");
  if (topic.queries.empty()) {
    throw InvalidArgument("topic '" + topic.topic_id + "' has no queries");
  }
}

std::string_view to_string(SnapshotKind kind) {
  switch (kind) {
    case SnapshotKind::kSearch:
      return "search";
    case SnapshotKind::kRecommendation:
      return "recommendation";
    case SnapshotKind::kHome:
      return "home";
  }
  return "home";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kBaseline:
      return "baseline";
    case Phase::kPromoting:
      return "promoting";
    case Phase::kDebunking:
      return "debunking";
  }
  return "baseline";
}

SnapshotKind snapshot_kind_from_string(std::string_view text) {
  if (text == "search") return SnapshotKind::kSearch;
  if (text == "recommendation") return SnapshotKind::kRecommendation;
  if (text == "home") return SnapshotKind::kHome;
  throw ParseError("unknown snapshot kind '" + std::string(text) + "'");
}

Phase phase_from_string(std::string_view text) {
  if (text == "baseline") return Phase::kBaseline;
  if (text == "promoting") return Phase::kPromoting;
  if (text == "debunking") return Phase::kDebunking;
  throw ParseError("unknown phase '" + std::string(text) + "'");
}

std::vector<VideoId> ExposureSnapshot::video_ids() const {
  std::vector<VideoId> ids;
  ids.reserve(items.size());
  for (const auto& item : items) ids.push_back(item.video_id);
  return ids;
}

std::vector<RankedItem> rank_items(const std::vector<VideoId>& ids) {
  std::vector<RankedItem> items;
  items.reserve(ids.size());
  int rank = 1;
  for (const auto& id : ids) items.push_back({rank++, id});
  return items;
}

void validate_snapshot(const ExposureSnapshot& snapshot) {
  for (std::size_t i = 0; i < snapshot.items.size(); ++i) {
    if (snapshot.items[i].rank != static_cast<int>(i) + 1) {
      throw InvalidArgument("snapshot ranks not contiguous at position " + std::to_string(i) +
                            " (rank " + std::to_string(snapshot.items[i].rank) + ")");
    }
  }
  const bool is_search = snapshot.kind == SnapshotKind::kSearch;
  if (is_search != snapshot.query.has_value()) {
    throw InvalidArgument(is_search ? "search snapshot without query"
                                    : "non-search snapshot carries a query");
  }
  if (snapshot.kind == SnapshotKind::kRecommendation &&
      snapshot.items.size() > kMaxRecommendationItems) {
    throw InvalidArgument("recommendation snapshot has " + std::to_string(snapshot.items.size()) +
                          " items (max 20)");
  }
}

ExposureSnapshot truncate_top_n(const ExposureSnapshot& snapshot, std::size_t n) {
  if (n == 0) throw InvalidArgument("truncate_top_n requires n >= 1");
  ExposureSnapshot out = snapshot;
  if (out.items.size() > n) out.items.resize(n);
  return out;
}

void validate_parameters(const ProcessParameters& p) {
  auto require_positive = [](std::size_t v, const char* name) {
    if (v == 0) throw InvalidArgument(std::string("parameter ") + name + " must be positive");
  };
  require_positive(p.n_prom, "n_prom");
  require_positive(p.n_deb, "n_deb");
  require_positive(p.n_q, "n_q");
  require_positive(p.f_q, "f_q");
  require_positive(p.runs_per_topic, "runs_per_topic");
  require_positive(p.top_n_metric, "top_n_metric");
  if (p.t_watch.count() <= 0) throw InvalidArgument("parameter t_watch must be positive");
  if (p.t_wait.count() <= 0) throw InvalidArgument("parameter t_wait must be positive");
  if (p.f_q > p.n_prom) throw InvalidArgument("parameter f_q must not exceed n_prom");
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted:
      return "completed";
    case RunStatus::kFailed:
      return "failed";
    case RunStatus::kIncomplete:
      return "incomplete";
  }
  return "incomplete";
}

RunStatus run_status_from_string(std::string_view text) {
  if (text == "completed") return RunStatus::kCompleted;
  if (text == "failed") return RunStatus::kFailed;
  if (text == "incomplete") return RunStatus::kIncomplete;
  throw ParseError("unknown run status '" + std::string(text) + "'");
}

std::size_t RunRecord::count(SnapshotKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      snapshots.begin(), snapshots.end(), [kind](const auto& s) { return s.kind == kind; }));
}

void validate_run_record(const RunRecord& record) {
  const auto& p = record.parameters;
  if (record.status == RunStatus::kCompleted) {
    if (record.watch_sequence.size() != p.total_watches()) {
      throw InvalidArgument("run " + record.run_id + " has " +
                            std::to_string(record.watch_sequence.size()) + " watches, expected " +
                            std::to_string(p.total_watches()));
    }
  }
  for (std::size_t i = 0; i < record.watch_sequence.size(); ++i) {
    const Phase expected = i < p.n_prom ? Phase::kPromoting : Phase::kDebunking;
    if (record.watch_sequence[i].phase != expected) {
      throw InvalidArgument("run " + record.run_id + ": watch " + std::to_string(i) +
                            " is in the wrong phase");
    }
  }
  for (const auto& snapshot : record.snapshots) {
    validate_snapshot(snapshot);
    if (snapshot.watch_index > record.watch_sequence.size()) {
      throw InvalidArgument("run " + record.run_id + ": snapshot watch_index " +
                            std::to_string(snapshot.watch_index) + " exceeds total watches");
    }
  }
}

}  // namespace sockaudit
