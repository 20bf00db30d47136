#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sockaudit {

using VideoId = std::string;
using Seconds = std::chrono::seconds;

// Stance of a video towards the audited narrative.
enum class Stance : int { kDebunking = -1, kNeutral = 0, kPromoting = 1 };

inline int stance_value(Stance s) { return static_cast<int>(s); }
std::optional<Stance> stance_from_int(int value);
std::string_view to_string(Stance s);
std::optional<Stance> stance_from_string(std::string_view text);

// Manual annotation code in -1..10.
//   -1 debunking, 0 neutral, 1 promoting (topic-related)
//    2, 3, 4 same as -1, 0, 1 for misinformation unrelated to the topic
//    5 not about misinformation
//    6 non-English, 7 undeterminable, 8 removed
//    9, 10 mocking (related / unrelated)
class AnnotationCode {
 public:
  // Throws InvalidArgument naming the value when it is not one of the twelve
  // admissible codes.
  explicit AnnotationCode(int code);

  static bool is_admissible(int code) { return code >= -1 && code <= 10; }

  int value() const { return code_; }

  friend bool operator==(AnnotationCode, AnnotationCode) = default;

 private:
  int code_;
};

// Returns std::nullopt for the discarded codes 6, 7 and 8.
std::optional<Stance> map_code_to_stance(AnnotationCode code);

// Canonical topic-related code for a stance (-1, 0 or 1).
AnnotationCode code_for_stance(Stance s);

struct VideoRecord {
  VideoId video_id;
  std::string topic;
  std::optional<Stance> true_stance;  // simulator ground truth only
  std::string title;
  std::string description;
  std::string transcript;
  std::string channel_id;
  Seconds duration{0};

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct Topic {
  std::string topic_id;
  std::string display_name;
  std::vector<std::string> queries;

  friend bool operator==(const Topic&, const Topic&) = default;
};

void validate_topic(const Topic& topic);

enum class SnapshotKind { kSearch, kRecommendation, kHome };
enum class Phase { kBaseline, kPromoting, kDebunking };

std::string_view to_string(SnapshotKind kind);
std::string_view to_string(Phase phase);
SnapshotKind snapshot_kind_from_string(std::string_view text);
Phase phase_from_string(std::string_view text);

inline constexpr std::size_t kMaxRecommendationItems = 20;
inline constexpr std::size_t kMinListingItems = 20;

struct RankedItem {
  int rank = 0;  // 1-based
  VideoId video_id;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

// One probe of the platform: a search page, the recommendations next to a
// watched video, or the home page.
struct ExposureSnapshot {
  SnapshotKind kind = SnapshotKind::kHome;
  std::optional<std::string> query;  // set iff kind == kSearch
  std::size_t watch_index = 0;       // videos watched before the probe
  std::vector<RankedItem> items;
  std::string run_id;
  Phase phase = Phase::kBaseline;

  std::vector<VideoId> video_ids() const;

  friend bool operator==(const ExposureSnapshot&, const ExposureSnapshot&) = default;
};

// Builds items with contiguous ranks 1..k from an ordered id list.
std::vector<RankedItem> rank_items(const std::vector<VideoId>& ids);

// Checks rank contiguity, the query/kind pairing and the recommendation size
// bound. Throws InvalidArgument.
void validate_snapshot(const ExposureSnapshot& snapshot);

// First min(n, size) items; n must be at least 1.
ExposureSnapshot truncate_top_n(const ExposureSnapshot& snapshot, std::size_t n);

struct ProcessParameters {
  std::size_t n_prom = 40;
  std::size_t n_deb = 40;
  std::chrono::minutes t_watch{30};
  std::size_t n_q = 5;
  std::chrono::minutes t_wait{20};
  std::size_t f_q = 2;
  std::size_t runs_per_topic = 10;
  std::size_t top_n_metric = 10;

  std::size_t total_watches() const { return n_prom + n_deb; }

  friend bool operator==(const ProcessParameters&, const ProcessParameters&) = default;
};

void validate_parameters(const ProcessParameters& p);

struct WatchEvent {
  Phase phase = Phase::kPromoting;
  VideoId video_id;
  Seconds watched{0};

  friend bool operator==(const WatchEvent&, const WatchEvent&) = default;
};

enum class RunStatus { kCompleted, kFailed, kIncomplete };

std::string_view to_string(RunStatus status);
RunStatus run_status_from_string(std::string_view text);

struct RunRecord {
  std::string run_id;
  std::string topic_id;
  std::uint64_t agent_seed = 0;
  ProcessParameters parameters;
  std::vector<WatchEvent> watch_sequence;
  std::vector<ExposureSnapshot> snapshots;
  RunStatus status = RunStatus::kIncomplete;
  // Watch events completed when the run stopped; a resumed run continues
  // from here.
  std::size_t resume_cursor = 0;
  std::string failure_reason;

  std::size_t count(SnapshotKind kind) const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Structural checks on a completed record: phase ordering of the watch
// sequence, watch_index bounds, snapshot invariants.
void validate_run_record(const RunRecord& record);

}  // namespace sockaudit
