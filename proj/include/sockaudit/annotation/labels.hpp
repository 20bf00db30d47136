#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sockaudit/core/types.hpp"

namespace sockaudit::annotation {

enum class LabelSource { kManual, kPredicted };

struct LabelRecord {
  VideoId video_id;
  AnnotationCode code{0};
  std::string annotator_id;
  LabelSource source = LabelSource::kManual;
  std::optional<double> confidence;  // predicted records only
  std::uint64_t timestamp = 0;
  // Set on the record that resolved an edge case after review by a second
  // annotator. The earlier record stays in the table.
  bool second_opinion = false;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

void validate_label(const LabelRecord& record);

enum class BelowThresholdFallback { kDiscard, kNeutral };

struct ResolutionPolicy {
  double decision_threshold = 0.7;
  // Applied to a predicted promoting label whose confidence is under the
  // threshold.
  BelowThresholdFallback fallback = BelowThresholdFallback::kDiscard;
};

// Manual records beat predicted ones. Among manual records a second-opinion
// record wins, then the latest timestamp (file order breaks ties). Among
// predicted records the latest wins. std::nullopt means discarded.
// Throws MissingLabel when no record matches video_id.
std::optional<Stance> resolve_label(const VideoId& video_id, std::span<const LabelRecord> records,
                                    const ResolutionPolicy& policy = {});

// video id -> stance, or std::nullopt when discarded. Videos without any
// record are absent.
using ResolvedLabels = std::unordered_map<VideoId, std::optional<Stance>>;

// Flat label table, tab separated:
//   video_id  code  annotator_id  source  confidence  timestamp  second_opinion
// Single writer; records are only appended.
class LabelStore {
 public:
  void add(LabelRecord record);

  const std::vector<LabelRecord>& records() const { return records_; }
  std::vector<LabelRecord> records_for(const VideoId& video_id) const;
  bool contains(const VideoId& video_id) const { return index_.count(video_id) != 0; }
  std::size_t size() const { return records_.size(); }
  std::uint64_t next_timestamp() const { return max_timestamp_ + 1; }

  ResolvedLabels resolve(const ResolutionPolicy& policy = {}) const;

  static LabelStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  // Appends the given records to an existing table (writing the header if the
  // file is new).
  static void append(const std::filesystem::path& path, std::span<const LabelRecord> records);

 private:
  std::vector<LabelRecord> records_;
  std::unordered_map<VideoId, std::vector<std::size_t>> index_;
  std::uint64_t max_timestamp_ = 0;
};

// Codes from two annotators over the videos both labeled manually (latest
// record of each annotator), ordered by video id.
std::pair<std::vector<AnnotationCode>, std::vector<AnnotationCode>> paired_codes(
    const LabelStore& store, const std::string& annotator_a, const std::string& annotator_b);

}  // namespace sockaudit::annotation
