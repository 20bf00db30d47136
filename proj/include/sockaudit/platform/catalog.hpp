#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/core/types.hpp"

namespace sockaudit::platform {

struct StanceCounts {
  std::size_t promoting = 0;
  std::size_t debunking = 0;
  std::size_t neutral = 0;

  std::size_t total() const { return promoting + debunking + neutral; }
};

struct TopicContent {
  Topic topic;
  StanceCounts counts;
  std::vector<std::string> keywords;
  // Audited topics must hold enough promoting and debunking videos to serve
  // as seed sets.
  bool audited = true;
};

// Word pools used to generate video text. Stance pools carry the signal the
// classifier learns; filler words carry none.
struct Vocabulary {
  std::vector<std::string> promoting;
  std::vector<std::string> debunking;
  std::vector<std::string> neutral;
  std::vector<std::string> filler;
};

Vocabulary default_vocabulary();

// The five audited topics with five queries each.
std::vector<TopicContent> default_topics(const StanceCounts& counts = {100, 100, 300});

struct CatalogConfig {
  std::uint64_t seed = 1;
  std::vector<TopicContent> topics = default_topics();
  Vocabulary vocabulary = default_vocabulary();
  // Share of generated tokens drawn from the video's stance pool.
  double stance_term_rate = 0.3;
  // Probability that a stance token comes from another stance's pool.
  double cross_talk = 0.1;
  // Share of neutral videos that are unrelated to misinformation (code 5).
  double unrelated_fraction = 0.5;
  // Share of debunking videos that mock rather than debunk (code 9).
  double mocking_fraction = 0.2;
  // Pareto tail index for popularity draws.
  double popularity_alpha = 1.2;
  std::size_t comments_per_video = 5;
  std::size_t min_seed_promoting = 40;
  std::size_t min_seed_debunking = 40;
};

void validate_catalog_config(const CatalogConfig& config);

struct CatalogEntry {
  VideoRecord video;
  double popularity = 0.0;  // in [0, 1]
  std::vector<std::string> comments;
  AnnotationCode ground_truth_code{0};

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

// Immutable after construction; shared read-only between sessions.
class Catalog {
 public:
  Catalog(std::vector<Topic> topics, std::vector<CatalogEntry> entries);

  const std::vector<Topic>& topics() const { return topics_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }

  const CatalogEntry* find(const VideoId& id) const;
  const CatalogEntry& at(const VideoId& id) const;  // throws NotFound
  std::size_t index_of(const VideoId& id) const;    // throws NotFound

  const Topic& topic(const std::string& topic_id) const;  // throws NotFound
  // Topic id owning a query string.
  std::optional<std::string> topic_of_query(const std::string& query) const;

  // Most popular videos of a topic with the given ground-truth stance, most
  // popular first.
  std::vector<VideoId> most_popular(const std::string& topic_id, Stance stance,
                                    std::size_t n) const;

  std::size_t count(const std::string& topic_id, Stance stance) const;

  std::string to_jsonl() const;
  void export_jsonl(const std::filesystem::path& path) const;
  static Catalog import_jsonl(const std::filesystem::path& path);

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.topics_ == b.topics_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<Topic> topics_;
  std::vector<CatalogEntry> entries_;
  std::unordered_map<VideoId, std::size_t> index_;
  std::unordered_map<std::string, std::string> query_topic_;
};

// Deterministic in the config (including its seed). Throws InvalidArgument
// when an audited topic cannot supply the minimum seed sets.
Catalog generate_catalog(const CatalogConfig& config);

// Manual labels carrying each video's ground-truth code.
annotation::LabelStore ground_truth_labels(const Catalog& catalog,
                                           const std::string& annotator_id = "simulator");

}  // namespace sockaudit::platform
