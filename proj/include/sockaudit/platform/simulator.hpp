#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sockaudit/core/types.hpp"
#include "sockaudit/platform/catalog.hpp"

namespace sockaudit::platform {

struct PersonalizationConfig {
  double history_weight = 0.0;          // w_h, whole watch history
  double recency_weight = 0.0;          // w_r, last recency_window watches
  double search_personalization = 0.0;  // w_s
  double noise_scale = 0.0;             // sigma, uniform noise in [-sigma, sigma]
  std::size_t recency_window = 1;       // k
  double popularity_weight = 1.0;       // w_p
  // Home page pull towards topics present in the history.
  double topic_weight = 1.0;
  // History length at which the history affinity reaches full strength.
  std::size_t history_capacity = 40;

  friend bool operator==(const PersonalizationConfig&, const PersonalizationConfig&) = default;
};

void validate_personalization(const PersonalizationConfig& config);

// "inert" disables every personalization term; "contextual" weighs the recent
// window above the whole history and leaves search unpersonalized.
PersonalizationConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Stance affinity of a candidate towards a window of watched stances, in
// [-1, 1]: (2 * share of the candidate's stance - 1), scaled by how full the
// window is relative to its capacity. An empty window gives 0.
double affinity(const std::array<std::size_t, 3>& stance_counts, std::size_t window_length,
                std::size_t capacity, Stance candidate);

struct WatchedVideo {
  VideoId video_id;
  Seconds watched{0};

  friend bool operator==(const WatchedVideo&, const WatchedVideo&) = default;
};

class UserSession {
 public:
  UserSession(std::string session_id, std::uint64_t seed);

  const std::string& session_id() const { return session_id_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<WatchedVideo>& history() const { return history_; }

 private:
  friend class SimulatedPlatform;

  std::string session_id_;
  std::uint64_t seed_;
  std::vector<WatchedVideo> history_;
  std::vector<Stance> stances_;
  std::mt19937_64 rng_;
};

struct WatchResult {
  ExposureSnapshot recommendations;
  ExposureSnapshot home;
};

// Thread-safe for distinct sessions: the platform itself holds only the
// immutable catalog and configuration.
class SimulatedPlatform {
 public:
  SimulatedPlatform(std::shared_ptr<const Catalog> catalog, PersonalizationConfig config);

  const Catalog& catalog() const { return *catalog_; }
  const PersonalizationConfig& config() const { return config_; }

  // Throws NotFound for a query outside every topic's query set.
  ExposureSnapshot search(UserSession& session, const std::string& query,
                          std::size_t limit = kMinListingItems) const;

  // Appends to the history, then returns the watch-page recommendations
  // (the watched video excluded) and the home page. Throws NotFound for an
  // unknown video and InvalidArgument unless 0 < watched <= duration.
  WatchResult watch(UserSession& session, const VideoId& video_id, Seconds watched,
                    std::size_t limit = kMaxRecommendationItems) const;

  ExposureSnapshot home(UserSession& session, std::size_t limit = kMinListingItems) const;

  // Empties the history and rewinds the session RNG to its seed.
  void reset_history(UserSession& session) const;

 private:
  struct Profile {
    std::array<std::size_t, 3> all{};
    std::array<std::size_t, 3> recent{};
    std::size_t all_length = 0;
    std::size_t recent_length = 0;
    std::unordered_map<std::string, std::size_t> topics;
  };

  Profile profile(const UserSession& session) const;
  Stance stance_at(std::size_t index) const;
  ExposureSnapshot rank(UserSession& session, SnapshotKind kind,
                        const std::vector<std::size_t>& candidates,
                        const std::vector<double>& base_scores, std::size_t limit) const;

  std::shared_ptr<const Catalog> catalog_;
  PersonalizationConfig config_;
  std::unordered_map<std::string, std::vector<std::size_t>> topic_members_;
  std::vector<std::size_t> all_members_;
  std::vector<std::vector<std::string>> title_tokens_;
};

}  // namespace sockaudit::platform
