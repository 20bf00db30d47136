#include "sockaudit/platform/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::platform {
namespace {

std::size_t slot(Stance s) { return static_cast<std::size_t>(stance_value(s) + 1); }

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void validate_personalization(const PersonalizationConfig& c) {
  const std::pair<const char*, double> weights[] = {
      {"history_weight", c.history_weight},
      {"recency_weight", c.recency_weight},
      {"search_personalization", c.search_personalization},
      {"noise_scale", c.noise_scale},
      {"popularity_weight", c.popularity_weight},
      {"topic_weight", c.topic_weight}};
  for (const auto& [name, value] : weights) {
    if (!std::isfinite(value) || value < 0.0) {
      throw InvalidArgument(std::string(name) + " must be finite and non-negative");
    }
  }
  if (c.recency_window < 1) throw InvalidArgument("recency_window must be at least 1");
  if (c.history_capacity < 1) throw InvalidArgument("history_capacity must be at least 1");
}

PersonalizationConfig preset(const std::string& name) {
  PersonalizationConfig c;
  if (name == "inert") {
    c.noise_scale = 0.15;
    c.popularity_weight = 4.0;
    c.topic_weight = 0.0;
    return c;
  }
  if (name == "contextual") {
    c.history_weight = 0.15;
    c.recency_weight = 0.35;
    c.search_personalization = 0.0;
    c.noise_scale = 0.15;
    c.recency_window = 5;
    c.popularity_weight = 4.0;
    c.topic_weight = 1.0;
    c.history_capacity = 40;
    return c;
  }
  throw InvalidArgument("unknown platform preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"inert", "contextual"}; }

double affinity(const std::array<std::size_t, 3>& counts, std::size_t length, std::size_t capacity,
                Stance candidate) {
  if (length == 0) return 0.0;
  const double share = static_cast<double>(counts[slot(candidate)]) / static_cast<double>(length);
  const double fill =
      static_cast<double>(std::min(length, capacity)) / static_cast<double>(capacity);
  return (2.0 * share - 1.0) * fill;
}

UserSession::UserSession(std::string session_id, std::uint64_t seed)
    : session_id_(std::move(session_id)), seed_(seed), rng_(seed) {}

SimulatedPlatform::SimulatedPlatform(std::shared_ptr<const Catalog> catalog,
                                     PersonalizationConfig config)
    : catalog_(std::move(catalog)), config_(config) {
  if (!catalog_) throw InvalidArgument("platform needs a catalog");
  validate_personalization(config_);
  const auto& entries = catalog_->entries();
  all_members_.resize(entries.size());
  std::iota(all_members_.begin(), all_members_.end(), std::size_t{0});
  title_tokens_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    topic_members_[entries[i].video.topic].push_back(i);
    title_tokens_.push_back(words(entries[i].video.title));
  }
}

Stance SimulatedPlatform::stance_at(std::size_t index) const {
  return catalog_->entries()[index].video.true_stance.value_or(Stance::kNeutral);
}

SimulatedPlatform::Profile SimulatedPlatform::profile(const UserSession& session) const {
  Profile p;
  const std::size_t n = session.stances_.size();
  const std::size_t k = config_.recency_window;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = slot(session.stances_[i]);
    ++p.all[s];
    if (i + k >= n) ++p.recent[s];
  }
  p.all_length = n;
  p.recent_length = std::min(n, k);
  for (const auto& w : session.history_) ++p.topics[catalog_->at(w.video_id).video.topic];
  return p;
}

ExposureSnapshot SimulatedPlatform::rank(UserSession& session, SnapshotKind kind,
                                         const std::vector<std::size_t>& candidates,
                                         const std::vector<double>& base_scores,
                                         std::size_t limit) const {
  std::vector<std::pair<double, std::size_t>> scored(candidates.size());
  const double sigma = config_.noise_scale;
  std::uniform_real_distribution<double> noise(-sigma, sigma);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    // One draw per candidate even when sigma is 0, so the RNG stream does not
    // depend on the configuration.
    const double u = noise(session.rng_);
    scored[i] = {base_scores[i] + (sigma > 0.0 ? u : 0.0), candidates[i]};
  }
  const std::size_t n = std::min(limit, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  ExposureSnapshot snap;
  snap.kind = kind;
  snap.run_id = session.session_id_;
  snap.watch_index = session.history_.size();
  std::vector<VideoId> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(catalog_->entries()[scored[i].second].video.video_id);
  snap.items = rank_items(ids);
  return snap;
}

ExposureSnapshot SimulatedPlatform::search(UserSession& session, const std::string& query,
                                           std::size_t limit) const {
  const auto topic = catalog_->topic_of_query(query);
  if (!topic) throw NotFound("unknown query '" + query + "'");
  const auto it = topic_members_.find(*topic);
  static const std::vector<std::size_t> kNone;
  const auto& candidates = it == topic_members_.end() ? kNone : it->second;
  const auto q = words(query);
  const auto p = profile(session);
  std::vector<double> base(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto idx = candidates[i];
    const auto& title = title_tokens_[idx];
    std::size_t hits = 0;
    for (const auto& w : q) hits += std::binary_search(title.begin(), title.end(), w) ? 1 : 0;
    const double relevance = 1.0 + 0.5 * static_cast<double>(hits) / static_cast<double>(q.size());
    base[i] = relevance + config_.popularity_weight * catalog_->entries()[idx].popularity +
              config_.search_personalization *
                  affinity(p.all, p.all_length, config_.history_capacity, stance_at(idx));
  }
  auto snap = rank(session, SnapshotKind::kSearch, candidates, base, limit);
  snap.query = query;
  return snap;
}

WatchResult SimulatedPlatform::watch(UserSession& session, const VideoId& video_id,
                                     Seconds watched, std::size_t limit) const {
  const std::size_t watched_idx = catalog_->index_of(video_id);
  const auto& video = catalog_->entries()[watched_idx].video;
  if (watched.count() <= 0 || watched > video.duration) {
    throw InvalidArgument("watch time for " + video_id + " must lie in (0, duration]");
  }
  session.history_.push_back({video_id, watched});
  session.stances_.push_back(stance_at(watched_idx));

  const auto p = profile(session);
  std::vector<std::size_t> candidates;
  const auto& members = topic_members_.at(video.topic);
  candidates.reserve(members.size());
  for (auto idx : members) {
    if (idx != watched_idx) candidates.push_back(idx);
  }
  std::vector<double> base(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto idx = candidates[i];
    const Stance s = stance_at(idx);
    base[i] = config_.popularity_weight * catalog_->entries()[idx].popularity +
              config_.history_weight * affinity(p.all, p.all_length, config_.history_capacity, s) +
              config_.recency_weight *
                  affinity(p.recent, p.recent_length, config_.recency_window, s);
  }
  WatchResult out;
  out.recommendations = rank(session, SnapshotKind::kRecommendation, candidates, base,
                             std::min(limit, kMaxRecommendationItems));
  out.home = home(session);
  return out;
}

ExposureSnapshot SimulatedPlatform::home(UserSession& session, std::size_t limit) const {
  const auto p = profile(session);
  const auto& entries = catalog_->entries();
  std::vector<double> base(all_members_.size());
  for (std::size_t i = 0; i < all_members_.size(); ++i) {
    const auto& e = entries[i];
    const Stance s = stance_at(i);
    double topic_share = 0.0;
    if (p.all_length > 0) {
      auto it = p.topics.find(e.video.topic);
      if (it != p.topics.end()) {
        topic_share = static_cast<double>(it->second) / static_cast<double>(p.all_length);
      }
    }
    base[i] = config_.popularity_weight * e.popularity + config_.topic_weight * topic_share +
              config_.history_weight * affinity(p.all, p.all_length, config_.history_capacity, s) +
              config_.recency_weight *
                  affinity(p.recent, p.recent_length, config_.recency_window, s);
  }
  return rank(session, SnapshotKind::kHome, all_members_, base, limit);
}

void SimulatedPlatform::reset_history(UserSession& session) const {
  session.history_.clear();
  session.stances_.clear();
  session.rng_.seed(session.seed_);
}

}  // namespace sockaudit::platform
