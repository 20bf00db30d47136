#include "sockaudit/platform/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::platform {
namespace {

using nlohmann::json;

constexpr const char* kCatalogSchema = "sockaudit.catalog";
constexpr int kCatalogVersion = 1;
constexpr double kTopicTermRate = 0.25;
constexpr std::size_t kChannelsPerGroup = 15;

const std::vector<std::string>& pool_for(const Vocabulary& v, Stance s) {
  switch (s) {
    case Stance::kPromoting:
      return v.promoting;
    case Stance::kDebunking:
      return v.debunking;
    case Stance::kNeutral:
      return v.neutral;
  }
  return v.neutral;
}

class TextGenerator {
 public:
  TextGenerator(const CatalogConfig& config, std::mt19937_64& rng) : config_(config), rng_(rng) {}

  std::string make(std::size_t tokens, Stance stance, const std::vector<std::string>& keywords,
                   bool topical) {
    std::string out;
    for (std::size_t i = 0; i < tokens; ++i) {
      if (i > 0) out.push_back(' ');
      out += token(stance, keywords, topical);
    }
    return out;
  }

 private:
  const std::string& pick(const std::vector<std::string>& pool) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng_)];
  }

  const std::string& token(Stance stance, const std::vector<std::string>& keywords, bool topical) {
    const double r = unit_(rng_);
    if (r < config_.stance_term_rate) {
      Stance source = stance;
      if (unit_(rng_) < config_.cross_talk) {
        const Stance others[2] = {
            stance == Stance::kPromoting ? Stance::kNeutral : Stance::kPromoting,
            stance == Stance::kDebunking ? Stance::kNeutral : Stance::kDebunking};
        source = others[unit_(rng_) < 0.5 ? 0 : 1];
      }
      return pick(pool_for(config_.vocabulary, source));
    }
    if (topical && !keywords.empty() && r < config_.stance_term_rate + kTopicTermRate) {
      return pick(keywords);
    }
    return pick(config_.vocabulary.filler);
  }

  const CatalogConfig& config_;
  std::mt19937_64& rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

std::string padded(std::size_t n, int width) {
  std::string s = std::to_string(n);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

char stance_letter(Stance s) {
  return s == Stance::kPromoting ? 'p' : s == Stance::kDebunking ? 'd' : 'n';
}

json topic_to_json(const Topic& t) {
  return json{{"topic_id", t.topic_id}, {"display_name", t.display_name}, {"queries", t.queries}};
}

Topic topic_from_json(const json& j) {
  return Topic{j.at("topic_id").get<std::string>(), j.at("display_name").get<std::string>(),
               j.at("queries").get<std::vector<std::string>>()};
}

}  // namespace

Vocabulary default_vocabulary() {
  Vocabulary v;
  v.promoting = {"truth",     "exposed",   "coverup",   "hidden",    "secret",    "proof",
                 "awakening", "lies",      "agenda",    "sheeple",   "suppressed", "banned",
                 "insider",   "whistleblower", "staged", "hoax",     "elite",     "control",
                 "mainstream", "deception", "wakeup",   "evidence",  "forbidden", "censored",
                 "plandemic", "orchestrated", "mindblowing", "revealed", "silenced", "conspirators"};
  v.debunking = {"debunked",  "fact",      "science",   "scientist", "explained", "myth",
                 "misconception", "physics", "experts", "peer",     "reviewed",  "disproved",
                 "analysis",  "investigation", "refuted", "falsehood", "misinformation", "research",
                 "engineer",  "astronomer", "chemist",  "study",     "data",      "measured",
                 "verified",  "skeptic",   "correcting", "nonsense", "fallacy",  "rebuttal"};
  v.neutral = {"discussion", "debate",   "interview", "podcast",  "opinions",  "perspectives",
               "reaction",   "history",  "documentary", "archive", "footage",  "report",
               "compilation", "anniversary", "coverage", "timeline", "overview", "questions",
               "panel",      "episode",  "live",      "stream",    "recap",     "recording"};
  v.filler = {"video",  "today",  "channel", "watch",  "people", "world",  "thing",  "really",
              "look",   "new",    "time",    "year",   "part",   "full",   "best",   "show",
              "music",  "official", "vlog",  "day",    "life",   "story",  "guide",  "home",
              "cooking", "travel", "funny",  "game",   "review", "top",    "ten",    "moment",
              "week",   "love",   "city",    "family", "friends", "morning", "night", "learn"};
  return v;
}

std::vector<TopicContent> default_topics(const StanceCounts& counts) {
  std::vector<TopicContent> topics;
  topics.push_back({{"911", "9/11",
                     {"9/11 conspiracy", "9/11 inside job", "twin towers demolition",
                      "building 7 collapse", "9/11 truth"}},
                    counts,
                    {"towers", "attack", "demolition", "wtc", "building", "pentagon", "september"}});
  topics.push_back({{"moon-landing", "Moon landing",
                     {"moon landing fake", "apollo 11 hoax", "moon landing staged",
                      "nasa moon footage", "moon hoax"}},
                    counts,
                    {"moon", "apollo", "nasa", "astronaut", "landing", "lunar", "armstrong"}});
  topics.push_back({{"chemtrails", "Chemtrails",
                     {"chemtrails", "chemtrails proof", "geoengineering planes",
                      "chemtrail spraying", "contrails vs chemtrails"}},
                    counts,
                    {"chemtrail", "contrail", "aircraft", "spraying", "sky", "geoengineering", "planes"}});
  topics.push_back({{"flat-earth", "Flat earth",
                     {"flat earth proof", "flat earth british", "earth is flat",
                      "flat earth horizon", "globe earth lie"}},
                    counts,
                    {"flat", "globe", "horizon", "curvature", "earth", "firmament", "antarctica"}});
  topics.push_back({{"vaccines", "Anti-vaccination",
                     {"anti vaccination", "vaccines autism", "vaccine side effects",
                      "vaccine injury", "vaccines dangerous"}},
                    counts,
                    {"vaccine", "vaccination", "autism", "injection", "immunity", "measles", "shots"}});
  return topics;
}

void validate_catalog_config(const CatalogConfig& config) {
  if (config.topics.empty()) throw InvalidArgument("catalog config has no topics");
  std::vector<std::string> ids;
  for (const auto& t : config.topics) {
    validate_topic(t.topic);
    ids.push_back(t.topic.topic_id);
    if (t.audited) {
      if (t.counts.promoting < config.min_seed_promoting) {
        throw InvalidArgument("topic '" + t.topic.topic_id + "' has " +
                              std::to_string(t.counts.promoting) + " promoting videos, needs " +
                              std::to_string(config.min_seed_promoting));
      }
      if (t.counts.debunking < config.min_seed_debunking) {
        throw InvalidArgument("topic '" + t.topic.topic_id + "' has " +
                              std::to_string(t.counts.debunking) + " debunking videos, needs " +
                              std::to_string(config.min_seed_debunking));
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvalidArgument("duplicate topic id in catalog config");
  }
  const auto& v = config.vocabulary;
  if (v.promoting.empty() || v.debunking.empty() || v.neutral.empty() || v.filler.empty()) {
    throw InvalidArgument("every vocabulary pool must be non-empty");
  }
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(config.stance_term_rate) || !in_unit(config.cross_talk) ||
      !in_unit(config.unrelated_fraction) || !in_unit(config.mocking_fraction) ||
      config.stance_term_rate + kTopicTermRate > 1.0) {
    throw InvalidArgument("catalog text rates must lie in [0, 1]");
  }
  if (!(config.popularity_alpha > 0.0)) throw InvalidArgument("popularity_alpha must be positive");
}

Catalog::Catalog(std::vector<Topic> topics, std::vector<CatalogEntry> entries)
    : topics_(std::move(topics)), entries_(std::move(entries)) {
  for (const auto& t : topics_) {
    for (const auto& q : t.queries) {
      if (!query_topic_.emplace(q, t.topic_id).second) {
        throw InvalidArgument("query '" + q + "' belongs to more than one topic");
      }
    }
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& v = entries_[i].video;
    if (v.duration.count() <= 0) throw InvalidArgument("video " + v.video_id + " has no duration");
    if (!index_.emplace(v.video_id, i).second) {
      throw InvalidArgument("duplicate video id " + v.video_id);
    }
  }
}

const CatalogEntry* Catalog::find(const VideoId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const CatalogEntry& Catalog::at(const VideoId& id) const { return entries_[index_of(id)]; }

std::size_t Catalog::index_of(const VideoId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw NotFound("unknown video " + id);
  return it->second;
}

const Topic& Catalog::topic(const std::string& topic_id) const {
  for (const auto& t : topics_) {
    if (t.topic_id == topic_id) return t;
  }
  throw NotFound("unknown topic " + topic_id);
}

std::optional<std::string> Catalog::topic_of_query(const std::string& query) const {
  auto it = query_topic_.find(query);
  if (it == query_topic_.end()) return std::nullopt;
  return it->second;
}

std::vector<VideoId> Catalog::most_popular(const std::string& topic_id, Stance stance,
                                           std::size_t n) const {
  std::vector<const CatalogEntry*> matches;
  for (const auto& e : entries_) {
    if (e.video.topic == topic_id && e.video.true_stance == stance) matches.push_back(&e);
  }
  std::stable_sort(matches.begin(), matches.end(), [](const auto* a, const auto* b) {
    return a->popularity > b->popularity;
  });
  std::vector<VideoId> ids;
  for (std::size_t i = 0; i < matches.size() && i < n; ++i) ids.push_back(matches[i]->video.video_id);
  return ids;
}

std::size_t Catalog::count(const std::string& topic_id, Stance stance) const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.video.topic == topic_id && e.video.true_stance == stance;
  }));
}

std::string Catalog::to_jsonl() const {
  std::ostringstream out;
  json topics = json::array();
  for (const auto& t : topics_) topics.push_back(topic_to_json(t));
  out << json{{"schema", kCatalogSchema}, {"version", kCatalogVersion}, {"topics", topics}}.dump()
      << '\n';
  for (const auto& e : entries_) {
    const auto& v = e.video;
    json j{{"video_id", v.video_id},
           {"topic", v.topic},
           {"title", v.title},
           {"description", v.description},
           {"transcript", v.transcript},
           {"channel_id", v.channel_id},
           {"duration_s", v.duration.count()},
           {"popularity", e.popularity},
           {"comments", e.comments},
           {"code", e.ground_truth_code.value()}};
    if (v.true_stance) j["true_stance"] = stance_value(*v.true_stance);
    out << j.dump() << '\n';
  }
  return out.str();
}

void Catalog::export_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write catalog '" + path.string() + "'");
  out << to_jsonl();
  if (!out) throw Error("failed writing catalog '" + path.string() + "'");
}

Catalog Catalog::import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot read catalog '" + path.string() + "'");
  std::string line;
  std::vector<Topic> topics;
  std::vector<CatalogEntry> entries;
  bool header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (!header) {
        if (j.value("schema", "") != kCatalogSchema) throw ParseError("missing catalog header");
        for (const auto& t : j.at("topics")) topics.push_back(topic_from_json(t));
        header = true;
        continue;
      }
      CatalogEntry e;
      e.video.video_id = j.at("video_id").get<std::string>();
      e.video.topic = j.at("topic").get<std::string>();
      e.video.title = j.at("title").get<std::string>();
      e.video.description = j.at("description").get<std::string>();
      e.video.transcript = j.at("transcript").get<std::string>();
      e.video.channel_id = j.at("channel_id").get<std::string>();
      e.video.duration = Seconds(j.at("duration_s").get<long>());
      if (j.contains("true_stance")) {
        e.video.true_stance = stance_from_int(j.at("true_stance").get<int>());
        if (!e.video.true_stance) throw ParseError("invalid true_stance");
      }
      e.popularity = j.at("popularity").get<double>();
      e.comments = j.at("comments").get<std::vector<std::string>>();
      e.ground_truth_code = AnnotationCode(j.at("code").get<int>());
      entries.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + ex.what());
  } catch (const InvalidArgument& ex) {
    throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + ex.what());
  }
  if (!header) throw ParseError(path.string() + ": empty catalog");
  return Catalog(std::move(topics), std::move(entries));
}

Catalog generate_catalog(const CatalogConfig& config) {
  validate_catalog_config(config);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> minutes(std::log(14.0), 0.9);
  TextGenerator text(config, rng);

  std::vector<Topic> topics;
  std::vector<CatalogEntry> entries;
  std::vector<double> raw_popularity;
  for (const auto& content : config.topics) {
    topics.push_back(content.topic);
    std::vector<CatalogEntry> group;
    auto emit = [&](Stance stance, std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) {
        CatalogEntry e;
        bool topical = true;
        int code = stance_value(stance);
        if (stance == Stance::kNeutral && unit(rng) < config.unrelated_fraction) {
          topical = false;
          code = 5;
        } else if (stance == Stance::kDebunking && unit(rng) < config.mocking_fraction) {
          code = 9;
        }
        e.ground_truth_code = AnnotationCode(code);
        e.video.topic = content.topic.topic_id;
        e.video.true_stance = stance;
        e.video.title = text.make(7, stance, content.keywords, topical);
        e.video.description = text.make(25, stance, content.keywords, topical);
        e.video.transcript = text.make(120, stance, content.keywords, topical);
        std::uniform_int_distribution<std::size_t> channel(0, kChannelsPerGroup - 1);
        e.video.channel_id = "ch-" + content.topic.topic_id + "-" + stance_letter(stance) +
                             padded(channel(rng), 2);
        const double m = std::clamp(minutes(rng), 1.0, 240.0);
        e.video.duration = Seconds(std::max<long>(60, std::lround(m * 60.0)));
        for (std::size_t c = 0; c < config.comments_per_video; ++c) {
          e.comments.push_back(text.make(12, stance, content.keywords, topical));
        }
        group.push_back(std::move(e));
      }
    };
    emit(Stance::kPromoting, content.counts.promoting);
    emit(Stance::kDebunking, content.counts.debunking);
    emit(Stance::kNeutral, content.counts.neutral);
    std::shuffle(group.begin(), group.end(), rng);
    for (std::size_t i = 0; i < group.size(); ++i) {
      group[i].video.video_id = content.topic.topic_id + "-" + padded(i + 1, 4);
      // Pareto draw, x >= 1.
      raw_popularity.push_back(std::pow(1.0 - unit(rng), -1.0 / config.popularity_alpha));
      entries.push_back(std::move(group[i]));
    }
  }
  // Log scale keeps the long tail while mapping onto [0, 1].
  double max_log = 0.0;
  for (double x : raw_popularity) max_log = std::max(max_log, std::log(x));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].popularity = max_log > 0.0 ? std::log(raw_popularity[i]) / max_log : 0.0;
  }
  return Catalog(std::move(topics), std::move(entries));
}

annotation::LabelStore ground_truth_labels(const Catalog& catalog, const std::string& annotator_id) {
  annotation::LabelStore store;
  std::uint64_t ts = 1;
  for (const auto& e : catalog.entries()) {
    annotation::LabelRecord r;
    r.video_id = e.video.video_id;
    r.code = e.ground_truth_code;
    r.annotator_id = annotator_id;
    r.source = annotation::LabelSource::kManual;
    r.timestamp = ts++;
    store.add(std::move(r));
  }
  return store;
}

}  // namespace sockaudit::platform
