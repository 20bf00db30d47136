#include "sockaudit/report/study_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::report {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + " must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config field '" + where(it.key()) + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json& raw(const std::string& key) { return j_.at(key); }

  void read(const std::string& key, double& out, double lo, double hi) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi) {
      throw ConfigError(where(key) + " must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    out = x;
  }

  template <typename Int>
  void read(const std::string& key, Int& out, std::uint64_t lo) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(where(key) + " must be a non-negative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x < lo) throw ConfigError(where(key) + " must be at least " + std::to_string(lo));
    out = static_cast<Int>(x);
  }

  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    out = v.get<std::string>();
  }

 private:
  static std::string fmt(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Parse>
auto parse_enum(Section& s, const std::string& key, const std::string& text, Parse parse) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(s.where(key) + ": " + e.what());
  }
}

std::string below_threshold_name(annotation::BelowThresholdFallback f) {
  return f == annotation::BelowThresholdFallback::kNeutral ? "neutral" : "discard";
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  StudyConfig c;
  Section top(root, "");
  top.read("study_id", c.study_id);
  top.read("master_seed", c.master_seed, 0);
  top.read("workers", c.workers, 1);
  if (top.has("time_mode")) {
    std::string mode;
    top.read("time_mode", mode);
    c.time_mode = parse_enum(top, "time_mode", mode, scenario::time_mode_from_string);
  }

  if (top.has("parameters")) {
    Section s(top.raw("parameters"), "parameters");
    auto& p = c.parameters;
    s.read("n_prom", p.n_prom, 1);
    s.read("n_deb", p.n_deb, 1);
    std::uint64_t minutes = static_cast<std::uint64_t>(p.t_watch.count());
    s.read("t_watch_min", minutes, 1);
    p.t_watch = std::chrono::minutes(minutes);
    minutes = static_cast<std::uint64_t>(p.t_wait.count());
    s.read("t_wait_min", minutes, 1);
    p.t_wait = std::chrono::minutes(minutes);
    s.read("n_q", p.n_q, 1);
    s.read("f_q", p.f_q, 1);
    s.read("runs_per_topic", p.runs_per_topic, 1);
    s.read("top_n_metric", p.top_n_metric, 1);
  }
  try {
    validate_parameters(c.parameters);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("parameters: ") + e.what());
  }

  if (top.has("catalog")) {
    Section s(top.raw("catalog"), "catalog");
    auto& cc = c.catalog;
    s.read("seed", cc.seed, 0);
    if (s.has("counts")) {
      Section k(s.raw("counts"), "catalog.counts");
      platform::StanceCounts counts{100, 100, 300};
      k.read("promoting", counts.promoting, 0);
      k.read("debunking", counts.debunking, 0);
      k.read("neutral", counts.neutral, 0);
      cc.topics = platform::default_topics(counts);
    }
    s.read("stance_term_rate", cc.stance_term_rate, 0.0, 0.75);
    s.read("cross_talk", cc.cross_talk, 0.0, 1.0);
    s.read("unrelated_fraction", cc.unrelated_fraction, 0.0, 1.0);
    s.read("mocking_fraction", cc.mocking_fraction, 0.0, 1.0);
    s.read("popularity_alpha", cc.popularity_alpha, 1e-6, 1e6);
    s.read("comments_per_video", cc.comments_per_video, 0);
  }
  c.catalog.min_seed_promoting = c.parameters.n_prom;
  c.catalog.min_seed_debunking = c.parameters.n_deb;

  if (top.has("platform")) {
    Section s(top.raw("platform"), "platform");
    s.read("preset", c.preset);
    try {
      c.personalization = platform::preset(c.preset);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("platform.preset: ") + e.what());
    }
    auto& p = c.personalization;
    constexpr double kMax = 1e6;
    s.read("history_weight", p.history_weight, 0.0, kMax);
    s.read("recency_weight", p.recency_weight, 0.0, kMax);
    s.read("search_personalization", p.search_personalization, 0.0, kMax);
    s.read("noise_scale", p.noise_scale, 0.0, kMax);
    s.read("popularity_weight", p.popularity_weight, 0.0, kMax);
    s.read("topic_weight", p.topic_weight, 0.0, kMax);
    s.read("recency_window", p.recency_window, 1);
    s.read("history_capacity", p.history_capacity, 1);
  }

  if (top.has("topics")) {
    const auto& t = top.raw("topics");
    if (!t.is_array()) throw ConfigError("topics must be an array of topic ids");
    for (const auto& id : t) {
      if (!id.is_string()) throw ConfigError("topics must be an array of topic ids");
      c.topics.push_back(id.get<std::string>());
    }
    std::set<std::string> known;
    for (const auto& tc : c.catalog.topics) known.insert(tc.topic.topic_id);
    for (const auto& id : c.topics) {
      if (!known.count(id)) throw ConfigError("topics: unknown topic '" + id + "'");
    }
  }

  auto& h = c.evaluation.hypotheses;
  h.extraction.list_top_n = c.parameters.top_n_metric;
  if (top.has("evaluation")) {
    Section s(top.raw("evaluation"), "evaluation");
    s.read("alpha", h.alpha, 1e-12, 1.0);
    s.read("window", h.extraction.window, 1);
    s.read("search_top_n", h.extraction.search_top_n, 1);
    if (s.has("s1_anchor")) {
      std::string a;
      s.read("s1_anchor", a);
      h.extraction.s1_anchor = parse_enum(s, "s1_anchor", a, stats::s1_anchor_from_string);
    }
    if (s.has("p_value_method")) {
      std::string m;
      s.read("p_value_method", m);
      h.method = parse_enum(s, "p_value_method", m, stats::p_value_method_from_string);
    }
    s.read("bootstrap_resamples", h.bootstrap_resamples, 0);
    s.read("bootstrap_seed", h.bootstrap_seed, 0);
    s.read("ci_level", h.ci_level, 0.0, 1.0);
    s.read("max_unlabeled_fraction", c.evaluation.max_unlabeled_fraction, 0.0, 1.0);
    s.read("decision_threshold", c.evaluation.resolution.decision_threshold, 0.0, 1.0);
    if (s.has("below_threshold")) {
      std::string f;
      s.read("below_threshold", f);
      if (f == "discard") {
        c.evaluation.resolution.fallback = annotation::BelowThresholdFallback::kDiscard;
      } else if (f == "neutral") {
        c.evaluation.resolution.fallback = annotation::BelowThresholdFallback::kNeutral;
      } else {
        throw ConfigError("evaluation.below_threshold must be \"discard\" or \"neutral\"");
      }
    }
  }
  if (h.extraction.window > c.parameters.n_prom || h.extraction.window > c.parameters.n_deb) {
    throw ConfigError("evaluation.window must not exceed n_prom or n_deb");
  }
  try {
    validate_catalog_config(c.catalog);
    platform::validate_personalization(c.personalization);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_study_config(buf.str());
}

std::string canonical_json(const StudyConfig& c) {
  const auto& p = c.parameters;
  const auto& cc = c.catalog;
  const auto& pc = c.personalization;
  const auto& h = c.evaluation.hypotheses;
  // Every topic shares the same counts.
  const platform::StanceCounts k = cc.topics.empty() ? platform::StanceCounts{} : cc.topics.front().counts;
  const json counts{{"promoting", k.promoting}, {"debunking", k.debunking}, {"neutral", k.neutral}};
  json j{
      {"study_id", c.study_id},
      {"master_seed", c.master_seed},
      {"workers", c.workers},
      {"time_mode", std::string(scenario::to_string(c.time_mode))},
      {"parameters",
       {{"n_prom", p.n_prom},
        {"n_deb", p.n_deb},
        {"t_watch_min", p.t_watch.count()},
        {"t_wait_min", p.t_wait.count()},
        {"n_q", p.n_q},
        {"f_q", p.f_q},
        {"runs_per_topic", p.runs_per_topic},
        {"top_n_metric", p.top_n_metric}}},
      {"catalog",
       {{"seed", cc.seed},
        {"counts", counts},
        {"stance_term_rate", cc.stance_term_rate},
        {"cross_talk", cc.cross_talk},
        {"unrelated_fraction", cc.unrelated_fraction},
        {"mocking_fraction", cc.mocking_fraction},
        {"popularity_alpha", cc.popularity_alpha},
        {"comments_per_video", cc.comments_per_video}}},
      {"platform",
       {{"preset", c.preset},
        {"history_weight", pc.history_weight},
        {"recency_weight", pc.recency_weight},
        {"search_personalization", pc.search_personalization},
        {"noise_scale", pc.noise_scale},
        {"popularity_weight", pc.popularity_weight},
        {"topic_weight", pc.topic_weight},
        {"recency_window", pc.recency_window},
        {"history_capacity", pc.history_capacity}}},
      {"topics", c.topics},
      {"evaluation",
       {{"alpha", h.alpha},
        {"window", h.extraction.window},
        {"search_top_n", h.extraction.search_top_n},
        {"s1_anchor", std::string(stats::to_string(h.extraction.s1_anchor))},
        {"p_value_method", std::string(stats::to_string(h.method))},
        {"bootstrap_resamples", h.bootstrap_resamples},
        {"bootstrap_seed", h.bootstrap_seed},
        {"ci_level", h.ci_level},
        {"max_unlabeled_fraction", c.evaluation.max_unlabeled_fraction},
        {"decision_threshold", c.evaluation.resolution.decision_threshold},
        {"below_threshold", below_threshold_name(c.evaluation.resolution.fallback)}}}};
  return j.dump(2);
}

std::string config_digest(const StudyConfig& config) {
  const auto text = canonical_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sockaudit::report
