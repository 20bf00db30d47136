#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "sockaudit/core/errors.hpp"
#include "sockaudit/metrics/metrics.hpp"
#include "sockaudit/platform/catalog.hpp"
#include "sockaudit/platform/simulator.hpp"

using namespace sockaudit;
using namespace sockaudit::platform;

namespace {

CatalogConfig small_config(std::uint64_t seed = 3) {
  CatalogConfig c;
  c.seed = seed;
  c.topics = default_topics({45, 45, 60});
  return c;
}

std::shared_ptr<const Catalog> shared_catalog() {
  static const auto catalog = std::make_shared<const Catalog>(generate_catalog(small_config()));
  return catalog;
}

std::vector<Stance> stances_of(const ExposureSnapshot& s, const Catalog& c, std::size_t n = 10) {
  std::vector<Stance> out;
  for (const auto& item : truncate_top_n(s, n).items) out.push_back(*c.at(item.video_id).video.true_stance);
  return out;
}

double ns(const ExposureSnapshot& s, const Catalog& c) {
  return metrics::normalized_score(stances_of(s, c));
}

std::vector<VideoId> ids_of(const Catalog& c, const std::string& topic, Stance s) {
  std::vector<VideoId> out;
  for (const auto& e : c.entries()) {
    if (e.video.topic == topic && e.video.true_stance == s) out.push_back(e.video.video_id);
  }
  return out;
}

WatchResult watch_full(const SimulatedPlatform& p, UserSession& s, const VideoId& id) {
  return p.watch(s, id, p.catalog().at(id).video.duration);
}

PersonalizationConfig quiet() {
  PersonalizationConfig c;
  c.noise_scale = 0.0;
  return c;
}

}  // namespace

TEST(Catalog, GenerationIsDeterministic) {
  const auto a = generate_catalog(small_config());
  const auto b = generate_catalog(small_config());
  EXPECT_EQ(a.to_jsonl(), b.to_jsonl());
  EXPECT_NE(a.to_jsonl(), generate_catalog(small_config(4)).to_jsonl());
}

TEST(Catalog, StanceHistogramMatchesCounts) {
  const auto& c = *shared_catalog();
  ASSERT_EQ(c.topics().size(), 5u);
  for (const auto& t : c.topics()) {
    EXPECT_EQ(c.count(t.topic_id, Stance::kPromoting), 45u);
    EXPECT_EQ(c.count(t.topic_id, Stance::kDebunking), 45u);
    EXPECT_EQ(c.count(t.topic_id, Stance::kNeutral), 60u);
    EXPECT_EQ(t.queries.size(), 5u);
  }
  EXPECT_EQ(c.entries().size(), 750u);
}

TEST(Catalog, GroundTruthCodesAgreeWithStances) {
  const auto& c = *shared_catalog();
  std::map<int, std::size_t> codes;
  for (const auto& e : c.entries()) {
    ++codes[e.ground_truth_code.value()];
    EXPECT_EQ(map_code_to_stance(e.ground_truth_code), e.video.true_stance);
    EXPECT_GE(e.popularity, 0.0);
    EXPECT_LE(e.popularity, 1.0);
    EXPECT_GE(e.video.duration.count(), 60);
  }
  EXPECT_GT(codes[5], 0u);  // unrelated neutral videos
  EXPECT_GT(codes[9], 0u);  // mocking debunkers
  const auto labels = ground_truth_labels(c).resolve();
  EXPECT_EQ(labels.size(), c.entries().size());
}

TEST(Catalog, NonAuditedTopicMayHaveNoPromotingVideos) {
  auto cfg = small_config();
  cfg.topics[0].audited = false;
  cfg.topics[0].counts = {0, 5, 5};
  const auto c = generate_catalog(cfg);
  EXPECT_EQ(c.count(cfg.topics[0].topic.topic_id, Stance::kPromoting), 0u);
}

TEST(Catalog, ValidationNamesTheProblem) {
  auto cfg = small_config();
  cfg.topics[1].counts.promoting = 3;
  EXPECT_THROW(generate_catalog(cfg), InvalidArgument);
  cfg = small_config();
  cfg.cross_talk = 1.5;
  EXPECT_THROW(validate_catalog_config(cfg), InvalidArgument);
  cfg = small_config();
  cfg.topics[1].topic.topic_id = cfg.topics[0].topic.topic_id;
  EXPECT_THROW(validate_catalog_config(cfg), InvalidArgument);
}

TEST(Catalog, ExportImportRoundTrip) {
  const auto& c = *shared_catalog();
  const auto path = std::filesystem::temp_directory_path() / "sockaudit_catalog_test.jsonl";
  c.export_jsonl(path);
  const auto back = Catalog::import_jsonl(path);
  EXPECT_TRUE(back == c);
  EXPECT_EQ(back.to_jsonl(), c.to_jsonl());
}

TEST(Catalog, Lookups) {
  const auto& c = *shared_catalog();
  EXPECT_THROW(c.at("nope"), NotFound);
  EXPECT_EQ(c.find("nope"), nullptr);
  EXPECT_EQ(c.topic_of_query("flat earth proof"), "flat-earth");
  EXPECT_FALSE(c.topic_of_query("weather tomorrow"));
  const auto top = c.most_popular("vaccines", Stance::kDebunking, 5);
  ASSERT_EQ(top.size(), 5u);
  for (std::size_t i = 1; i < top.size(); ++i) {
    EXPECT_GE(c.at(top[i - 1]).popularity, c.at(top[i]).popularity);
  }
}

TEST(Presets, KnownNamesAndValidation) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(validate_personalization(preset(name)));
  EXPECT_THROW(preset("mystery"), InvalidArgument);
  auto bad = preset("contextual");
  bad.noise_scale = -1;
  EXPECT_THROW(validate_personalization(bad), InvalidArgument);
  const auto inert = preset("inert");
  EXPECT_EQ(inert.history_weight, 0.0);
  EXPECT_EQ(inert.recency_weight, 0.0);
  EXPECT_EQ(inert.search_personalization, 0.0);
}

TEST(Affinity, SignAndScaling) {
  EXPECT_EQ(affinity({0, 0, 0}, 0, 40, Stance::kPromoting), 0.0);
  // all-promoting full history: +1 for promoting candidates, -1 otherwise
  EXPECT_EQ(affinity({0, 0, 40}, 40, 40, Stance::kPromoting), 1.0);
  EXPECT_EQ(affinity({0, 0, 40}, 40, 40, Stance::kDebunking), -1.0);
  EXPECT_EQ(affinity({0, 0, 10}, 10, 40, Stance::kPromoting), 0.25);
}

TEST(Simulator, SearchWithoutPersonalizationIgnoresHistory) {
  SimulatedPlatform p(shared_catalog(), quiet());
  UserSession a("a", 1), b("b", 2);
  for (const auto& id : ids_of(p.catalog(), "chemtrails", Stance::kPromoting)) watch_full(p, a, id);
  const auto sa = p.search(a, "chemtrails"), sb = p.search(b, "chemtrails");
  EXPECT_EQ(sa.video_ids(), sb.video_ids());
  EXPECT_EQ(sa.video_ids(), p.search(a, "chemtrails").video_ids());
  EXPECT_EQ(sa.items.size(), kMinListingItems);
  EXPECT_THROW(p.search(a, "unknown query"), NotFound);
}

TEST(Simulator, SearchPersonalizationRaisesSerpScore) {
  auto cfg = quiet();
  cfg.search_personalization = 3.0;
  cfg.noise_scale = 0.3;
  SimulatedPlatform p(shared_catalog(), cfg);
  const auto prom = ids_of(p.catalog(), "moon-landing", Stance::kPromoting);
  double with = 0, without = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    UserSession fresh("f", seed), trained("t", seed);
    for (std::size_t i = 0; i < 40; ++i) watch_full(p, trained, prom[i]);
    without += metrics::serp_ms(stances_of(p.search(fresh, "moon landing fake"), p.catalog()));
    with += metrics::serp_ms(stances_of(p.search(trained, "moon landing fake"), p.catalog()));
  }
  EXPECT_GT(with, without);
}

TEST(Simulator, RecommendationsWithoutPersonalizationAreShared) {
  SimulatedPlatform p(shared_catalog(), quiet());
  const auto prom = ids_of(p.catalog(), "911", Stance::kPromoting);
  const auto deb = ids_of(p.catalog(), "911", Stance::kDebunking);
  UserSession a("a", 1), b("b", 99);
  for (std::size_t i = 0; i < 5; ++i) watch_full(p, a, deb[i]);
  const auto ra = watch_full(p, a, prom[0]).recommendations;
  const auto rb = watch_full(p, b, prom[0]).recommendations;
  EXPECT_EQ(ra.video_ids(), rb.video_ids());
  for (const auto& id : ra.video_ids()) EXPECT_NE(id, prom[0]);
  EXPECT_LE(ra.items.size(), kMaxRecommendationItems);
}

TEST(Simulator, RecencyDominatedDropAfterSwitchingStance) {
  auto cfg = preset("contextual");
  cfg.recency_window = 1;
  cfg.recency_weight = 1.0;
  cfg.history_weight = 0.05;
  SimulatedPlatform p(shared_catalog(), cfg);
  const auto prom = ids_of(p.catalog(), "flat-earth", Stance::kPromoting);
  const auto deb = ids_of(p.catalog(), "flat-earth", Stance::kDebunking);
  double before = 0, after = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    UserSession s("s", seed);
    WatchResult last;
    for (std::size_t i = 0; i < 40; ++i) last = watch_full(p, s, prom[i]);
    before += ns(last.recommendations, p.catalog());
    after += ns(watch_full(p, s, deb[0]).recommendations, p.catalog());
  }
  EXPECT_LT(after, before);
}

TEST(Simulator, HistoryGrowsByOnePerWatchAndValidatesDuration) {
  SimulatedPlatform p(shared_catalog(), preset("contextual"));
  UserSession s("s", 1);
  const auto ids = ids_of(p.catalog(), "vaccines", Stance::kNeutral);
  for (std::size_t i = 0; i < 5; ++i) {
    watch_full(p, s, ids[i]);
    EXPECT_EQ(s.history().size(), i + 1);
    EXPECT_EQ(s.history().back().video_id, ids[i]);
  }
  const auto dur = p.catalog().at(ids[0]).video.duration;
  EXPECT_THROW(p.watch(s, ids[0], dur + Seconds(1)), InvalidArgument);
  EXPECT_THROW(p.watch(s, ids[0], Seconds(0)), InvalidArgument);
  EXPECT_THROW(p.watch(s, "missing", Seconds(1)), NotFound);
  EXPECT_EQ(s.history().size(), 5u);
}

TEST(Simulator, FreshHomeIsPopularityRanked) {
  SimulatedPlatform p(shared_catalog(), quiet());
  UserSession a("a", 1), b("b", 1);
  const auto h = p.home(a);
  EXPECT_EQ(h.video_ids(), p.home(b).video_ids());
  std::vector<const CatalogEntry*> all;
  for (const auto& e : p.catalog().entries()) all.push_back(&e);
  std::stable_sort(all.begin(), all.end(),
                   [](auto* x, auto* y) { return x->popularity > y->popularity; });
  ASSERT_EQ(h.items.size(), kMinListingItems);
  for (std::size_t i = 0; i < h.items.size(); ++i) {
    EXPECT_EQ(h.items[i].video_id, all[i]->video.video_id);
  }
}

TEST(Simulator, PromotingHistoryRaisesHomeScore) {
  SimulatedPlatform p(shared_catalog(), preset("contextual"));
  const auto prom = ids_of(p.catalog(), "chemtrails", Stance::kPromoting);
  double trained = 0, fresh = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    UserSession f("f", seed), t("t", seed);
    for (std::size_t i = 0; i < 20; ++i) watch_full(p, t, prom[i]);
    trained += ns(p.home(t), p.catalog());
    fresh += ns(p.home(f), p.catalog());
  }
  EXPECT_GT(trained, fresh);
}

TEST(Simulator, ResetMatchesFreshSessionOver100Sequences) {
  SimulatedPlatform p(shared_catalog(), preset("contextual"));
  const auto& entries = p.catalog().entries();
  const auto& topics = p.catalog().topics();
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const std::uint64_t seed = rng();
    UserSession used("u", seed), fresh("u", seed);
    const std::size_t steps = rng() % 30;
    for (std::size_t k = 0; k < steps; ++k) {
      switch (rng() % 3) {
        case 0:
          watch_full(p, used, entries[rng() % entries.size()].video.video_id);
          break;
        case 1: {
          const auto& topic = topics[rng() % topics.size()];
          p.search(used, topic.queries[rng() % topic.queries.size()]);
          break;
        }
        default:
          p.home(used);
      }
    }
    p.reset_history(used);
    if (rng() % 2) p.reset_history(used);  // idempotent
    EXPECT_TRUE(used.history().empty());
    const auto& probe = entries[rng() % entries.size()].video.video_id;
    EXPECT_EQ(p.home(used), p.home(fresh));
    EXPECT_EQ(p.search(used, topics[0].queries[0]), p.search(fresh, topics[0].queries[0]));
    const auto wu = watch_full(p, used, probe), wf = watch_full(p, fresh, probe);
    EXPECT_EQ(wu.recommendations, wf.recommendations);
    EXPECT_EQ(wu.home, wf.home);
  }
}

TEST(Simulator, ResetAfterFullRunEmptiesHistory) {
  SimulatedPlatform p(shared_catalog(), preset("contextual"));
  UserSession s("s", 5);
  const auto prom = ids_of(p.catalog(), "911", Stance::kPromoting);
  const auto deb = ids_of(p.catalog(), "911", Stance::kDebunking);
  for (std::size_t i = 0; i < 40; ++i) {
    watch_full(p, s, prom[i]);
    watch_full(p, s, deb[i]);
  }
  EXPECT_EQ(s.history().size(), 80u);
  p.reset_history(s);
  EXPECT_EQ(s.history().size(), 0u);
}

TEST(Simulator, SnapshotsAreWellFormed) {
  SimulatedPlatform p(shared_catalog(), preset("contextual"));
  UserSession s("run-7", 1);
  const auto id = ids_of(p.catalog(), "911", Stance::kPromoting)[0];
  const auto w = watch_full(p, s, id);
  EXPECT_NO_THROW(validate_snapshot(w.recommendations));
  EXPECT_NO_THROW(validate_snapshot(w.home));
  EXPECT_EQ(w.recommendations.watch_index, 1u);
  EXPECT_EQ(w.home.run_id, "run-7");
  const auto q = p.search(s, "9/11 conspiracy");
  EXPECT_EQ(q.query, "9/11 conspiracy");
  EXPECT_NO_THROW(validate_snapshot(q));
}
