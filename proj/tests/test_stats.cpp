#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "sockaudit/core/errors.hpp"
#include "sockaudit/stats/comparison.hpp"
#include "sockaudit/stats/hypotheses.hpp"
#include "sockaudit/stats/mann_whitney.hpp"

using namespace sockaudit;
using namespace sockaudit::stats;

namespace {

double u_of(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  }
  return u;
}

// Two-sided exact p by listing every way to pick the first sample's ranks.
double enumerated_p(std::size_t m, std::size_t n, double u_obs) {
  const std::size_t total = m + n;
  std::size_t le = 0, ge = 0, all = 0;
  for (unsigned mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    std::vector<double> a, b;
    for (std::size_t i = 0; i < total; ++i) ((mask >> i) & 1 ? a : b).push_back(static_cast<double>(i));
    const double u = u_of(a, b);
    ++all;
    le += u <= u_obs ? 1 : 0;
    ge += u >= u_obs ? 1 : 0;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(all));
}

// Synthetic study: list items "p<i>" are promoting, "d<i>" debunking.
annotation::ResolvedLabels synthetic_labels() {
  annotation::ResolvedLabels l;
  for (int i = 0; i < 10; ++i) {
    l["p" + std::to_string(i)] = Stance::kPromoting;
    l["d" + std::to_string(i)] = Stance::kDebunking;
  }
  l["gone"] = std::nullopt;
  return l;
}

ExposureSnapshot list(SnapshotKind kind, std::size_t watch_index, int promoting) {
  ExposureSnapshot s;
  s.kind = kind;
  if (kind == SnapshotKind::kSearch) s.query = "q1";
  s.watch_index = watch_index;
  std::vector<VideoId> ids;
  for (int i = 0; i < 10; ++i) ids.push_back(i < promoting ? "p" + std::to_string(i) : "d" + std::to_string(i));
  s.items = rank_items(ids);
  return s;
}

// n_prom = n_deb = 4, f_q = 2, n_q = 1. `level(k, run)` is the number of
// promoting items out of 10 in every snapshot taken after k watches.
RunRecord synthetic_run(const std::string& topic, int run,
                        const std::function<int(std::size_t, int)>& level) {
  RunRecord r;
  r.run_id = topic + "-r" + std::to_string(run);
  r.topic_id = topic;
  r.parameters.n_prom = 4;
  r.parameters.n_deb = 4;
  r.parameters.f_q = 2;
  r.parameters.n_q = 1;
  r.snapshots.push_back(list(SnapshotKind::kHome, 0, level(0, run)));
  r.snapshots.push_back(list(SnapshotKind::kSearch, 0, level(0, run)));
  for (std::size_t k = 1; k <= 8; ++k) {
    r.watch_sequence.push_back({k <= 4 ? Phase::kPromoting : Phase::kDebunking,
                                "w" + std::to_string(k), Seconds(60)});
    r.snapshots.push_back(list(SnapshotKind::kRecommendation, k, level(k, run)));
    r.snapshots.push_back(list(SnapshotKind::kHome, k, level(k, run)));
    if (k % 2 == 0) r.snapshots.push_back(list(SnapshotKind::kSearch, k, level(k, run)));
  }
  for (auto& s : r.snapshots) {
    s.run_id = r.run_id;
    s.phase = s.watch_index == 0 ? Phase::kBaseline
              : s.watch_index <= 4 ? Phase::kPromoting
                                   : Phase::kDebunking;
  }
  r.status = RunStatus::kCompleted;
  r.resume_cursor = 8;
  return r;
}

// Low at the start, high at the end of phase 1, lowest at the end.
int bubble(std::size_t k, int run) {
  const int jitter = run % 3 - 1;
  if (k <= 2) return 4 + jitter;
  if (k <= 4) return 8 + jitter;
  return 1 + (run % 2);
}

std::vector<RunRecord> study(const std::function<int(std::size_t, int)>& level) {
  std::vector<RunRecord> out;
  for (const char* topic : {"t1", "t2"}) {
    for (int i = 0; i < 10; ++i) out.push_back(synthetic_run(topic, i, level));
  }
  return out;
}

const HypothesisVerdict& find(const std::vector<HypothesisVerdict>& vs, const std::string& h,
                              const std::string& scope, Modality m, int phase = 0) {
  for (const auto& v : vs) {
    if (v.hypothesis == h && v.scope == scope && v.modality == m && v.phase == phase) return v;
  }
  throw std::runtime_error("verdict not found");
}

}  // namespace

TEST(MannWhitney, WorkedExamples) {
  const std::vector<double> a{1, 2}, b{3, 4};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.p, 1.0 / 3.0);
  const std::vector<double> same{1, 5, 9};
  EXPECT_EQ(mann_whitney_u(same, same).u, 4.5);
  const std::vector<double> ones{1, 1};
  const auto tied = mann_whitney_u(ones, ones);
  EXPECT_EQ(tied.u, 2.0);
  EXPECT_FALSE(tied.exact);
  EXPECT_EQ(tied.p, 1.0);
}

TEST(MannWhitney, ExactMatchesEnumerationUpToEight) {
  std::size_t cases = 0;
  for (std::size_t m = 1; m <= 7; ++m) {
    for (std::size_t n = 1; m + n <= 8; ++n) {
      const std::size_t total = m + n;
      for (unsigned mask = 0; mask < (1u << total); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < total; ++i) ((mask >> i) & 1 ? a : b).push_back(i * 1.5 - 3);
        const auto r = mann_whitney_u(a, b, PValueMethod::kExact);
        EXPECT_EQ(r.u, u_of(a, b));
        EXPECT_NEAR(r.p, enumerated_p(m, n, u_of(a, b)), 1e-12);
        ++cases;
      }
    }
  }
  EXPECT_GT(cases, 400u);
}

TEST(MannWhitney, UStatisticsSumToProduct) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(1 + rng() % 15), b(1 + rng() % 15);
    for (auto& x : a) x = static_cast<double>(rng() % 6);  // plenty of ties
    for (auto& x : b) x = static_cast<double>(rng() % 6);
    const double uab = mann_whitney_u(a, b).u, uba = mann_whitney_u(b, a).u;
    EXPECT_EQ(uab + uba, static_cast<double>(a.size() * b.size()));
    EXPECT_EQ(uab, u_of(a, b));
    EXPECT_NEAR(mann_whitney_u(a, b).p, mann_whitney_u(b, a).p, 1e-12);
  }
}

TEST(MannWhitney, NormalApproximationCloseToExact) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(10), b(10);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng) + 0.7;
    const auto exact = mann_whitney_u(a, b, PValueMethod::kExact);
    const auto normal = mann_whitney_u(a, b, PValueMethod::kNormal);
    EXPECT_EQ(exact.u, normal.u);
    EXPECT_NEAR(exact.p, normal.p, 0.01);
  }
}

TEST(MannWhitney, AutoSwitchesAtTwentyAndRejectsBadInput) {
  std::vector<double> a(10), b(10), c(11);
  for (std::size_t i = 0; i < 10; ++i) {
    a[i] = static_cast<double>(i);
    b[i] = static_cast<double>(i) + 0.5;
  }
  for (std::size_t i = 0; i < 11; ++i) c[i] = static_cast<double>(i) + 0.25;
  EXPECT_TRUE(mann_whitney_u(a, b).exact);
  EXPECT_FALSE(mann_whitney_u(a, c).exact);
  const std::vector<double> tie{1, 1};
  EXPECT_THROW(mann_whitney_u(tie, a, PValueMethod::kExact), InvalidArgument);
  EXPECT_THROW(mann_whitney_u({}, a), InvalidArgument);
  EXPECT_DOUBLE_EQ(exact_u_cdf(4, 5, 20), 1.0);
  EXPECT_DOUBLE_EQ(exact_u_cdf(2, 2, 0), 1.0 / 6.0);
}

TEST(Bonferroni, Values) {
  EXPECT_EQ(bonferroni(0.05, 5), 0.01);
  EXPECT_EQ(bonferroni(0.05, 1), 0.05);
  EXPECT_EQ(bonferroni(0.01, 2), 0.005);
  EXPECT_THROW(bonferroni(0.05, 0), InvalidArgument);
}

TEST(Extraction, PointIntervals) {
  ProcessParameters p;  // 40 / 40
  ExtractionConfig c;
  const auto rec_s1 = point_interval(Point::kS1, Modality::kRecommendations, p, c);
  EXPECT_EQ(rec_s1.first, 1u);
  EXPECT_EQ(rec_s1.last, 2u);
  const auto home_s1 = point_interval(Point::kS1, Modality::kHome, p, c);
  EXPECT_EQ(home_s1.first, 0u);
  EXPECT_EQ(home_s1.last, 2u);
  c.s1_anchor = S1Anchor::kBaseline;
  EXPECT_EQ(point_interval(Point::kS1, Modality::kSearch, p, c).last, 0u);
  const auto e1 = point_interval(Point::kE1, Modality::kHome, p, c);
  EXPECT_EQ(e1.first, 39u);
  EXPECT_EQ(e1.last, 40u);
  const auto e2 = point_interval(Point::kE2, Modality::kSearch, p, c);
  EXPECT_EQ(e2.first, 79u);
  EXPECT_EQ(e2.last, 80u);
}

TEST(Extraction, ScoresPerSnapshot) {
  const auto records = study(bubble);
  const auto labels = synthetic_labels();
  const auto ex = extract_comparison_points(records, Modality::kRecommendations, labels);
  ASSERT_EQ(ex.runs.size(), 20u);
  const auto& r0 = ex.runs[0];  // run 0: jitter -1
  EXPECT_EQ(r0.s1, (std::vector<double>{-0.4, -0.4}));
  EXPECT_EQ(r0.e1, (std::vector<double>{0.4, 0.4}));
  EXPECT_EQ(r0.e2, (std::vector<double>{-0.8, -0.8}));
  const auto home = extract_comparison_points(records, Modality::kHome, labels);
  EXPECT_EQ(home.runs[0].s1.size(), 3u);  // baseline plus two watches
  const auto search = extract_comparison_points(records, Modality::kSearch, labels);
  EXPECT_EQ(search.runs[0].s1.size(), 2u);  // baseline and the search after watch 2
  EXPECT_EQ(search.tally.unlabeled, 0u);
}

TEST(Extraction, MissingPointIsNamedAndIncompleteRunsSkipped) {
  auto records = study(bubble);
  records[3].snapshots.clear();
  try {
    extract_comparison_points(records, Modality::kRecommendations, synthetic_labels());
    FAIL();
  } catch (const ExtractionError& e) {
    EXPECT_NE(std::string(e.what()).find(records[3].run_id), std::string::npos);
  }
  records[3].status = RunStatus::kFailed;
  const auto ex = extract_comparison_points(records, Modality::kRecommendations, synthetic_labels());
  EXPECT_EQ(ex.runs.size(), 19u);
  EXPECT_EQ(ex.skipped_runs, std::vector<std::string>{records[3].run_id});
}

TEST(Extraction, UnlabeledAndDiscardedItemsAreDropped) {
  auto s = list(SnapshotKind::kHome, 0, 5);
  s.items[0].video_id = "gone";
  s.items[1].video_id = "mystery";
  ItemTally tally;
  const auto score = score_snapshot(s, Modality::kHome, synthetic_labels(), {}, &tally);
  ASSERT_TRUE(score);
  EXPECT_DOUBLE_EQ(*score, (3.0 - 5.0) / 8.0);
  EXPECT_EQ(tally.discarded, 1u);
  EXPECT_EQ(tally.unlabeled, 1u);
  auto records = study(bubble);
  records[0].snapshots[0].items[0].video_id = "mystery";
  const auto cov = label_coverage(records, synthetic_labels());
  EXPECT_EQ(cov.unlabeled, 1u);
  ASSERT_EQ(cov.missing.size(), 1u);
  EXPECT_EQ(cov.missing[0].first, "mystery");
}

TEST(Hypotheses, DirectionalVerdict) {
  MannWhitneyResult r{0.0, 0.001, true};
  EXPECT_EQ(directional_verdict(r, 10, 10, 0.01, true), Verdict::kSupported);
  EXPECT_EQ(directional_verdict(r, 10, 10, 0.01, false), Verdict::kRefuted);
  r.p = 0.5;
  EXPECT_EQ(directional_verdict(r, 10, 10, 0.01, true), Verdict::kNoSignificantDifference);
}

TEST(Hypotheses, BubbleStudyIsSupported) {
  const auto records = study(bubble);
  const auto v = evaluate_hypotheses(records, synthetic_labels());
  for (const char* scope : {"t1", "t2", "overall"}) {
    for (auto m : kModalities) {
      for (const char* h : {"H2.0", "H2.1", "H2.2"}) {
        const auto& x = find(v, h, scope, m);
        EXPECT_EQ(x.verdict, Verdict::kSupported) << h << ' ' << scope << ' ' << to_string(m);
        EXPECT_EQ(x.alpha, std::string(scope) == "overall" ? 0.05 : 0.025);
      }
    }
  }
  const auto again = evaluate_hypotheses(records, synthetic_labels());  // pure
  ASSERT_EQ(again.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(again[i].hypothesis, v[i].hypothesis);
    EXPECT_EQ(again[i].statistic, v[i].statistic);
    EXPECT_EQ(again[i].p_value, v[i].p_value);
    EXPECT_EQ(again[i].ci_low, v[i].ci_low);
  }
}

TEST(Hypotheses, ReversedStudyIsRefuted) {
  const auto records = study([](std::size_t k, int run) { return 10 - bubble(k, run); });
  const auto v = evaluate_hypotheses(records, synthetic_labels());
  EXPECT_EQ(find(v, "H2.0", "overall", Modality::kRecommendations).verdict, Verdict::kRefuted);
  EXPECT_EQ(find(v, "H2.1", "t1", Modality::kHome).verdict, Verdict::kRefuted);
}

TEST(Hypotheses, FlatStudyHasNoDifferences) {
  const auto records = study([](std::size_t, int run) { return 3 + run % 4; });
  const auto v = evaluate_hypotheses(records, synthetic_labels());
  for (const auto& x : v) {
    if (x.hypothesis == "H2.3") {
      EXPECT_EQ(x.statistic, 0.0);
      EXPECT_EQ(x.verdict, Verdict::kSupported);  // exactly linear
    } else {
      EXPECT_EQ(x.verdict, Verdict::kNoSignificantDifference);
    }
  }
}

TEST(Hypotheses, DiffToLinearOfMeanSeries) {
  const auto records = study(bubble);
  const auto v = evaluate_hypotheses(records, synthetic_labels());
  // Phase 2 of the mean series: 0.58 at watch 4 then -0.7 four times.
  const auto& d = find(v, "H2.3", "overall", Modality::kRecommendations, 2);
  const double e1 = 0.58, e2 = -0.7;
  double want = 0;
  for (int i = 0; i <= 4; ++i) {
    const double line = e1 + (e2 - e1) * i / 4.0;
    want += (i == 0 ? e1 : e2) - line;
  }
  EXPECT_NEAR(d.statistic, want, 1e-12);
  EXPECT_EQ(d.verdict, Verdict::kRefuted);
  ASSERT_TRUE(d.ci_low && d.ci_high);
  EXPECT_LE(*d.ci_low, d.statistic);
  EXPECT_GE(*d.ci_high, d.statistic);
  EXPECT_LT(*d.ci_high, 0.0);
}

TEST(Compare, SelfComparisonFindsNothing) {
  const auto records = study(bubble);
  const std::vector<std::string> queries{"q1"};
  const auto r = compare_studies(records, synthetic_labels(), records, synthetic_labels(), queries);
  EXPECT_EQ(r.rows.size(), 9u);  // 3 scopes x 3 modalities
  for (const auto& row : r.rows) EXPECT_EQ(row.verdict, "no-significant-difference");
}

TEST(Compare, DetectsShiftedStudy) {
  const auto a = study(bubble);
  const auto b = study([](std::size_t k, int run) { return std::max(0, bubble(k, run) - 3); });
  const std::vector<std::string> queries{"q1"};
  CompareConfig c;
  c.point = Point::kE1;
  const auto r = compare_studies(a, synthetic_labels(), b, synthetic_labels(), queries, c);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.verdict, "supported") << row.scope << ' ' << to_string(row.modality);
    EXPECT_GT(row.mean_a, row.mean_b);
  }
}

TEST(Compare, RejectsEmptyOrDisjointQueries) {
  const auto records = study(bubble);
  const std::vector<std::string> none, other{"not asked"};
  EXPECT_THROW(compare_studies(records, synthetic_labels(), records, synthetic_labels(), none),
               InvalidArgument);
  EXPECT_THROW(compare_studies(records, synthetic_labels(), records, synthetic_labels(), other),
               InvalidArgument);
}

TEST(Summary, MeanAndSampleSd) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_EQ(mean(xs), 5.0);
  EXPECT_NEAR(sample_sd(xs), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(sample_sd(std::vector<double>{3}), 0.0);
}
