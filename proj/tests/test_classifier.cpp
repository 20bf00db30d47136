#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "sockaudit/classifier/classifier.hpp"
#include "sockaudit/classifier/evaluation.hpp"
#include "sockaudit/classifier/features.hpp"
#include "sockaudit/classifier/network.hpp"
#include "sockaudit/core/errors.hpp"

using namespace sockaudit;
using namespace sockaudit::classifier;

namespace {

// Each class owns a disjoint block of marker words; every document also
// carries shared filler.
std::vector<LabeledExample> separable_corpus(std::size_t per_class, std::uint64_t seed,
                                             const FeatureConfig& features) {
  std::mt19937_64 rng(seed);
  const Stance order[] = {Stance::kPromoting, Stance::kNeutral, Stance::kDebunking};
  std::vector<LabeledExample> out;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      auto words = [&](std::size_t n) {
        std::string s;
        for (std::size_t k = 0; k < n; ++k) {
          s += rng() % 3 == 0 ? "marker" + std::to_string(c) + "x" + std::to_string(rng() % 8)
                              : "filler" + std::to_string(rng() % 40);
          s += ' ';
        }
        return s;
      };
      VideoRecord v;
      v.video_id = "doc-" + std::to_string(c) + "-" + std::to_string(i);
      v.title = words(6);
      v.description = words(12);
      v.transcript = words(40);
      std::vector<std::string> comments{words(8), words(8)};
      out.push_back({v.video_id, featurize(v, comments, features), order[c]});
    }
  }
  return out;
}

TrainingOptions small_options() {
  TrainingOptions o;
  o.hidden = {32, 16};
  o.epochs = 30;
  o.dropout = 0.2;
  return o;
}

}  // namespace

TEST(Features, TokenizeLowercasesAndSplits) {
  EXPECT_EQ(tokenize("Flat-Earth PROOF, 2021!"),
            (std::vector<std::string>{"flat", "earth", "proof", "2021"}));
  EXPECT_TRUE(tokenize("  ...  ").empty());
}

TEST(Features, BlocksAreNormalizedAndEmptyChannelIsZero) {
  VideoRecord v;
  v.title = "moon landing";
  v.description = "studio lights";
  FeatureConfig cfg{16};
  const auto x = featurize(v, {}, cfg);
  ASSERT_EQ(x.size(), 48u);
  double snippet = 0, rest = 0;
  for (std::size_t i = 0; i < 16; ++i) snippet += x[i] * x[i];
  for (std::size_t i = 16; i < 48; ++i) rest += std::abs(x[i]);
  EXPECT_NEAR(snippet, 1.0, 1e-12);
  EXPECT_EQ(rest, 0.0);
  EXPECT_EQ(featurize(v, {}, cfg), x);
  VideoRecord empty;
  EXPECT_THROW(featurize(empty, {}, cfg), Unfeaturizable);
}

TEST(Features, DisjointTokensGiveOrthogonalBlocks) {
  // Pick two tokens whose hashes land in different buckets, as a hand check of
  // the hashing scheme.
  const std::size_t dims = 64;
  const std::string a = "alpha";
  std::string b;
  for (int i = 0; i < 100 && b.empty(); ++i) {
    const std::string t = "beta" + std::to_string(i);
    if (token_hash(t) % dims != token_hash(a) % dims) b = t;
  }
  ASSERT_FALSE(b.empty());
  const auto x = featurize_text(a, dims), y = featurize_text(b, dims);
  EXPECT_EQ(std::inner_product(x.begin(), x.end(), y.begin(), 0.0), 0.0);
}

TEST(Network, SoftmaxColumnsLieOnSimplex) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> d(0.0, 30.0);
  Eigen::MatrixXd logits(4, 10000);
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) logits(i, j) = d(rng);
  }
  const auto p = softmax_columns(logits);
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    EXPECT_NEAR(p.col(j).sum(), 1.0, 1e-12);
    EXPECT_GE(p.col(j).minCoeff(), 0.0);
    EXPECT_LE(p.col(j).maxCoeff(), 1.0);
  }
}

TEST(Network, GradientMatchesFiniteDifferences) {
  Mlp net(6, {5, 4}, 3, 7);
  std::mt19937_64 brng(5);
  std::uniform_real_distribution<double> bias_draw(-0.5, 0.5);
  // Zero biases put dead-unit samples exactly on the ReLU kink.
  for (auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = bias_draw(brng);
  }
  std::mt19937_64 rng(32);
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd x(6, 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  const std::vector<std::size_t> y{0, 1, 2, 0, 1, 2, 2, 1};
  std::vector<DenseLayer> grads;
  net.loss(x, y, 0.0, nullptr, &grads);
  const double h = 1e-6;
  double worst = 0;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto check = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = net.loss(x, y, 0.0, nullptr, nullptr);
      param = keep - h;
      const double down = net.loss(x, y, 0.0, nullptr, nullptr);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic) /
                                  std::max(1e-6, std::abs(numeric) + std::abs(analytic)));
    };
    auto& layer = net.layers()[l];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      check(layer.weights.data()[i], grads[l].weights.data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      check(layer.bias.data()[i], grads[l].bias.data()[i]);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Threshold, DecisionRule) {
  const auto p = apply_threshold(ClassSetup::kThreeClass, std::vector<double>{0.9, 0.05, 0.05}, 0.7);
  EXPECT_EQ(p.stance, Stance::kPromoting);
  EXPECT_EQ(p.confidence, 0.9);
  const auto q = apply_threshold(ClassSetup::kThreeClass, std::vector<double>{0.65, 0.30, 0.05}, 0.7);
  EXPECT_EQ(q.stance, Stance::kNeutral);
  EXPECT_EQ(q.confidence, 0.30);
  const double third = 1.0 / 3.0;
  const auto u = apply_threshold(ClassSetup::kThreeClass, std::vector<double>{third, third, third}, 0.7);
  EXPECT_NE(u.stance, Stance::kPromoting);
}

TEST(Threshold, NoPromotingPredictionBelowThreshold) {
  std::mt19937_64 rng(33);
  std::gamma_distribution<double> g(0.5, 1.0);
  for (auto setup : {ClassSetup::kBinaryNoNeutral, ClassSetup::kBinaryWithNeutral,
                     ClassSetup::kThreeClass}) {
    for (int t = 0; t < 5000; ++t) {
      std::vector<double> p(class_count(setup));
      for (auto& x : p) x = g(rng) + 1e-12;
      const double sum = std::accumulate(p.begin(), p.end(), 0.0);
      for (auto& x : p) x /= sum;
      const auto r = apply_threshold(setup, p, 0.7);
      if (r.stance == Stance::kPromoting) {
        EXPECT_GE(r.confidence, 0.7);
      }
      EXPECT_EQ(r.confidence, p[r.class_index]);
    }
  }
}

TEST(ClassSetups, LayoutAndMapping) {
  EXPECT_EQ(class_count(ClassSetup::kBinaryNoNeutral), 2u);
  EXPECT_FALSE(class_index(ClassSetup::kBinaryNoNeutral, Stance::kNeutral));
  EXPECT_EQ(class_index(ClassSetup::kBinaryWithNeutral, Stance::kNeutral),
            class_index(ClassSetup::kBinaryWithNeutral, Stance::kDebunking));
  EXPECT_EQ(class_stance(ClassSetup::kBinaryWithNeutral, 1), Stance::kNeutral);
  for (auto s : {Stance::kPromoting, Stance::kNeutral, Stance::kDebunking}) {
    EXPECT_EQ(class_stance(ClassSetup::kThreeClass, *class_index(ClassSetup::kThreeClass, s)), s);
    EXPECT_EQ(*class_index(ClassSetup::kThreeClass, Stance::kPromoting), kPromotingClass);
  }
  for (auto setup : {ClassSetup::kBinaryNoNeutral, ClassSetup::kBinaryWithNeutral,
                     ClassSetup::kThreeClass}) {
    EXPECT_EQ(class_setup_from_string(to_string(setup)), setup);
  }
  EXPECT_THROW(class_setup_from_string("four_class"), Error);
}

TEST(Oversample, EqualizesClassCounts) {
  std::vector<std::size_t> labels;
  labels.insert(labels.end(), 405, 0);
  labels.insert(labels.end(), 1459, 1);
  labels.insert(labels.end(), 758, 2);
  std::mt19937_64 rng(34);
  const auto idx = oversample(labels, 3, rng);
  std::vector<std::size_t> counts(3, 0);
  std::vector<bool> seen(labels.size(), false);
  for (auto i : idx) {
    ++counts[labels[i]];
    seen[i] = true;
  }
  EXPECT_EQ(counts, (std::vector<std::size_t>{1459, 1459, 1459}));
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST(Evaluation, MajorityBaselineOnAnnotatedCounts) {
  std::vector<std::size_t> actual;
  actual.insert(actual.end(), 405, 0);   // promoting
  actual.insert(actual.end(), 1459, 1);  // neutral
  actual.insert(actual.end(), 758, 2);   // debunking
  const auto r = majority_baseline(actual, class_names(ClassSetup::kThreeClass));
  EXPECT_EQ(r.accuracy, 1459.0 / 2622.0);
  EXPECT_EQ(r.per_class[0].precision, 0.0);
  EXPECT_EQ(r.per_class[0].f1, 0.0);
  EXPECT_EQ(r.per_class[1].recall, 1.0);
}

TEST(Evaluation, ReportMatchesHandCounts) {
  const std::vector<std::size_t> actual{0, 0, 1, 1, 1, 2};
  const std::vector<std::size_t> predicted{0, 1, 1, 1, 2, 2};
  const auto r = build_report(actual, predicted, {"a", "b", "c"}, 1);
  EXPECT_EQ(r.confusion[1][2], 1u);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 4.0 / 6.0);
  const double wf1 = (2 * (2.0 / 3.0) + 3 * (2.0 / 3.0) + 1 * (2.0 / 3.0)) / 6.0;
  EXPECT_DOUBLE_EQ(r.weighted_f1, wf1);
  EXPECT_NE(metrics_table(r).find("Accuracy"), std::string::npos);
  EXPECT_NE(confusion_table(r).find("%"), std::string::npos);
}

TEST(Folds, StratifiedAndDisjoint) {
  FeatureConfig f{8};
  const auto corpus = separable_corpus(23, 35, f);
  const auto plans = plan_folds(corpus, ClassSetup::kThreeClass, 5, 1);
  ASSERT_EQ(plans.size(), 5u);
  std::vector<int> tested(corpus.size(), 0);
  for (const auto& p : plans) {
    std::vector<std::size_t> per_class(3, 0);
    for (auto i : p.test) {
      ++tested[i];
      ++per_class[*class_index(ClassSetup::kThreeClass, corpus[i].stance)];
    }
    for (auto c : per_class) EXPECT_TRUE(c == 4 || c == 5);
    for (auto i : p.train) {
      EXPECT_EQ(std::find(p.test.begin(), p.test.end(), i), p.test.end());
    }
  }
  for (int t : tested) EXPECT_EQ(t, 1);
  EXPECT_THROW(plan_folds(corpus, ClassSetup::kThreeClass, 1, 1), InvalidArgument);
}

TEST(Folds, TooFewExamplesOfAClass) {
  FeatureConfig f{8};
  auto corpus = separable_corpus(10, 36, f);
  corpus.erase(corpus.begin() + 1, corpus.begin() + 10);  // one promoting example left
  EXPECT_THROW(plan_folds(corpus, ClassSetup::kThreeClass, 2, 1), InsufficientData);
}

TEST(Training, SeparableCorpusAndDeterminism) {
  FeatureConfig f{32};
  const auto corpus = separable_corpus(40, 37, f);
  const auto a = train(corpus, ClassSetup::kThreeClass, 5, small_options());
  const auto b = train(corpus, ClassSetup::kThreeClass, 5, small_options());
  EXPECT_TRUE(a == b);
  std::size_t correct = 0;
  for (const auto& ex : corpus) correct += predict(a, ex.features).stance == ex.stance ? 1 : 0;
  EXPECT_EQ(correct, corpus.size());
}

TEST(Training, CrossValidationOnSeparableCorpus) {
  FeatureConfig f{32};
  const auto corpus = separable_corpus(40, 38, f);
  const auto r = cross_validate(corpus, ClassSetup::kThreeClass, 4, 9, small_options());
  EXPECT_EQ(r.accuracy, 1.0);
  for (const auto& c : r.per_class) EXPECT_EQ(c.f1, 1.0);
}

TEST(Model, SaveLoadRoundTripAndDimensionCheck) {
  FeatureConfig f{8};
  const auto corpus = separable_corpus(10, 39, f);
  TrainingOptions o = small_options();
  o.epochs = 2;
  const auto m = train(corpus, ClassSetup::kBinaryWithNeutral, 3, o);
  const auto path = std::filesystem::temp_directory_path() / "sockaudit_model_test.json";
  m.save(path);
  const auto back = ClassifierModel::load(path);
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.probabilities(corpus[0].features), m.probabilities(corpus[0].features));
  EXPECT_THROW(m.probabilities(std::vector<double>(5, 0.0)), DimensionMismatch);
}
