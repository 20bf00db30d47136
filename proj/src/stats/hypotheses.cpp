#include "sockaudit/stats/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::stats {
namespace {

std::uint64_t mix(std::uint64_t seed, const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t x = seed ^ h;
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const ProcessParameters& shared_parameters(std::span<const RunRecord> records) {
  const ProcessParameters* p = nullptr;
  for (const auto& r : records) {
    if (r.status != RunStatus::kCompleted) continue;
    if (!p) {
      p = &r.parameters;
    } else if (!(*p == r.parameters)) {
      throw InvalidArgument("runs " + records.front().run_id + " and " + r.run_id +
                            " use different process parameters");
    }
  }
  if (!p) throw InsufficientData("no completed runs to evaluate");
  return *p;
}

// Dense per-run series over [first, last]; NaN where a run has no score.
using Dense = std::vector<double>;

double dtl_of_mean(const std::vector<const Dense*>& runs, std::size_t length) {
  std::vector<metrics::ScorePoint> points;
  for (std::size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* r : runs) {
      if (!std::isnan((*r)[i])) {
        sum += (*r)[i];
        ++n;
      }
    }
    if (n > 0) points.push_back({static_cast<long>(i), sum / static_cast<double>(n)});
  }
  return metrics::diff_to_linear(metrics::ScoreSeries(std::move(points)), 0,
                                 static_cast<long>(length) - 1);
}

double percentile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kSupported:
      return "supported";
    case Verdict::kRefuted:
      return "refuted";
    case Verdict::kNoSignificantDifference:
      return "no-significant-difference";
  }
  return "no-significant-difference";
}

Verdict directional_verdict(const MannWhitneyResult& r, std::size_t n_a, std::size_t n_b,
                            double alpha, bool expect_first_lower) {
  if (!(r.p < alpha)) return Verdict::kNoSignificantDifference;
  const double null_mean = static_cast<double>(n_a) * static_cast<double>(n_b) / 2.0;
  if (r.u == null_mean) return Verdict::kNoSignificantDifference;
  const bool first_lower = r.u < null_mean;
  return first_lower == expect_first_lower ? Verdict::kSupported : Verdict::kRefuted;
}

WatchInterval phase_span(int phase, Modality m, const ProcessParameters& params,
                         const ExtractionConfig& config) {
  if (phase == 1) {
    const bool has_baseline =
        m != Modality::kRecommendations && config.s1_anchor != S1Anchor::kFirstWatches;
    return {has_baseline ? std::size_t{0} : std::size_t{1}, params.n_prom};
  }
  if (phase == 2) return {params.n_prom, params.total_watches()};
  throw InvalidArgument("phase must be 1 or 2");
}

std::vector<HypothesisVerdict> evaluate_hypotheses(std::span<const RunRecord> records,
                                                   const annotation::ResolvedLabels& labels,
                                                   const HypothesisConfig& config) {
  const auto& params = shared_parameters(records);
  std::set<std::string> topic_set;
  for (const auto& r : records) {
    if (r.status == RunStatus::kCompleted) topic_set.insert(r.topic_id);
  }
  const std::vector<std::string> topics(topic_set.begin(), topic_set.end());
  const double topic_alpha = bonferroni(config.alpha, topics.size());

  std::vector<HypothesisVerdict> out;
  for (auto m : kModalities) {
    const auto ex = extract_comparison_points(records, m, labels, config.extraction);
    auto test = [&](const std::string& scope, const std::string* topic, double alpha) {
      std::vector<double> s1, e1, e2;
      for (const auto& rp : ex.runs) {
        if (topic && rp.topic_id != *topic) continue;
        s1.insert(s1.end(), rp.s1.begin(), rp.s1.end());
        e1.insert(e1.end(), rp.e1.begin(), rp.e1.end());
        e2.insert(e2.end(), rp.e2.begin(), rp.e2.end());
      }
      struct Spec {
        const char* name;
        const std::vector<double>* a;
        const std::vector<double>* b;
        bool expect_first_lower;
      };
      const Spec specs[] = {{"H2.0", &s1, &e1, true},
                            {"H2.1", &e1, &e2, false},
                            {"H2.2", &s1, &e2, false}};
      for (const auto& s : specs) {
        const auto mw = mann_whitney_u(*s.a, *s.b, config.method);
        HypothesisVerdict v;
        v.hypothesis = s.name;
        v.scope = scope;
        v.modality = m;
        v.statistic = mw.u;
        v.p_value = mw.p;
        v.alpha = alpha;
        v.n_a = s.a->size();
        v.n_b = s.b->size();
        v.verdict = directional_verdict(mw, v.n_a, v.n_b, alpha, s.expect_first_lower);
        out.push_back(std::move(v));
      }
    };
    for (const auto& t : topics) test(t, &t, topic_alpha);
    test("overall", nullptr, config.alpha);
  }

  for (auto m : {Modality::kRecommendations, Modality::kHome}) {
    std::vector<const RunRecord*> completed;
    for (const auto& r : records) {
      if (r.status == RunStatus::kCompleted) completed.push_back(&r);
    }
    // run_series keeps completed runs only, in record order.
    const auto series = run_series(records, m, labels, config.extraction);

    for (int phase : {1, 2}) {
      const auto span = phase_span(phase, m, params, config.extraction);
      const std::size_t length = span.last - span.first + 1;
      std::vector<Dense> dense;
      dense.reserve(series.size());
      for (const auto& s : series) {
        Dense d(length, std::numeric_limits<double>::quiet_NaN());
        for (const auto& p : s.points()) {
          const auto idx = static_cast<std::size_t>(p.watch_index);
          if (idx >= span.first && idx <= span.last) d[idx - span.first] = p.score;
        }
        dense.push_back(std::move(d));
      }
      auto assess = [&](const std::string& scope, const std::string* topic, double alpha) {
        std::vector<const Dense*> members;
        for (std::size_t i = 0; i < completed.size(); ++i) {
          if (!topic || completed[i]->topic_id == *topic) members.push_back(&dense[i]);
        }
        HypothesisVerdict v;
        v.hypothesis = "H2.3";
        v.scope = scope;
        v.modality = m;
        v.phase = phase;
        v.alpha = alpha;
        v.n_a = members.size();
        v.statistic = dtl_of_mean(members, length);
        std::mt19937_64 rng(mix(config.bootstrap_seed, scope + "/" + std::string(to_string(m)) +
                                                           "/" + std::to_string(phase)));
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        std::vector<double> boot;
        boot.reserve(config.bootstrap_resamples);
        std::vector<const Dense*> sample(members.size());
        for (std::size_t b = 0; b < config.bootstrap_resamples; ++b) {
          for (auto& s : sample) s = members[pick(rng)];
          boot.push_back(dtl_of_mean(sample, length));
        }
        if (!boot.empty()) {
          const double tail = (1.0 - config.ci_level) / 2.0;
          v.ci_low = percentile(boot, tail);
          v.ci_high = percentile(boot, 1.0 - tail);
          v.verdict = (*v.ci_low <= 0.0 && *v.ci_high >= 0.0) ? Verdict::kSupported
                                                              : Verdict::kRefuted;
        }
        out.push_back(std::move(v));
      };
      for (const auto& t : topics) assess(t, &t, topic_alpha);
      assess("overall", nullptr, config.alpha);
    }
  }
  return out;
}

}  // namespace sockaudit::stats
