#include "sockaudit/report/tables.hpp"

#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace sockaudit::report {
namespace {

const stats::HypothesisVerdict* find(std::span<const stats::HypothesisVerdict> verdicts,
                                     const std::string& hypothesis, const std::string& scope,
                                     stats::Modality modality, int phase = 0) {
  for (const auto& v : verdicts) {
    if (v.hypothesis == hypothesis && v.scope == scope && v.modality == modality &&
        v.phase == phase) {
      return &v;
    }
  }
  return nullptr;
}

std::string opt(const std::optional<double>& x) { return x ? format_number(*x) : "-"; }

std::string opt_p(const std::optional<double>& p) { return p ? format_p(*p) : "-"; }

std::vector<std::string> scopes_of(const std::vector<std::string>& topics) {
  std::vector<std::string> out(topics.begin(), topics.end());
  out.push_back("overall");
  return out;
}

}  // namespace

std::string format_number(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);  // no "-0.0"
  return s;
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", p);
  return buf;
}

std::string verdicts_tsv(std::span<const stats::HypothesisVerdict> verdicts) {
  std::ostringstream out;
  out << "hypothesis\tscope\tmodality\tphase\tstatistic\tp_value\talpha\tverdict\tci_low\tci_high"
         "\tn_a\tn_b\n";
  for (const auto& v : verdicts) {
    out << v.hypothesis << '\t' << v.scope << '\t' << stats::to_string(v.modality) << '\t'
        << (v.phase == 0 ? std::string("-") : std::to_string(v.phase)) << '\t'
        << format_number(v.statistic) << '\t' << opt_p(v.p_value) << '\t' << format_number(v.alpha)
        << '\t' << stats::to_string(v.verdict) << '\t' << opt(v.ci_low) << '\t' << opt(v.ci_high)
        << '\t' << v.n_a << '\t' << v.n_b << '\n';
  }
  return out.str();
}

std::string comparison_table_tsv(stats::Modality modality, const stats::Extraction& extraction,
                                 std::span<const stats::HypothesisVerdict> verdicts) {
  std::map<std::string, std::array<std::vector<double>, 3>> by_scope;
  for (const auto& r : extraction.runs) {
    for (auto* scope : {&r.topic_id, static_cast<const std::string*>(nullptr)}) {
      auto& slot = by_scope[scope ? *scope : std::string("overall")];
      slot[0].insert(slot[0].end(), r.s1.begin(), r.s1.end());
      slot[1].insert(slot[1].end(), r.e1.begin(), r.e1.end());
      slot[2].insert(slot[2].end(), r.e2.begin(), r.e2.end());
    }
  }
  std::vector<std::string> topics;
  for (const auto& [scope, _] : by_scope) {
    if (scope != "overall") topics.push_back(scope);
  }
  std::ostringstream out;
  out << "scope\tS1 mean\tS1 sd\tE1 mean\tE1 sd\tE2 mean\tE2 sd"
         "\tS1-E1 p\tS1-E1 verdict\tE1-E2 p\tE1-E2 verdict\tS1-E2 p\tS1-E2 verdict\n";
  for (const auto& scope : scopes_of(topics)) {
    const auto it = by_scope.find(scope);
    if (it == by_scope.end()) continue;
    out << scope;
    for (const auto& sample : it->second) {
      out << '\t' << format_number(stats::mean(sample), 2) << '\t'
          << format_number(stats::sample_sd(sample), 2);
    }
    for (const char* h : {"H2.0", "H2.1", "H2.2"}) {
      const auto* v = find(verdicts, h, scope, modality);
      out << '\t' << (v ? opt_p(v->p_value) : "-") << '\t'
          << (v ? std::string(stats::to_string(v->verdict)) : "-");
    }
    out << '\n';
  }
  return out.str();
}

std::string diff_to_linear_tsv(std::span<const stats::HypothesisVerdict> verdicts) {
  std::vector<std::string> topics;
  std::set<std::string> seen;
  for (const auto& v : verdicts) {
    if (v.hypothesis == "H2.3" && v.scope != "overall" && seen.insert(v.scope).second) {
      topics.push_back(v.scope);
    }
  }
  std::ostringstream out;
  out << "scope\trecommendations phase 1\trecommendations phase 2\thome phase 1\thome phase 2\n";
  for (const auto& scope : scopes_of(topics)) {
    out << scope;
    for (auto m : {stats::Modality::kRecommendations, stats::Modality::kHome}) {
      for (int phase : {1, 2}) {
        const auto* d = find(verdicts, "H2.3", scope, m, phase);
        const auto* change = find(verdicts, phase == 1 ? "H2.0" : "H2.1", scope, m);
        const bool significant = change && change->p_value && *change->p_value < change->alpha;
        out << '\t' << (d && significant ? format_number(d->statistic, 2) : "-");
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SeriesRow> series_rows(std::span<const RunRecord> records, stats::Modality modality,
                                   const annotation::ResolvedLabels& labels,
                                   const stats::ExtractionConfig& config) {
  std::vector<std::string> topics;
  {
    std::set<std::string> t;
    for (const auto& r : records) {
      if (r.status == RunStatus::kCompleted) t.insert(r.topic_id);
    }
    topics.assign(t.begin(), t.end());
  }
  const auto all = stats::run_series(records, modality, labels, config);
  std::vector<std::string> owner;
  for (const auto& r : records) {
    if (r.status == RunStatus::kCompleted) owner.push_back(r.topic_id);
  }
  std::vector<SeriesRow> rows;
  for (const auto& scope : scopes_of(topics)) {
    std::vector<metrics::ScoreSeries> members;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (scope == "overall" || owner[i] == scope) members.push_back(all[i]);
    }
    std::map<long, std::size_t> counts;
    for (const auto& s : members) {
      for (const auto& p : s.points()) ++counts[p.watch_index];
    }
    const auto mean = stats::mean_series(members);
    for (const auto& p : mean.points()) {
      rows.push_back({scope, p.watch_index, p.score, counts[p.watch_index]});
    }
  }
  return rows;
}

std::string series_tsv(std::span<const SeriesRow> rows) {
  std::ostringstream out;
  out << "scope\twatch_index\tmean_score\truns\n";
  for (const auto& r : rows) {
    out << r.scope << '\t' << r.watch_index << '\t' << format_number(r.score) << '\t' << r.runs
        << '\n';
  }
  return out.str();
}

std::vector<ProportionRow> proportion_rows(std::span<const RunRecord> records,
                                           stats::Modality modality,
                                           const annotation::ResolvedLabels& labels,
                                           const stats::ExtractionConfig& config) {
  std::map<std::string, std::vector<RunRecord>> by_topic;
  for (const auto& r : records) by_topic[r.topic_id].push_back(r);
  std::vector<ProportionRow> rows;
  for (const auto& [topic, runs] : by_topic) {
    for (const auto& s : stats::stance_proportions(runs, modality, labels, config)) {
      rows.push_back({topic, s});
    }
  }
  for (const auto& s : stats::stance_proportions(records, modality, labels, config)) {
    rows.push_back({"overall", s});
  }
  return rows;
}

std::string proportions_tsv(std::span<const ProportionRow> rows) {
  std::ostringstream out;
  out << "scope\twatch_index\tpromoting\tneutral\tdebunking\tunresolved\tpromoting_share"
         "\tneutral_share\tdebunking_share\n";
  for (const auto& r : rows) {
    const double total = static_cast<double>(r.total());
    auto share = [&](std::size_t n) {
      return format_number(total == 0.0 ? 0.0 : static_cast<double>(n) / total, 4);
    };
    out << r.scope << '\t' << r.share.watch_index << '\t' << r.share.promoting << '\t'
        << r.share.neutral << '\t' << r.share.debunking << '\t' << r.share.unresolved << '\t'
        << share(r.share.promoting) << '\t' << share(r.share.neutral) << '\t'
        << share(r.share.debunking) << '\n';
  }
  return out.str();
}

std::string comparison_report_tsv(const stats::ComparisonReport& report) {
  std::ostringstream out;
  out << "scope\tmodality\tn_a\tmean_a\tsd_a\tn_b\tmean_b\tsd_b\tU\tp_value\talpha\tverdict\n";
  for (const auto& r : report.rows) {
    out << r.scope << '\t' << stats::to_string(r.modality) << '\t' << r.n_a << '\t'
        << format_number(r.mean_a, 2) << '\t' << format_number(r.sd_a, 2) << '\t' << r.n_b << '\t'
        << format_number(r.mean_b, 2) << '\t' << format_number(r.sd_b, 2) << '\t'
        << format_number(r.u, 1) << '\t' << format_p(r.p) << '\t' << format_number(r.alpha)
        << '\t' << r.verdict << '\n';
  }
  return out.str();
}

}  // namespace sockaudit::report
