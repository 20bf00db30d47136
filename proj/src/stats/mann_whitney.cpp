#include "sockaudit/stats/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::stats {
namespace {

// counts[u] = number of arrangements of m first-sample and n second-sample
// items giving U = u. Recurrence on the largest item: it belongs to the first
// sample (adds n to U) or to the second (adds nothing).
std::vector<double> u_distribution(std::size_t m, std::size_t n) {
  // f[i][j] over u, built row by row in i (first-sample count).
  std::vector<std::vector<std::vector<double>>> f(
      m + 1, std::vector<std::vector<double>>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      auto& cur = f[i][j];
      cur.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cur[0] = 1.0;
        continue;
      }
      const auto& take_first = f[i - 1][j];  // largest item in first sample: +j
      for (std::size_t u = 0; u < take_first.size(); ++u) cur[u + j] += take_first[u];
      const auto& take_second = f[i][j - 1];
      for (std::size_t u = 0; u < take_second.size(); ++u) cur[u] += take_second[u];
    }
  }
  return f[m][n];
}

}  // namespace

std::string_view to_string(PValueMethod method) {
  switch (method) {
    case PValueMethod::kAuto:
      return "auto";
    case PValueMethod::kExact:
      return "exact";
    case PValueMethod::kNormal:
      return "normal";
  }
  return "auto";
}

PValueMethod p_value_method_from_string(std::string_view text) {
  if (text == "auto") return PValueMethod::kAuto;
  if (text == "exact") return PValueMethod::kExact;
  if (text == "normal") return PValueMethod::kNormal;
  throw ParseError("unknown p-value method '" + std::string(text) + "'");
}

double exact_u_cdf(std::size_t m, std::size_t n, double u) {
  const auto counts = u_distribution(m, n);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double below = 0.0;
  for (std::size_t k = 0; k < counts.size() && static_cast<double>(k) <= u + 1e-9; ++k) {
    below += counts[k];
  }
  return below / total;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 PValueMethod method) {
  if (a.empty() || b.empty()) throw InvalidArgument("Mann-Whitney U needs two non-empty samples");
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t total = m + n;

  std::vector<std::pair<double, std::size_t>> pooled;  // value, sample (0 = a)
  pooled.reserve(total);
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_sum_a += midrank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  MannWhitneyResult r;
  r.u = rank_sum_a - md * (md + 1.0) / 2.0;

  const bool ties = tie_term > 0.0;
  bool exact = false;
  switch (method) {
    case PValueMethod::kAuto:
      exact = !ties && total <= kExactLimit;
      break;
    case PValueMethod::kExact:
      if (ties) throw InvalidArgument("exact Mann-Whitney p-value requires tie-free samples");
      exact = true;
      break;
    case PValueMethod::kNormal:
      exact = false;
      break;
  }
  r.exact = exact;
  if (exact) {
    const auto counts = u_distribution(m, n);
    const double all = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(r.u));
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= u) lower += counts[k];
      if (k >= u) upper += counts[k];
    }
    r.p = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    return r;
  }
  const double mean = md * nd / 2.0;
  const double nt = static_cast<double>(total);
  const double variance = md * nd / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
  if (!(variance > 0.0)) {
    r.p = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u - mean) - 0.5) / std::sqrt(variance);
  r.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

double bonferroni(double alpha, std::size_t n_comparisons) {
  if (n_comparisons < 1) throw InvalidArgument("Bonferroni correction needs at least one comparison");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  return alpha / static_cast<double>(n_comparisons);
}

}  // namespace sockaudit::stats
