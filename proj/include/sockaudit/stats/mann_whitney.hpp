#pragma once

#include <span>
#include <string_view>

namespace sockaudit::stats {

enum class PValueMethod { kAuto, kExact, kNormal };

std::string_view to_string(PValueMethod method);
PValueMethod p_value_method_from_string(std::string_view text);

// Combined sample size up to which kAuto uses the exact distribution.
inline constexpr std::size_t kExactLimit = 20;

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample, midranks for ties
  double p = 1.0;  // two-sided
  bool exact = false;
};

// Two-sided Mann-Whitney U test.
//
// kAuto: exact null distribution when |a| + |b| <= kExactLimit and there are
// no ties, otherwise the normal approximation with tie-corrected variance and
// continuity correction. kExact with ties throws InvalidArgument. Empty
// samples throw InvalidArgument.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 PValueMethod method = PValueMethod::kAuto);

// Exact P(U <= u) under the null for sample sizes (m, n), no ties.
double exact_u_cdf(std::size_t m, std::size_t n, double u);

// alpha / n_comparisons; n_comparisons must be at least 1.
double bonferroni(double alpha, std::size_t n_comparisons);

}  // namespace sockaudit::stats
