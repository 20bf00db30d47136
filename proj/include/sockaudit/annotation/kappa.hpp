#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sockaudit/core/types.hpp"

namespace sockaudit::annotation {

// Square co-assignment table between two annotators: rows are annotator A's
// categories, columns annotator B's.
struct AgreementMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
  AgreementMatrix transposed() const;
};

// Categories are the sorted union of both label sequences. Throws
// InvalidArgument when the sequences differ in length.
AgreementMatrix build_agreement(std::span<const std::string> a, std::span<const std::string> b);

// Raw codes compare all twelve codes; stance level compares mapped stances
// with discarded codes kept as their own "discarded" category.
enum class KappaLevel { kCode, kStance };

AgreementMatrix build_agreement(std::span<const AnnotationCode> a,
                                std::span<const AnnotationCode> b, KappaLevel level);

// kappa = (p_o - p_e) / (1 - p_e). Exactly 1 when every count lies on the
// diagonal. Throws UndefinedKappa when p_e == 1 and InvalidArgument on an
// empty or non-square table.
double cohens_kappa(const AgreementMatrix& matrix);

struct KappaSummary {
  KappaLevel level = KappaLevel::kCode;
  std::uint64_t items = 0;
  double observed_agreement = 0.0;
  double chance_agreement = 0.0;
  double kappa = 0.0;
  std::vector<std::string> categories;
};

KappaSummary summarize_kappa(const AgreementMatrix& matrix, KappaLevel level);

// JSON object text for the CLI report.
std::string to_json(const KappaSummary& summary);

}  // namespace sockaudit::annotation
