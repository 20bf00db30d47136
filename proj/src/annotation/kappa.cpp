#include "sockaudit/annotation/kappa.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::annotation {
namespace {

struct KappaTerms {
  // kappa = (n * agree - chance) / (n^2 - chance), all integral.
  std::int64_t n = 0;
  std::int64_t agree = 0;
  std::int64_t chance = 0;
  bool off_diagonal_empty = true;
};

KappaTerms kappa_terms(const AgreementMatrix& m) {
  const std::size_t k = m.categories.size();
  if (m.counts.size() != k) throw InvalidArgument("agreement matrix is not square");
  for (const auto& row : m.counts) {
    if (row.size() != k) throw InvalidArgument("agreement matrix is not square");
  }
  KappaTerms t;
  std::vector<std::int64_t> rows(k, 0), cols(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto c = static_cast<std::int64_t>(m.counts[i][j]);
      rows[i] += c;
      cols[j] += c;
      t.n += c;
      if (i == j) {
        t.agree += c;
      } else if (c != 0) {
        t.off_diagonal_empty = false;
      }
    }
  }
  if (t.n == 0) throw InvalidArgument("agreement matrix has no counts");
  for (std::size_t i = 0; i < k; ++i) t.chance += rows[i] * cols[i];
  return t;
}

}  // namespace

std::uint64_t AgreementMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts)
    for (auto c : row) sum += c;
  return sum;
}

AgreementMatrix AgreementMatrix::transposed() const {
  AgreementMatrix t;
  t.categories = categories;
  t.counts.assign(counts.size(), std::vector<std::uint64_t>(counts.size(), 0));
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) t.counts[j][i] = counts[i][j];
  return t;
}

AgreementMatrix build_agreement(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("annotator label sequences differ in length (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  std::set<std::string> cats(a.begin(), a.end());
  cats.insert(b.begin(), b.end());
  AgreementMatrix m;
  m.categories.assign(cats.begin(), cats.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.categories.size(); ++i) index[m.categories[i]] = i;
  m.counts.assign(m.categories.size(), std::vector<std::uint64_t>(m.categories.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++m.counts[index[a[i]]][index[b[i]]];
  return m;
}

AgreementMatrix build_agreement(std::span<const AnnotationCode> a,
                                std::span<const AnnotationCode> b, KappaLevel level) {
  auto label = [level](AnnotationCode c) -> std::string {
    if (level == KappaLevel::kCode) return std::to_string(c.value());
    auto stance = map_code_to_stance(c);
    return stance ? std::string(to_string(*stance)) : std::string("discarded");
  };
  std::vector<std::string> la, lb;
  la.reserve(a.size());
  lb.reserve(b.size());
  for (auto c : a) la.push_back(label(c));
  for (auto c : b) lb.push_back(label(c));
  return build_agreement(la, lb);
}

double cohens_kappa(const AgreementMatrix& matrix) {
  const KappaTerms t = kappa_terms(matrix);
  const std::int64_t denom = t.n * t.n - t.chance;
  if (denom == 0) {
    throw UndefinedKappa("chance agreement is 1 (both annotators used a single identical category)");
  }
  if (t.off_diagonal_empty) return 1.0;
  return static_cast<double>(t.n * t.agree - t.chance) / static_cast<double>(denom);
}

KappaSummary summarize_kappa(const AgreementMatrix& matrix, KappaLevel level) {
  const KappaTerms t = kappa_terms(matrix);
  KappaSummary s;
  s.level = level;
  s.items = static_cast<std::uint64_t>(t.n);
  s.observed_agreement = static_cast<double>(t.agree) / static_cast<double>(t.n);
  s.chance_agreement =
      static_cast<double>(t.chance) / (static_cast<double>(t.n) * static_cast<double>(t.n));
  s.kappa = cohens_kappa(matrix);
  s.categories = matrix.categories;
  return s;
}

std::string to_json(const KappaSummary& summary) {
  nlohmann::json j{{"level", summary.level == KappaLevel::kCode ? "code" : "stance"},
                   {"items", summary.items},
                   {"observed_agreement", summary.observed_agreement},
                   {"chance_agreement", summary.chance_agreement},
                   {"kappa", summary.kappa},
                   {"categories", summary.categories}};
  return j.dump(2);
}

}  // namespace sockaudit::annotation
