#pragma once

// Evaluation: the word-position segmentation error, and probabilistic
// concept matching (normalized Leacock-Chodorow) with expected precision,
// recall, F-measure, accuracy and a threshold sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/taxonomy.hpp"

namespace conceptcut {

// Boundaries are word offsets: offset b starts a new segment at (0-based)
// word b, so valid offsets lie in [1, word_count - 1].
struct Segmentation {
  std::size_t word_count = 0;
  std::vector<std::size_t> boundaries;

  std::size_t segment_count() const { return word_count == 0 ? 0 : boundaries.size() + 1; }
};

// Checks offsets, sorting and deduplicating is left to the caller.
inline void validate(const Segmentation& s) {
  std::size_t prev = 0;
  for (auto b : s.boundaries) {
    if (b == 0 || b >= s.word_count)
      throw DataError("boundary " + std::to_string(b) + " outside word range of " + std::to_string(s.word_count));
    if (b <= prev) throw DataError("boundaries must be strictly increasing");
    prev = b;
  }
}

// D[i] = 1 + number of boundaries at or before word i.
inline std::vector<std::size_t> position_vector(const Segmentation& s) {
  validate(s);
  std::vector<std::size_t> d(s.word_count, 1);
  std::size_t seg = 1, next = 0;
  for (std::size_t i = 0; i < s.word_count; ++i) {
    while (next < s.boundaries.size() && s.boundaries[next] <= i) {
      ++seg;
      ++next;
    }
    d[i] = seg;
  }
  return d;
}

// Lower triangle including the diagonal: row i holds entries j = 0..i.
using TriangularMatrix = std::vector<std::vector<std::int64_t>>;

// M[i][j] = |D_i - D_j| for j <= i.
inline TriangularMatrix position_matrix(std::span<const std::size_t> d) {
  TriangularMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    m[i].resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j)
      m[i][j] = std::llabs(static_cast<std::int64_t>(d[i]) - static_cast<std::int64_t>(d[j]));
  }
  return m;
}

inline TriangularMatrix error_matrix(const TriangularMatrix& r, const TriangularMatrix& f) {
  if (r.size() != f.size()) throw DataError("matrices differ in size");
  TriangularMatrix e(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    e[i].resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j) e[i][j] = std::llabs(r[i][j] - f[i][j]);
  }
  return e;
}

// Mean of the strictly lower entries (the i > j word pairs).
inline double mean_pair_error(const TriangularMatrix& e) {
  const std::size_t n = e.size();
  if (n < 2) return 0.0;
  std::int64_t sum = 0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) sum += e[i][j];
  return static_cast<double>(sum) / static_cast<double>(n * (n - 1) / 2);
}

// Average over word pairs i < j of | |R_j - R_i| - |F_j - F_i| |.
//
// Position vectors are non-decreasing, so each entry equals |x_j - x_i| with
// x = D_real - D_found; the sum of pairwise absolute differences is taken
// from the sorted x in O(n log n) instead of building the matrices.
inline double segmentation_error(const Segmentation& real, const Segmentation& found) {
  if (real.word_count != found.word_count) throw DataError("segmentations cover different word counts");
  const std::size_t n = real.word_count;
  if (n < 2) return 0.0;
  auto dr = position_vector(real);
  auto df = position_vector(found);
  std::vector<std::int64_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::int64_t>(dr[i]) - static_cast<std::int64_t>(df[i]);
  std::sort(x.begin(), x.end());
  long double sum = 0;
  for (std::size_t k = 0; k < n; ++k)
    sum += static_cast<long double>(x[k]) * (2.0L * static_cast<long double>(k) - static_cast<long double>(n) + 1.0L);
  return static_cast<double>(sum / (static_cast<long double>(n) * static_cast<long double>(n - 1) / 2.0L));
}

// p(c | C) = S_lch(c, C) / ln(2D): 1 for identical concepts, 0 for
// unreachable pairs.
inline double match_probability(const ConceptDag& dag, ConceptIndex c, ConceptIndex ref,
                                PathMode mode = PathMode::undirected) {
  auto sim = lch_similarity(dag, c, ref, mode);
  if (!sim.reachable) return 0.0;
  const double max = std::log(2.0 * static_cast<double>(dag.max_depth()));
  return std::clamp(sim.value / max, 0.0, 1.0);
}

struct ConceptProbability {
  std::string id;
  double p = 0.0;
};

struct MatchProbabilities {
  std::vector<ConceptProbability> produced;   // p(c_i), sorted descending
  std::vector<ConceptProbability> reference;  // p(C_k), sorted descending
  // pair[i][k] = p(c_i | C_k), rows and columns in input order.
  std::vector<std::vector<double>> pair;
  std::vector<std::string> warnings;
};

namespace detail {

inline void sort_descending(std::vector<ConceptProbability>& v) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.p > b.p; });
}

}  // namespace detail

// Marginals from a pair matrix: p(c_i) = 1 - prod_k (1 - p(c_i|C_k)) and
// p(C_k) = 1 - prod_i (1 - p(c_i|C_k)).
inline MatchProbabilities marginals_from_pairs(std::vector<std::string> produced, std::vector<std::string> reference,
                                               std::vector<std::vector<double>> pair) {
  if (produced.empty() || reference.empty()) throw DataError("produced and reference sets must be non-empty");
  if (pair.size() != produced.size()) throw DataError("pair matrix row count mismatch");
  for (const auto& row : pair) {
    if (row.size() != reference.size()) throw DataError("pair matrix column count mismatch");
    for (double p : row)
      if (!(p >= 0.0 && p <= 1.0)) throw DataError("match probability outside [0, 1]");
  }
  MatchProbabilities mp;
  for (std::size_t i = 0; i < produced.size(); ++i) {
    double miss = 1.0;
    for (std::size_t k = 0; k < reference.size(); ++k) miss *= 1.0 - pair[i][k];
    mp.produced.push_back({produced[i], 1.0 - miss});
  }
  for (std::size_t k = 0; k < reference.size(); ++k) {
    double miss = 1.0;
    for (std::size_t i = 0; i < produced.size(); ++i) miss *= 1.0 - pair[i][k];
    mp.reference.push_back({reference[k], 1.0 - miss});
  }
  mp.pair = std::move(pair);
  detail::sort_descending(mp.produced);
  detail::sort_descending(mp.reference);
  return mp;
}

// Produced/reference concepts absent from the taxonomy match nothing and are
// reported in warnings.
inline MatchProbabilities aggregate_probabilities(const std::vector<std::string>& produced,
                                                  const std::vector<std::string>& reference, const ConceptDag& dag,
                                                  PathMode mode = PathMode::undirected) {
  if (produced.empty() || reference.empty()) throw DataError("produced and reference sets must be non-empty");
  std::vector<std::string> warnings;
  auto resolve = [&](const std::string& id) -> std::optional<ConceptIndex> {
    auto c = dag.find(id);
    if (!c) warnings.push_back("concept '" + id + "' is not in the taxonomy");
    return c;
  };
  std::vector<std::optional<ConceptIndex>> ci, rk;
  for (const auto& id : produced) ci.push_back(resolve(id));
  for (const auto& id : reference) rk.push_back(resolve(id));
  std::vector<std::vector<double>> pair(produced.size(), std::vector<double>(reference.size(), 0.0));
  for (std::size_t i = 0; i < produced.size(); ++i)
    for (std::size_t k = 0; k < reference.size(); ++k) {
      if (!ci[i] || !rk[k]) continue;
      auto sim = lch_similarity(dag, *ci[i], *rk[k], mode);
      if (!sim.reachable) {
        warnings.push_back("no path between '" + produced[i] + "' and '" + reference[k] + "'");
        continue;
      }
      pair[i][k] = match_probability(dag, *ci[i], *rk[k], mode);
    }
  auto mp = marginals_from_pairs(produced, reference, std::move(pair));
  mp.warnings = std::move(warnings);
  return mp;
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Expected precision and recall: P = mean p(c_i), R = mean p(C_k).
inline PrecisionRecall precision_recall(const MatchProbabilities& mp) {
  PrecisionRecall pr;
  for (const auto& c : mp.produced) pr.precision += c.p;
  for (const auto& c : mp.reference) pr.recall += c.p;
  if (!mp.produced.empty()) pr.precision /= static_cast<double>(mp.produced.size());
  if (!mp.reference.empty()) pr.recall /= static_cast<double>(mp.reference.size());
  return pr;
}

// (b^2 + 1) P R / (b^2 P + R); 0 when P = R = 0. Requires b > 0.
inline double f_measure(double precision, double recall, double b = 1.0) {
  if (!(b > 0.0)) throw ConfigError("F-measure weight b must be > 0");
  const double b2 = b * b;
  const double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (b2 + 1.0) * precision * recall / denom;
}

// Probability that every produced concept is correct: prod p(c_i).
inline double accuracy(const MatchProbabilities& mp) {
  double a = 1.0;
  for (const auto& c : mp.produced) a *= c.p;
  return a;
}

struct PRPoint {
  double theta = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double accuracy = 0.0;
  std::size_t produced_kept = 0;
  std::size_t reference_kept = 0;
  bool defined = true;  // false when the threshold removes every produced or reference concept
};

// For each threshold only concepts with probability > theta count. Precision
// averages over the surviving produced concepts; recall sums the surviving
// reference probabilities over the full reference size.
inline std::vector<PRPoint> threshold_sweep(const MatchProbabilities& mp, std::span<const double> thetas,
                                            double b = 1.0) {
  std::vector<PRPoint> out;
  for (double theta : thetas) {
    if (!(theta >= 0.0 && theta < 1.0)) throw ConfigError("thresholds must lie in [0, 1)");
    PRPoint pt;
    pt.theta = theta;
    double psum = 0.0, rsum = 0.0, acc = 1.0;
    for (const auto& c : mp.produced)
      if (c.p > theta) {
        psum += c.p;
        acc *= c.p;
        ++pt.produced_kept;
      }
    for (const auto& c : mp.reference)
      if (c.p > theta) {
        rsum += c.p;
        ++pt.reference_kept;
      }
    pt.defined = pt.produced_kept > 0 && pt.reference_kept > 0;
    pt.precision = pt.produced_kept ? psum / static_cast<double>(pt.produced_kept) : 0.0;
    pt.recall = mp.reference.empty() ? 0.0 : rsum / static_cast<double>(mp.reference.size());
    pt.accuracy = pt.produced_kept ? acc : 0.0;
    pt.f_measure = f_measure(pt.precision, pt.recall, b);
    out.push_back(pt);
  }
  return out;
}

// 0, step, 2 step, ... below 1.
inline std::vector<double> default_thetas(double step = 0.05) {
  std::vector<double> t;
  for (int k = 0;; ++k) {
    double v = k * step;
    if (v >= 1.0 - 1e-12) break;
    t.push_back(v);
  }
  return t;
}

struct ExactMatchScores {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

// Set-overlap baseline: a produced concept counts only when it is literally
// in the reference.
inline ExactMatchScores evaluate_exact_match(const std::vector<std::string>& produced,
                                             const std::vector<std::string>& reference) {
  std::set<std::string> p(produced.begin(), produced.end());
  std::set<std::string> r(reference.begin(), reference.end());
  std::size_t common = 0;
  for (const auto& c : p) common += r.count(c);
  ExactMatchScores s;
  if (!p.empty()) s.precision = static_cast<double>(common) / static_cast<double>(p.size());
  if (!r.empty()) s.recall = static_cast<double>(common) / static_cast<double>(r.size());
  s.f_measure = f_measure(s.precision, s.recall);
  return s;
}

}  // namespace conceptcut
