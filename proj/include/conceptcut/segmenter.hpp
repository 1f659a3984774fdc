#pragma once

// TextTiling-style segmentation: fixed-size windows of content tokens,
// tf-idf weighted vectors, a Dice similarity curve between adjacent windows,
// iterative smoothing and relevance-scored boundaries at local minima.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/lexicon.hpp"

namespace conceptcut {

struct Window {
  std::size_t index = 0;
  std::size_t first = 0;  // token range [first, last)
  std::size_t last = 0;
  std::map<std::string, std::uint32_t> counts;
};

using WeightedVector = std::map<std::string, double>;

enum class DiceForm {
  sum,      // 2 sum(uv) / (sum u^2 + sum v^2), bounded by [0, 1]
  product,  // 2 sum(uv) / (sum u^2 * sum v^2), unnormalized variant
};

struct Boundary {
  std::size_t gap_index = 0;     // curve point, between windows gap and gap+1
  std::size_t token_offset = 0;  // first content token of the next segment
  std::size_t char_offset = 0;
  double relevance = 0.0;
};

// The lemma when every candidate agrees on it, else the surface; lowercased.
inline std::string window_term(const Token& t) {
  if (!t.lemma_candidates.empty()) {
    const auto& first = t.lemma_candidates.front().lemma;
    bool unique = std::all_of(t.lemma_candidates.begin(), t.lemma_candidates.end(),
                              [&](const LemmaCandidate& c) { return c.lemma == first; });
    if (unique) return normalize_surface(first);
  }
  return normalize_surface(t.surface);
}

// Partitions the tokens into ceil(len / size) windows; only the last may be
// shorter.
inline std::vector<Window> make_windows(std::span<const Token> tokens, std::size_t window_size) {
  if (window_size == 0) throw ConfigError("window size must be at least 1");
  std::vector<Window> windows;
  for (std::size_t start = 0; start < tokens.size(); start += window_size) {
    Window w;
    w.index = windows.size();
    w.first = start;
    w.last = std::min(tokens.size(), start + window_size);
    for (std::size_t t = w.first; t < w.last; ++t) ++w.counts[window_term(tokens[t])];
    windows.push_back(std::move(w));
  }
  return windows;
}

// w_ij = g_ij * ln(N / df_j), with df_j the number of windows containing term j.
inline std::vector<WeightedVector> weight_windows(std::span<const Window> windows) {
  std::map<std::string, std::size_t> df;
  for (const auto& w : windows)
    for (const auto& [term, _] : w.counts) ++df[term];
  const double n = static_cast<double>(windows.size());
  std::vector<WeightedVector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    WeightedVector v;
    for (const auto& [term, g] : w.counts) v[term] = static_cast<double>(g) * std::log(n / static_cast<double>(df[term]));
    out.push_back(std::move(v));
  }
  return out;
}

// Zero vectors have similarity 0.
inline double dice_similarity(const WeightedVector& u, const WeightedVector& v, DiceForm form = DiceForm::sum) {
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (const auto& [_, x] : u) uu += x * x;
  for (const auto& [_, x] : v) vv += x * x;
  auto a = u.begin();
  auto b = v.begin();
  while (a != u.end() && b != v.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += a->second * b->second;
      ++a;
      ++b;
    }
  }
  const double denom = form == DiceForm::sum ? uu + vv : uu * vv;
  if (denom == 0.0) return 0.0;
  return 2.0 * dot / denom;
}

inline std::vector<double> similarity_curve(std::span<const WeightedVector> vectors, DiceForm form = DiceForm::sum) {
  std::vector<double> curve;
  for (std::size_t i = 0; i + 1 < vectors.size(); ++i) curve.push_back(dice_similarity(vectors[i], vectors[i + 1], form));
  return curve;
}

// Each interior point moves a fraction `step` of the way toward the midpoint
// of its neighbours, all points at once; endpoints stay fixed. When `trace`
// is given it receives the curve after every iteration.
inline std::vector<double> smooth_curve(std::span<const double> curve, double step, unsigned iterations,
                                        std::vector<std::vector<double>>* trace = nullptr) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("smoothing step must lie in (0, 1]");
  std::vector<double> cur(curve.begin(), curve.end());
  std::vector<double> next = cur;
  for (unsigned k = 0; k < iterations; ++k) {
    for (std::size_t i = 1; i + 1 < cur.size(); ++i) {
      const double mid = 0.5 * (cur[i - 1] + cur[i + 1]);
      next[i] = cur[i] + step * (mid - cur[i]);
    }
    cur.swap(next);
    next = cur;
    if (trace) trace->push_back(cur);
  }
  return cur;
}

// Strict local minima of the curve. A plateau of equal minima gives a single
// boundary at its leftmost point. Relevance is the mean of the nearest local
// maxima on each side minus the minimum.
inline std::vector<Boundary> detect_boundaries(std::span<const double> c) {
  std::vector<Boundary> out;
  const std::size_t n = c.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(c[i] < c[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < n && c[j + 1] == c[i]) ++j;
    if (j + 1 < n && c[j + 1] > c[i]) {
      std::size_t l = i - 1;
      while (l > 0 && c[l - 1] >= c[l]) --l;
      std::size_t r = j + 1;
      while (r + 1 < n && c[r + 1] >= c[r]) ++r;
      Boundary b;
      b.gap_index = i;
      b.relevance = 0.5 * (c[l] + c[r]) - c[i];
      out.push_back(b);
    }
    i = j;
  }
  return out;
}

// Keeps boundaries with relevance >= min_relevance, then the max_count most
// relevant (earlier position wins ties), returned in position order.
inline std::vector<Boundary> filter_boundaries(std::vector<Boundary> boundaries, std::optional<double> min_relevance,
                                               std::optional<std::size_t> max_count) {
  if (min_relevance)
    std::erase_if(boundaries, [&](const Boundary& b) { return b.relevance < *min_relevance; });
  if (max_count && boundaries.size() > *max_count) {
    std::stable_sort(boundaries.begin(), boundaries.end(),
                     [](const Boundary& a, const Boundary& b) { return a.relevance > b.relevance; });
    boundaries.resize(*max_count);
    std::sort(boundaries.begin(), boundaries.end(),
              [](const Boundary& a, const Boundary& b) { return a.gap_index < b.gap_index; });
  }
  return boundaries;
}

struct SegmenterConfig {
  std::size_t window_size = 25;
  double smoothing_step = 0.5;
  unsigned smoothing_iterations = 2;
  std::optional<double> min_relevance;
  std::optional<std::size_t> max_boundaries;
  DiceForm dice = DiceForm::sum;

  void validate() const {
    if (window_size == 0) throw ConfigError("window size must be at least 1");
    if (!(smoothing_step > 0.0 && smoothing_step <= 1.0)) throw ConfigError("smoothing step must lie in (0, 1]");
    if (min_relevance && !(*min_relevance >= 0.0)) throw ConfigError("minimum relevance must be >= 0");
  }
};

// A contiguous part of the source text, with its content-token range.
struct Segment {
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
};

struct SegmentationResult {
  std::vector<Token> tokens;  // content tokens (stopwords removed)
  std::vector<double> raw_curve;
  std::vector<double> smoothed_curve;
  std::vector<Boundary> boundaries;
  std::vector<Segment> segments;
};

// Runs the pipeline on already filtered tokens. `text_size` bounds the last
// segment's character range.
inline SegmentationResult segment_tokens(std::vector<Token> tokens, std::size_t text_size, const SegmenterConfig& cfg) {
  cfg.validate();
  SegmentationResult res;
  res.tokens = std::move(tokens);
  auto windows = make_windows(res.tokens, cfg.window_size);
  auto vectors = weight_windows(windows);
  res.raw_curve = similarity_curve(vectors, cfg.dice);
  res.smoothed_curve = smooth_curve(res.raw_curve, cfg.smoothing_step, cfg.smoothing_iterations);
  res.boundaries = filter_boundaries(detect_boundaries(res.smoothed_curve), cfg.min_relevance, cfg.max_boundaries);
  for (auto& b : res.boundaries) {
    b.token_offset = (b.gap_index + 1) * cfg.window_size;
    b.char_offset = res.tokens[b.token_offset].begin;
  }
  Segment cur;
  for (const auto& b : res.boundaries) {
    cur.token_end = b.token_offset;
    cur.char_end = b.char_offset;
    res.segments.push_back(cur);
    cur = Segment{b.token_offset, 0, b.char_offset, 0};
  }
  cur.token_end = res.tokens.size();
  cur.char_end = text_size;
  res.segments.push_back(cur);
  return res;
}

// tokenize -> filter_stopwords -> windows -> weights -> curve -> smoothing ->
// boundaries. A text without any token yields no segment; otherwise the
// segments partition the text.
inline SegmentationResult segment(std::string_view text, const Lexicon& lexicon, const SegmenterConfig& cfg) {
  cfg.validate();
  auto all = tokenize(text, lexicon);
  if (all.empty()) return {};
  return segment_tokens(filter_stopwords(std::move(all), lexicon), text.size(), cfg);
}

}  // namespace conceptcut
