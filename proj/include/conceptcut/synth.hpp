#pragma once

// Seeded generators: random taxonomies, vocabulary-disjoint documents and
// evaluation corpora made by concatenating documents. Every generator uses
// std::mt19937_64 with portable draws, so output is byte-identical for a
// given seed.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/evaluation.hpp"
#include "conceptcut/taxonomy.hpp"
#include "conceptcut/text_util.hpp"

namespace conceptcut {

// Byte offsets of the words of a text: maximal runs of word characters, the
// same units an empty-lexicon tokenization yields.
inline std::vector<std::pair<std::size_t, std::size_t>> word_spans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// Index of the first word starting at or after the character offset.
inline std::size_t word_index_at(std::span<const std::pair<std::size_t, std::size_t>> words, std::size_t char_offset) {
  auto it = std::lower_bound(words.begin(), words.end(), char_offset,
                             [](const auto& w, std::size_t off) { return w.first < off; });
  return static_cast<std::size_t>(it - words.begin());
}

struct TaxonomyGenParams {
  std::size_t nodes = 100;          // linked concepts, orphans excluded
  std::size_t roots = 1;
  double extra_parent_prob = 0.0;   // chance of a second superconcept
  double anonymous_fraction = 0.0;  // non-root concepts without headword or gloss
  std::size_t orphans = 0;
};

// Concepts are created in order; each non-root concept picks its
// superconcept(s) uniformly among the concepts created before it.
inline ConceptDag generate_taxonomy(const TaxonomyGenParams& p, std::uint64_t seed) {
  if (p.roots == 0 || p.roots > p.nodes) throw ConfigError("need 1 <= roots <= nodes");
  if (!(p.extra_parent_prob >= 0.0 && p.extra_parent_prob <= 1.0)) throw ConfigError("extra parent probability outside [0, 1]");
  if (!(p.anonymous_fraction >= 0.0 && p.anonymous_fraction <= 1.0)) throw ConfigError("anonymous fraction outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<ConceptNode> nodes;
  std::vector<ConceptEdge> edges;
  auto make_id = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "c%05zu", i);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < p.nodes; ++i) {
    ConceptNode n{make_id(i), {}, {}};
    const bool anonymous = i >= p.roots && uniform_unit(rng) < p.anonymous_fraction;
    if (!anonymous) n.headword = "concept " + std::to_string(i);
    nodes.push_back(std::move(n));
    if (i < p.roots) continue;
    auto first = uniform_below(rng, i);
    edges.push_back({nodes[i].id, nodes[first].id});
    if (i >= 2 && uniform_unit(rng) < p.extra_parent_prob) {
      auto second = uniform_below(rng, i - 1);
      if (second >= first) ++second;
      edges.push_back({nodes[i].id, nodes[second].id});
    }
  }
  for (std::size_t k = 0; k < p.orphans; ++k) nodes.push_back({make_id(p.nodes + k), "orphan " + std::to_string(k), {}});
  return ConceptDag::build(std::move(nodes), edges);
}

struct DocumentGenParams {
  std::size_t min_words = 160;
  std::size_t max_words = 320;
  std::size_t vocabulary = 60;  // distinct words per document
  std::size_t sentence_words = 12;
};

// Documents over pairwise disjoint vocabularies with Zipf-distributed word
// frequencies.
inline std::vector<std::string> generate_documents(std::size_t count, const DocumentGenParams& p, std::uint64_t seed) {
  if (p.min_words == 0 || p.max_words < p.min_words) throw ConfigError("need 1 <= min_words <= max_words");
  if (p.vocabulary == 0) throw ConfigError("vocabulary must be >= 1");
  static constexpr std::string_view onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "pl"};
  static constexpr std::string_view vowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::mt19937_64 rng(seed);
  std::set<std::string> used;
  auto fresh_word = [&] {
    while (true) {
      std::string w;
      const auto syllables = 2 + uniform_below(rng, 3);
      for (std::uint64_t s = 0; s < syllables; ++s) {
        w += onsets[uniform_below(rng, std::size(onsets))];
        w += vowels[uniform_below(rng, std::size(vowels))];
      }
      if (used.insert(w).second) return w;
    }
  };
  std::vector<double> cumulative(p.vocabulary);
  double total = 0.0;
  for (std::size_t r = 0; r < p.vocabulary; ++r) cumulative[r] = total += 1.0 / static_cast<double>(r + 1);

  std::vector<std::string> docs;
  for (std::size_t d = 0; d < count; ++d) {
    std::vector<std::string> vocab;
    for (std::size_t v = 0; v < p.vocabulary; ++v) vocab.push_back(fresh_word());
    const auto length = p.min_words + uniform_below(rng, p.max_words - p.min_words + 1);
    std::string text;
    for (std::size_t w = 0; w < length; ++w) {
      const double u = uniform_unit(rng) * total;
      auto rank = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      rank = std::min(rank, p.vocabulary - 1);
      if (!text.empty()) text += ' ';
      text += vocab[rank];
      if (p.sentence_words && (w + 1) % p.sentence_words == 0) text += '.';
    }
    docs.push_back(std::move(text));
  }
  return docs;
}

struct SyntheticCorpus {
  std::string text;
  Segmentation real;                       // word offsets of the document junctions
  std::vector<std::size_t> char_offsets;   // byte offset of each junction
  std::vector<std::size_t> sources;        // indices into the input documents
};

// Picks group_size distinct documents at random and joins them with a blank
// line; the junctions are the reference segmentation.
inline SyntheticCorpus synthesize_eval_corpus(const std::vector<std::string>& docs, std::size_t group_size,
                                              std::uint64_t seed) {
  if (group_size < 2) throw ConfigError("group size must be >= 2");
  if (docs.size() < group_size)
    throw DataError("need " + std::to_string(group_size) + " documents, got " + std::to_string(docs.size()));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(docs.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  for (std::size_t i = 0; i < group_size; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  SyntheticCorpus c;
  std::size_t words = 0;
  for (std::size_t i = 0; i < group_size; ++i) {
    const auto& doc = docs[pool[i]];
    const auto n = word_spans(doc).size();
    if (n == 0) throw DataError("document " + std::to_string(pool[i]) + " has no words");
    if (i > 0) {
      c.text += "\n\n";
      c.real.boundaries.push_back(words);
      c.char_offsets.push_back(c.text.size() + word_spans(doc).front().first);
    }
    c.text += doc;
    words += n;
    c.sources.push_back(pool[i]);
  }
  c.real.word_count = words;
  return c;
}

}  // namespace conceptcut
