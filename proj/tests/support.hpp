#pragma once

// Helpers shared by the extractor tests and the acceptance runner.

#include <memory>
#include <optional>
#include <random>

#include "conceptcut/extractor.hpp"
#include "conceptcut/synth.hpp"

namespace conceptcut::testing {

// SpanningDag keeps a pointer to its taxonomy, so both live on the heap
// together.
struct SpanningCase {
  std::unique_ptr<ConceptDag> taxonomy;
  std::optional<SpanningDag> dag;
};

inline BagOfConcepts bag_of(const ConceptDag& taxonomy, std::initializer_list<std::string_view> ids) {
  BagOfConcepts bag;
  for (auto id : ids) {
    auto& e = bag.entries[taxonomy.at(id)];
    ++e.count;
  }
  return bag;
}

inline SpanningCase spanning_case(ConceptDag taxonomy, const BagOfConcepts& bag) {
  SpanningCase c;
  c.taxonomy = std::make_unique<ConceptDag>(std::move(taxonomy));
  c.dag = build_spanning_dag(bag, *c.taxonomy);
  return c;
}

inline SpanningCase spanning_case(std::string_view taxonomy_text, std::initializer_list<std::string_view> ids) {
  auto tax = load_taxonomy(taxonomy_text);
  auto bag = bag_of(tax, ids);
  return spanning_case(std::move(tax), bag);
}

// Random taxonomy and a random bag over it: every named, linked concept enters
// the bag with probability bag_prob (at least one does).
inline SpanningCase random_spanning_case(std::uint64_t seed, const TaxonomyGenParams& p, double bag_prob) {
  auto tax = generate_taxonomy(p, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  BagOfConcepts bag;
  std::vector<ConceptIndex> eligible;
  for (ConceptIndex c = 0; c < tax.size(); ++c)
    if (!tax.is_orphan(c) && !tax.node(c).anonymous()) eligible.push_back(c);
  for (auto c : eligible)
    if (uniform_unit(rng) < bag_prob) bag.entries[c].count = 1;
  if (bag.empty()) bag.entries[eligible[uniform_below(rng, eligible.size())]].count = 1;
  return spanning_case(std::move(tax), bag);
}

}  // namespace conceptcut::testing
