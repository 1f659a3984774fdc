#pragma once

// Topic extraction: bag of concepts -> spanning DAG over the taxonomy ->
// per-concept genericity (S1), informativeness (S2) and their weighted
// geometric mean U -> best cut by dynamic programming.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/lexicon.hpp"
#include "conceptcut/segmenter.hpp"
#include "conceptcut/taxonomy.hpp"

namespace conceptcut {

struct BagEntry {
  std::set<std::string> lemmas;
  std::vector<std::size_t> positions;  // token indices
  std::uint32_t count = 0;
};

struct BagOfConcepts {
  std::map<ConceptIndex, BagEntry> entries;
  std::vector<std::string> warnings;

  bool empty() const { return entries.empty(); }
};

// Every concept of every lemma candidate enters the bag (no sense
// disambiguation). Unknown ids, orphans and anonymous concepts are dropped
// with a warning.
inline BagOfConcepts bag_of_concepts(std::span<const Token> tokens, const ConceptDag& dag) {
  BagOfConcepts bag;
  std::set<std::string> warned;
  auto warn = [&](const std::string& id, const std::string& why) {
    if (warned.insert(id).second) bag.warnings.push_back("concept '" + id + "' " + why + "; dropped");
  };
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    std::set<ConceptIndex> raised;
    for (const auto& cand : tokens[t].lemma_candidates) {
      for (const auto& id : cand.concept_ids) {
        auto c = dag.find(id);
        if (!c) {
          warn(id, "is not in the taxonomy");
          continue;
        }
        if (dag.is_orphan(*c)) {
          warn(id, "is an orphan");
          continue;
        }
        if (dag.node(*c).anonymous()) {
          warn(id, "is anonymous");
          continue;
        }
        auto& e = bag.entries[*c];
        e.lemmas.insert(cand.lemma);
        if (raised.insert(*c).second) {
          e.positions.push_back(t);
          ++e.count;
        }
      }
    }
  }
  return bag;
}

// A node of the sub-hierarchy induced by a bag. A bag concept that also has
// bag descendants gets an extra child with self_leaf set, standing for the
// concept as its own leaf.
struct SpanNode {
  ConceptIndex concept_index = 0;
  bool in_bag = false;
  bool self_leaf = false;
  bool selectable = true;  // false for anonymous concepts
  std::vector<std::uint32_t> parents;
  std::vector<std::uint32_t> children;
  std::uint64_t leaf_paths = 0;  // n_i: downward paths to bag leaves
};

class SpanningDag {
 public:
  const ConceptDag& taxonomy() const { return *taxonomy_; }
  std::size_t size() const { return nodes_.size(); }
  const SpanNode& node(std::uint32_t i) const { return nodes_[i]; }
  const std::vector<SpanNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& roots() const { return roots_; }
  // Parents before children.
  const std::vector<std::uint32_t>& topological_order() const { return topo_; }
  // M: every root-to-bag-leaf path, multiple inheritance counted separately.
  std::uint64_t total_leaf_paths() const { return total_; }

  std::optional<std::uint32_t> find(ConceptIndex c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Assembles a spanning DAG from explicit nodes (children/parents filled,
  // leaf_paths ignored). Used by build_spanning_dag and by tests that need
  // hand-made shapes.
  static SpanningDag assemble(const ConceptDag& taxonomy, std::vector<SpanNode> nodes) {
    SpanningDag d;
    d.taxonomy_ = &taxonomy;
    d.nodes_ = std::move(nodes);
    const auto n = static_cast<std::uint32_t>(d.nodes_.size());
    for (std::uint32_t i = 0; i < n; ++i)
      if (!d.nodes_[i].self_leaf) d.index_.emplace(d.nodes_[i].concept_index, i);
    std::vector<std::size_t> pending(n);
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
      pending[i] = d.nodes_[i].parents.size();
      if (pending[i] == 0) {
        d.roots_.push_back(i);
        ready.push_back(i);
      }
    }
    for (std::size_t head = 0; head < ready.size(); ++head) {
      const auto c = ready[head];
      d.topo_.push_back(c);
      for (auto ch : d.nodes_[c].children)
        if (--pending[ch] == 0) ready.push_back(ch);
    }
    if (d.topo_.size() != n) throw DataError("spanning structure is not acyclic");
    for (auto it = d.topo_.rbegin(); it != d.topo_.rend(); ++it) {
      auto& node = d.nodes_[*it];
      if (node.children.empty()) {
        node.leaf_paths = 1;
        continue;
      }
      node.leaf_paths = 0;
      for (auto ch : node.children) node.leaf_paths = detail::checked_add(node.leaf_paths, d.nodes_[ch].leaf_paths);
    }
    d.total_ = 0;
    for (auto r : d.roots_) d.total_ = detail::checked_add(d.total_, d.nodes_[r].leaf_paths);
    return d;
  }

 private:
  const ConceptDag* taxonomy_ = nullptr;
  std::vector<SpanNode> nodes_;
  std::unordered_map<ConceptIndex, std::uint32_t> index_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::uint32_t> topo_;
  std::uint64_t total_ = 0;
};

// Bag concepts plus all their taxonomy ancestors. nullopt when the bag is
// empty (nothing to extract).
inline std::optional<SpanningDag> build_spanning_dag(const BagOfConcepts& bag, const ConceptDag& taxonomy) {
  if (bag.empty()) return std::nullopt;
  std::vector<char> member(taxonomy.size(), 0);
  std::vector<ConceptIndex> stack;
  for (const auto& [c, _] : bag.entries) {
    if (!member[c]) {
      member[c] = 1;
      stack.push_back(c);
    }
  }
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    for (auto p : taxonomy.parents(c))
      if (!member[p]) {
        member[p] = 1;
        stack.push_back(p);
      }
  }
  std::vector<SpanNode> nodes;
  std::unordered_map<ConceptIndex, std::uint32_t> local;
  for (auto c : taxonomy.topological_order()) {
    if (!member[c]) continue;
    local.emplace(c, static_cast<std::uint32_t>(nodes.size()));
    SpanNode n;
    n.concept_index = c;
    n.in_bag = bag.entries.count(c) != 0;
    n.selectable = !taxonomy.node(c).anonymous();
    nodes.push_back(std::move(n));
  }
  const auto real = static_cast<std::uint32_t>(nodes.size());
  for (std::uint32_t i = 0; i < real; ++i)
    for (auto p : taxonomy.parents(nodes[i].concept_index)) {
      auto pi = local.at(p);
      nodes[i].parents.push_back(pi);
      nodes[pi].children.push_back(i);
    }
  for (std::uint32_t i = 0; i < real; ++i) {
    if (!nodes[i].in_bag || nodes[i].children.empty()) continue;
    SpanNode self;
    self.concept_index = nodes[i].concept_index;
    self.in_bag = true;
    self.self_leaf = true;
    self.parents.push_back(i);
    nodes[i].children.push_back(static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back(std::move(self));
  }
  return SpanningDag::assemble(taxonomy, std::move(nodes));
}

// Genericity: (n_i - 1) / (M - 1); zero everywhere when M = 1.
inline double score_s1(const SpanningDag& dag, std::uint32_t node) {
  const auto m = dag.total_leaf_paths();
  if (m <= 1) return 0.0;
  return static_cast<double>(dag.node(node).leaf_paths - 1) / static_cast<double>(m - 1);
}

// Informativeness: 1 - d(i) from the taxonomy-wide path statistics. A leaf of
// the spanning DAG stands for itself and scores 1.
inline double score_s2(const SpanningDag& dag, std::uint32_t node) {
  const auto& n = dag.node(node);
  if (n.children.empty()) return 1.0;
  return 1.0 - dag.taxonomy().stats(n.concept_index).leaf_distance;
}

// U = s1^(1-a) * s2^a with 0^0 = 1, so a = 0 gives s1 and a = 1 gives s2
// exactly.
inline double combine_scores(double s1, double s2, double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("parameter a must lie in [0, 1]");
  return std::pow(s1, 1.0 - a) * std::pow(s2, a);
}

struct ExtractionConfig {
  double a = 0.5;
  // Children's scores averaged by covered leaf-paths, which makes the DP
  // objective equal to the cut score. false gives the plain mean.
  bool weighted_average = true;

  void validate() const {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("parameter a must lie in [0, 1]");
  }
};

inline double node_score(const SpanningDag& dag, std::uint32_t node, const ExtractionConfig& cfg) {
  return combine_scores(score_s1(dag, node), score_s2(dag, node), cfg.a);
}

struct SelectedConcept {
  std::uint32_t node = 0;
  ConceptIndex concept_index = 0;
  std::uint64_t covered = 0;     // leaf-paths this selection stands for
  std::uint64_t leaf_paths = 0;  // n_i
  double score = 0.0;            // U
  bool self_only = false;
};

struct ScoredCut {
  std::vector<SelectedConcept> selected;  // ordered by spanning-DAG node index
  double score = 0.0;                     // S(chi)
};

// Per-node values of the bottom-up pass, for inspection.
struct DpTrace {
  std::vector<double> local;  // L (-inf for unselectable nodes)
  std::vector<double> stored;
  std::vector<char> expand;
};

// Scores a set of selected nodes: S = (1/M) sum over leaf-paths of the U of
// the selected node covering it. Throws DataError unless the selection covers
// every leaf-path exactly once.
inline ScoredCut cut_score(std::vector<std::uint32_t> selection, const SpanningDag& dag, const ExtractionConfig& cfg) {
  cfg.validate();
  std::sort(selection.begin(), selection.end());
  selection.erase(std::unique(selection.begin(), selection.end()), selection.end());
  std::vector<char> chosen(dag.size(), 0);
  for (auto s : selection) {
    if (s >= dag.size()) throw DataError("selected node out of range");
    if (!dag.node(s).selectable) throw DataError("anonymous concept cannot be selected");
    chosen[s] = 1;
  }
  std::vector<std::uint64_t> reach(dag.size(), 0);
  for (auto r : dag.roots()) reach[r] = 1;
  for (auto c : dag.topological_order()) {
    if (reach[c] == 0 || chosen[c]) continue;
    const auto& n = dag.node(c);
    if (n.children.empty()) throw DataError("cut does not cover every leaf-path");
    for (auto ch : n.children) reach[ch] = detail::checked_add(reach[ch], reach[c]);
  }
  ScoredCut cut;
  double sum = 0.0;
  for (auto s : selection) {
    if (reach[s] == 0) throw DataError("cut is not minimal: a selected node lies under another selection");
    SelectedConcept sc;
    sc.node = s;
    sc.concept_index = dag.node(s).concept_index;
    sc.leaf_paths = dag.node(s).leaf_paths;
    sc.covered = reach[s] * sc.leaf_paths;
    sc.score = node_score(dag, s, cfg);
    sc.self_only = dag.node(s).self_leaf;
    sum += static_cast<double>(sc.covered) * sc.score;
    cut.selected.push_back(sc);
  }
  cut.score = sum / static_cast<double>(dag.total_leaf_paths());
  return cut;
}

inline double cut_score(const ScoredCut& cut, const SpanningDag& dag, const ExtractionConfig& cfg) {
  std::vector<std::uint32_t> sel;
  for (const auto& s : cut.selected) sel.push_back(s.node);
  auto rescored = cut_score(sel, dag, cfg);
  for (std::size_t i = 0; i < rescored.selected.size(); ++i)
    if (rescored.selected[i].covered != cut.selected[i].covered)
      throw DataError("cut reports inconsistent leaf-path coverage");
  return rescored.score;
}

// Bottom-up (children before parents) each node stores max(L, G), where L is
// its own score and G the average of its children's stored scores, and is
// marked for expansion when L <= G. Top-down from the roots, expanded nodes
// hand over to their children and the others are selected.
inline ScoredCut extract_cut(const SpanningDag& dag, const ExtractionConfig& cfg, DpTrace* trace = nullptr) {
  cfg.validate();
  if (dag.size() == 0) throw DataError("nothing to extract");
  const std::size_t n = dag.size();
  DpTrace local_trace;
  DpTrace& t = trace ? *trace : local_trace;
  t.local.assign(n, 0.0);
  t.stored.assign(n, 0.0);
  t.expand.assign(n, 0);
  const auto& topo = dag.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto c = *it;
    const auto& node = dag.node(c);
    const double local =
        node.selectable ? node_score(dag, c, cfg) : -std::numeric_limits<double>::infinity();
    t.local[c] = local;
    if (node.children.empty()) {
      t.stored[c] = local;
      continue;
    }
    double sum = 0.0, weight = 0.0;
    for (auto ch : node.children) {
      const double w = cfg.weighted_average ? static_cast<double>(dag.node(ch).leaf_paths) : 1.0;
      sum += w * t.stored[ch];
      weight += w;
    }
    const double children = sum / weight;
    if (local <= children) {
      t.stored[c] = children;
      t.expand[c] = 1;
    } else {
      t.stored[c] = local;
    }
  }
  std::vector<char> reached(n, 0);
  for (auto r : dag.roots()) reached[r] = 1;
  std::vector<std::uint32_t> selection;
  for (auto c : topo) {
    if (!reached[c]) continue;
    if (t.expand[c]) {
      for (auto ch : dag.node(c).children) reached[ch] = 1;
    } else {
      selection.push_back(c);
    }
  }
  return cut_score(std::move(selection), dag, cfg);
}

// Number of cuts of a complete tree with branching b and p levels:
// C(1) = 1, C(p) = C(p-1)^b + 1. Throws std::overflow_error past 64 bits.
inline std::uint64_t count_cuts(std::uint64_t branching, std::uint64_t depth) {
  if (branching < 1 || depth < 1) throw ConfigError("branching and depth must be >= 1");
  std::uint64_t c = 1;
  for (std::uint64_t level = 2; level <= depth; ++level) {
    std::uint64_t power = 1;
    for (std::uint64_t k = 0; k < branching; ++k) {
      if (c != 0 && power > std::numeric_limits<std::uint64_t>::max() / c)
        throw std::overflow_error("cut count exceeds 64 bits");
      power *= c;
    }
    if (power == std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("cut count exceeds 64 bits");
    c = power + 1;
  }
  return c;
}

inline constexpr std::size_t kOracleMaxNodes = 20;

// Exhaustive search over every cut of a small tree. Refuses DAGs with
// multiple inheritance or more than kOracleMaxNodes nodes. Among equal
// scores the first enumerated cut is kept.
inline ScoredCut brute_force_best_cut(const SpanningDag& dag, const ExtractionConfig& cfg) {
  cfg.validate();
  if (dag.size() == 0) throw DataError("nothing to extract");
  if (dag.size() > kOracleMaxNodes) throw DataError("oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes");
  if (dag.roots().size() != 1) throw DataError("oracle requires a single root");
  for (const auto& n : dag.nodes())
    if (n.parents.size() > 1) throw DataError("oracle requires a tree");

  using Cut = std::vector<std::uint32_t>;
  // Cuts of the subtree below c.
  auto enumerate = [&](auto&& self, std::uint32_t c) -> std::vector<Cut> {
    std::vector<Cut> out;
    const auto& node = dag.node(c);
    if (node.selectable) out.push_back({c});
    if (node.children.empty()) return out;
    std::vector<Cut> partial{Cut{}};
    for (auto ch : node.children) {
      auto sub = self(self, ch);
      std::vector<Cut> next;
      for (const auto& p : partial)
        for (const auto& s : sub) {
          Cut merged = p;
          merged.insert(merged.end(), s.begin(), s.end());
          next.push_back(std::move(merged));
        }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
    return out;
  };
  std::optional<ScoredCut> best;
  for (auto& cut : enumerate(enumerate, dag.roots().front())) {
    auto scored = cut_score(std::move(cut), dag, cfg);
    if (!best || scored.score > best->score) best = std::move(scored);
  }
  if (!best) throw DataError("tree has no selectable cut");
  return *best;
}

struct SegmentTopics {
  Segment segment;
  std::optional<ScoredCut> cut;  // nullopt when the segment raised no concept
  std::vector<std::string> warnings;
};

// Segments the text, then extracts a cut per segment. The spanning DAGs are
// not kept; node indices in the cuts only identify order.
inline std::vector<SegmentTopics> annotate(std::string_view text, const Lexicon& lexicon, const ConceptDag& taxonomy,
                                           const SegmenterConfig& seg_cfg, const ExtractionConfig& ext_cfg) {
  seg_cfg.validate();
  ext_cfg.validate();
  auto seg = segment(text, lexicon, seg_cfg);
  std::vector<SegmentTopics> out;
  for (const auto& s : seg.segments) {
    SegmentTopics st;
    st.segment = s;
    std::span<const Token> toks(seg.tokens.data() + s.token_begin, s.token_end - s.token_begin);
    auto bag = bag_of_concepts(toks, taxonomy);
    st.warnings = bag.warnings;
    if (auto dag = build_spanning_dag(bag, taxonomy)) st.cut = extract_cut(*dag, ext_cfg);
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace conceptcut
