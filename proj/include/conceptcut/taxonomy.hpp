#pragma once

// Concept hierarchy: a DAG of hyponym -> hypernym links with precomputed
// path statistics and the Leacock-Chodorow similarity primitive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "conceptcut/error.hpp"
#include "conceptcut/text_util.hpp"

namespace conceptcut {

using ConceptIndex = std::uint32_t;

struct ConceptNode {
  std::string id;
  std::string headword;
  std::string gloss;

  // Neither headword nor gloss: kept for connectivity, never shown to users.
  bool anonymous() const { return headword.empty() && gloss.empty(); }
  // Headword when present, else the gloss, else empty.
  const std::string& label() const { return headword.empty() ? gloss : headword; }
};

struct ConceptEdge {
  std::string sub;
  std::string super;
};

// Path statistics of one concept.
//
// root_paths / leaf_paths count distinct upward paths to any root and distinct
// downward paths to any covered leaf; a root has one empty upward path and a
// leaf one empty downward path. The length histograms hold the multiset of
// edge counts: up_lengths[k] is the number of root paths with k edges.
//
// root_distance = 1/(N n) sum_j sum_k L_j / (L_j + l_k)
// leaf_distance = 1/(N n) sum_j sum_k l_k / (L_j + l_k)
// so the two always add to one.
struct PathStats {
  std::uint64_t root_paths = 0;
  std::uint64_t leaf_paths = 0;
  std::vector<std::uint64_t> up_lengths;
  std::vector<std::uint64_t> down_lengths;
  double root_distance = 0.0;
  double leaf_distance = 0.0;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a)
    throw DataError("path count overflows 64 bits");
  return a + b;
}

// Adds `src` shifted by one edge into `dst`.
inline void accumulate_shifted(std::vector<std::uint64_t>& dst,
                               const std::vector<std::uint64_t>& src) {
  if (dst.size() < src.size() + 1) dst.resize(src.size() + 1, 0);
  for (std::size_t k = 0; k < src.size(); ++k)
    dst[k + 1] = checked_add(dst[k + 1], src[k]);
}

}  // namespace detail

class ConceptDag {
 public:
  ConceptDag() = default;

  // Validates and freezes the hierarchy. Throws DataError on duplicate ids,
  // edges naming unknown ids, or cycles (the message names one cycle).
  // Repeated identical edges are collapsed.
  static ConceptDag build(std::vector<ConceptNode> nodes, const std::vector<ConceptEdge>& edges) {
    ConceptDag dag;
    dag.nodes_ = std::move(nodes);
    const std::size_t n = dag.nodes_.size();
    if (n > std::numeric_limits<ConceptIndex>::max()) throw DataError("too many concepts");
    dag.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& id = dag.nodes_[i].id;
      if (id.empty()) throw DataError("concept #" + std::to_string(i) + " has an empty id");
      if (!dag.index_.emplace(id, static_cast<ConceptIndex>(i)).second)
        throw DataError("duplicate concept id '" + id + "'");
    }
    dag.parents_.assign(n, {});
    dag.children_.assign(n, {});
    for (const auto& e : edges) {
      auto sub = dag.find(e.sub);
      auto super = dag.find(e.super);
      if (!sub) throw DataError("edge references unknown concept '" + e.sub + "'");
      if (!super) throw DataError("edge references unknown concept '" + e.super + "'");
      if (*sub == *super) throw DataError("cycle: " + e.sub + " -> " + e.sub);
      auto& ps = dag.parents_[*sub];
      if (std::find(ps.begin(), ps.end(), *super) != ps.end()) continue;
      ps.push_back(*super);
      dag.children_[*super].push_back(*sub);
    }
    dag.edge_count_ = 0;
    for (const auto& ps : dag.parents_) dag.edge_count_ += ps.size();
    dag.order_topologically();
    dag.classify();
    dag.compute_stats();
    return dag;
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::optional<ConceptIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  ConceptIndex at(std::string_view id) const {
    auto i = find(id);
    if (!i) throw DataError("unknown concept '" + std::string(id) + "'");
    return *i;
  }

  const ConceptNode& node(ConceptIndex i) const { return nodes_[i]; }
  const std::string& id(ConceptIndex i) const { return nodes_[i].id; }
  std::span<const ConceptIndex> parents(ConceptIndex i) const { return parents_[i]; }
  std::span<const ConceptIndex> children(ConceptIndex i) const { return children_[i]; }

  bool is_root(ConceptIndex i) const { return parents_[i].empty(); }
  bool is_leaf(ConceptIndex i) const { return children_[i].empty(); }
  // Linked to no other concept. Orphans are their own root but are excluded
  // from extraction and similarity.
  bool is_orphan(ConceptIndex i) const { return is_root(i) && is_leaf(i); }

  const std::vector<ConceptIndex>& roots() const { return roots_; }
  const std::vector<ConceptIndex>& orphans() const { return orphans_; }
  std::size_t anonymous_count() const { return anonymous_count_; }

  // Every concept, each one listed after all of its superconcepts.
  const std::vector<ConceptIndex>& topological_order() const { return topo_; }

  // Longest root-to-leaf path, counted in nodes (>= 1 for a non-empty DAG).
  std::size_t max_depth() const { return max_depth_; }

  // Statistics are precomputed at build time. Throws for orphans.
  const PathStats& stats(ConceptIndex i) const {
    if (is_orphan(i)) throw DataError("concept '" + nodes_[i].id + "' is an orphan (no root path)");
    return stats_[i];
  }

 private:
  void order_topologically() {
    const std::size_t n = nodes_.size();
    std::vector<std::size_t> pending(n);
    std::queue<ConceptIndex> ready;
    for (std::size_t i = 0; i < n; ++i) {
      pending[i] = parents_[i].size();
      if (pending[i] == 0) ready.push(static_cast<ConceptIndex>(i));
    }
    topo_.clear();
    topo_.reserve(n);
    while (!ready.empty()) {
      ConceptIndex c = ready.front();
      ready.pop();
      topo_.push_back(c);
      for (ConceptIndex ch : children_[c])
        if (--pending[ch] == 0) ready.push(ch);
    }
    if (topo_.size() != n) throw DataError("cycle: " + describe_cycle(pending));
  }

  // Walks parent links among the unresolved nodes until one repeats.
  std::string describe_cycle(const std::vector<std::size_t>& pending) const {
    ConceptIndex start = 0;
    while (pending[start] == 0) ++start;
    std::vector<int> seen_at(nodes_.size(), -1);
    std::vector<ConceptIndex> walk;
    ConceptIndex c = start;
    while (seen_at[c] < 0) {
      seen_at[c] = static_cast<int>(walk.size());
      walk.push_back(c);
      for (ConceptIndex p : parents_[c]) {
        if (pending[p] != 0) {
          c = p;
          break;
        }
      }
    }
    std::string out;
    for (std::size_t k = static_cast<std::size_t>(seen_at[c]); k < walk.size(); ++k)
      out += nodes_[walk[k]].id + " -> ";
    return out + nodes_[c].id;
  }

  void classify() {
    roots_.clear();
    orphans_.clear();
    anonymous_count_ = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto c = static_cast<ConceptIndex>(i);
      if (is_root(c)) roots_.push_back(c);
      if (is_orphan(c)) orphans_.push_back(c);
      if (nodes_[i].anonymous()) ++anonymous_count_;
    }
  }

  void compute_stats() {
    const std::size_t n = nodes_.size();
    stats_.assign(n, {});
    std::vector<std::size_t> longest_up(n, 0);
    for (ConceptIndex c : topo_) {
      auto& s = stats_[c];
      if (is_root(c)) {
        s.up_lengths = {1};
      } else {
        for (ConceptIndex p : parents_[c]) {
          detail::accumulate_shifted(s.up_lengths, stats_[p].up_lengths);
          longest_up[c] = std::max(longest_up[c], longest_up[p] + 1);
        }
      }
    }
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
      ConceptIndex c = *it;
      auto& s = stats_[c];
      if (is_leaf(c)) {
        s.down_lengths = {1};
      } else {
        for (ConceptIndex ch : children_[c]) detail::accumulate_shifted(s.down_lengths, stats_[ch].down_lengths);
      }
    }
    max_depth_ = n == 0 ? 0 : 1 + *std::max_element(longest_up.begin(), longest_up.end());

    for (std::size_t i = 0; i < n; ++i) {
      auto& s = stats_[i];
      s.root_paths = 0;
      for (auto v : s.up_lengths) s.root_paths = detail::checked_add(s.root_paths, v);
      s.leaf_paths = 0;
      for (auto v : s.down_lengths) s.leaf_paths = detail::checked_add(s.leaf_paths, v);
      if (is_orphan(static_cast<ConceptIndex>(i))) continue;
      double up_sum = 0.0, down_sum = 0.0;
      for (std::size_t L = 0; L < s.up_lengths.size(); ++L) {
        if (s.up_lengths[L] == 0) continue;
        for (std::size_t l = 0; l < s.down_lengths.size(); ++l) {
          if (s.down_lengths[l] == 0) continue;
          const double w = static_cast<double>(s.up_lengths[L]) * static_cast<double>(s.down_lengths[l]);
          const double total = static_cast<double>(L + l);
          up_sum += w * (static_cast<double>(L) / total);
          down_sum += w * (static_cast<double>(l) / total);
        }
      }
      const double pairs = static_cast<double>(s.root_paths) * static_cast<double>(s.leaf_paths);
      s.root_distance = up_sum / pairs;
      s.leaf_distance = down_sum / pairs;
    }
  }

  std::vector<ConceptNode> nodes_;
  std::unordered_map<std::string, ConceptIndex> index_;
  std::vector<std::vector<ConceptIndex>> parents_;
  std::vector<std::vector<ConceptIndex>> children_;
  std::vector<ConceptIndex> topo_;
  std::vector<ConceptIndex> roots_;
  std::vector<ConceptIndex> orphans_;
  std::vector<PathStats> stats_;
  std::size_t anonymous_count_ = 0;
  std::size_t edge_count_ = 0;
  std::size_t max_depth_ = 0;
};

// Taxonomy file format, UTF-8, one record per line, tab separated:
//   N <id> [<headword> [<gloss>]]
//   E <sub_id> <super_id>
// Blank lines and lines starting with '#' are ignored.
inline ConceptDag load_taxonomy(std::istream& in) {
  std::vector<ConceptNode> nodes;
  std::vector<ConceptEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (fields[0] == "N") {
      if (fields.size() < 2 || fields.size() > 4 || fields[1].empty())
        throw DataError("malformed node record" + where);
      ConceptNode node{std::string(fields[1]), {}, {}};
      if (fields.size() > 2) node.headword = std::string(fields[2]);
      if (fields.size() > 3) node.gloss = std::string(fields[3]);
      nodes.push_back(std::move(node));
    } else if (fields[0] == "E") {
      if (fields.size() != 3 || fields[1].empty() || fields[2].empty())
        throw DataError("malformed edge record" + where);
      edges.push_back({std::string(fields[1]), std::string(fields[2])});
    } else {
      throw DataError("unknown record type '" + std::string(fields[0]) + "'" + where);
    }
  }
  return ConceptDag::build(std::move(nodes), edges);
}

inline ConceptDag load_taxonomy(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_taxonomy(in);
}

inline void write_taxonomy(std::ostream& out, const ConceptDag& dag) {
  for (ConceptIndex i = 0; i < dag.size(); ++i) {
    const auto& n = dag.node(i);
    out << "N\t" << n.id;
    if (!n.headword.empty() || !n.gloss.empty()) out << '\t' << n.headword;
    if (!n.gloss.empty()) out << '\t' << n.gloss;
    out << '\n';
  }
  for (ConceptIndex i = 0; i < dag.size(); ++i)
    for (ConceptIndex p : dag.parents(i)) out << "E\t" << dag.id(i) << '\t' << dag.id(p) << '\n';
}

inline std::uint64_t leaf_path_count(const ConceptDag& dag, std::string_view id) {
  ConceptIndex i = dag.at(id);
  if (dag.is_orphan(i)) return 1;
  return dag.stats(i).leaf_paths;
}

inline const PathStats& compute_path_stats(const ConceptDag& dag, std::string_view id) {
  return dag.stats(dag.at(id));
}

struct LeafRecord {
  ConceptIndex leaf;
  std::uint32_t edges;
  friend bool operator==(const LeafRecord&, const LeafRecord&) = default;
};

// One record per distinct downward path to a leaf. Size grows with the number
// of paths, which can be large under heavy multiple inheritance.
using LeafDistanceTable = std::vector<std::vector<LeafRecord>>;

inline LeafDistanceTable build_leaf_distance_table(const ConceptDag& dag) {
  LeafDistanceTable table(dag.size());
  const auto& topo = dag.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    ConceptIndex c = *it;
    auto& rows = table[c];
    if (dag.is_leaf(c)) {
      rows.push_back({c, 0});
      continue;
    }
    for (ConceptIndex ch : dag.children(c))
      for (const auto& r : table[ch]) rows.push_back({r.leaf, r.edges + 1});
  }
  return table;
}

enum class PathMode {
  undirected,       // any mix of hypernym and hyponym links
  common_ancestor,  // up from one concept to a shared ancestor, then down
};

// Nodes on the shortest path between a and b, both endpoints included; 1 when
// a == b. nullopt when no path exists.
inline std::optional<std::size_t> shortest_node_path(const ConceptDag& dag, ConceptIndex a, ConceptIndex b,
                                                     PathMode mode = PathMode::undirected) {
  if (a == b) return 1;
  constexpr auto unseen = std::numeric_limits<std::size_t>::max();
  if (mode == PathMode::undirected) {
    std::vector<std::size_t> dist(dag.size(), unseen);
    std::queue<ConceptIndex> q;
    dist[a] = 0;
    q.push(a);
    while (!q.empty()) {
      ConceptIndex c = q.front();
      q.pop();
      auto visit = [&](ConceptIndex next) {
        if (dist[next] != unseen) return false;
        dist[next] = dist[c] + 1;
        q.push(next);
        return next == b;
      };
      for (ConceptIndex p : dag.parents(c))
        if (visit(p)) return dist[b] + 1;
      for (ConceptIndex ch : dag.children(c))
        if (visit(ch)) return dist[b] + 1;
    }
    return std::nullopt;
  }
  auto up_distances = [&](ConceptIndex from) {
    std::vector<std::size_t> dist(dag.size(), unseen);
    std::queue<ConceptIndex> q;
    dist[from] = 0;
    q.push(from);
    while (!q.empty()) {
      ConceptIndex c = q.front();
      q.pop();
      for (ConceptIndex p : dag.parents(c)) {
        if (dist[p] != unseen) continue;
        dist[p] = dist[c] + 1;
        q.push(p);
      }
    }
    return dist;
  };
  auto da = up_distances(a);
  auto db = up_distances(b);
  std::size_t best = unseen;
  for (std::size_t i = 0; i < dag.size(); ++i)
    if (da[i] != unseen && db[i] != unseen) best = std::min(best, da[i] + db[i]);
  if (best == unseen) return std::nullopt;
  return best + 1;
}

// -ln(nodes / (2 depth)), clamped at zero for paths longer than 2 depth.
inline double lch_from_path(std::size_t nodes, std::size_t depth) {
  const double v = -std::log(static_cast<double>(nodes) / (2.0 * static_cast<double>(depth)));
  return v > 0.0 ? v : 0.0;
}

struct Similarity {
  double value = 0.0;
  bool reachable = false;
};

// Leacock-Chodorow similarity scaled by the hierarchy depth. Unreachable
// pairs score 0 with reachable = false.
inline Similarity lch_similarity(const ConceptDag& dag, ConceptIndex a, ConceptIndex b,
                                 PathMode mode = PathMode::undirected) {
  auto nodes = shortest_node_path(dag, a, b, mode);
  if (!nodes) return {0.0, false};
  return {lch_from_path(*nodes, dag.max_depth()), true};
}

}  // namespace conceptcut
