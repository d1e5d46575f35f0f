#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "aediag/algebra.hpp"
#include "aediag/error.hpp"
#include "aediag/lattice.hpp"

namespace aediag {

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

struct Node {
  std::string id;
  ObjectKind object = ObjectKind::Carrier;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string src;
  std::string dst;
  Arrow arrow;
  Tag tag;
  bool operator==(const Edge&) const = default;
};

/// Edges are identified by their endpoints; there is at most one per pair.
struct EdgeRef {
  std::string src;
  std::string dst;
  auto operator<=>(const EdgeRef&) const = default;
  std::string str() const { return src + "->" + dst; }
};

/// Consecutive edge indices into Diagram::edges().
struct PathRef {
  std::vector<std::size_t> edges;
  auto operator<=>(const PathRef&) const = default;
  std::size_t size() const { return edges.size(); }
};

class Diagram;
inline Diagram build_diagram(UniversePtr universe, AlgebraTheory theory, std::vector<Node> nodes,
                      std::vector<Edge> edges);

/// A validated, acyclic A-E diagram. Nodes are kept sorted by id and edges by
/// (src, dst); every index-based query uses that canonical order.
class Diagram {
 public:
  const UniversePtr& universe() const { return universe_; }
  const AlgebraTheory& theory() const { return theory_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<std::size_t> node_index(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> edge_index(const std::string& src, const std::string& dst) const {
    auto it = edge_index_.find(EdgeRef{src, dst});
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> edge_index(const EdgeRef& ref) const { return edge_index(ref.src, ref.dst); }

  const Edge& edge(const EdgeRef& ref) const {
    auto i = edge_index(ref);
    if (!i) throw Error(ErrorCode::UnknownNode, "no edge " + ref.str());
    return edges_[*i];
  }

  EdgeRef ref(std::size_t edge) const { return {edges_[edge].src, edges_[edge].dst}; }

  std::size_t src_index(std::size_t edge) const { return endpoints_[edge].first; }
  std::size_t dst_index(std::size_t edge) const { return endpoints_[edge].second; }

  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_[node]; }
  const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_[node]; }

  /// Deterministic topological order of node indices.
  const std::vector<std::size_t>& topo_order() const { return topo_; }

  /// True iff there is a directed path (possibly empty) from a to b.
  bool reaches(std::size_t a, std::size_t b) const {
    return (reach_[a][b / 64] >> (b % 64)) & 1U;
  }

  /// Same graph and arrows, new tags (one per canonical edge).
  Diagram with_tags(const std::vector<Tag>& tags) const {
    if (tags.size() != edges_.size()) throw Error(ErrorCode::StructuralMismatch, "tag count mismatch");
    Diagram copy = *this;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (!same_universe(tags[i].universe(), universe_))
        throw Error(ErrorCode::Universe, "tag from a different universe");
      copy.edges_[i].tag = tags[i];
    }
    return copy;
  }

  std::vector<Tag> tags() const {
    std::vector<Tag> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.tag);
    return out;
  }

  bool operator==(const Diagram& other) const {
    return *universe_ == *other.universe_ && theory_ == other.theory_ && nodes_ == other.nodes_ &&
           edges_ == other.edges_;
  }

 private:
  friend Diagram build_diagram(UniversePtr, AlgebraTheory, std::vector<Node>, std::vector<Edge>);

  Diagram(UniversePtr u, AlgebraTheory t) : universe_(std::move(u)), theory_(std::move(t)) {}

  UniversePtr universe_;
  AlgebraTheory theory_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t> node_index_;
  std::map<EdgeRef, std::size_t> edge_index_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> topo_;
  std::vector<std::vector<std::uint64_t>> reach_;
};

inline Diagram build_diagram(UniversePtr universe, AlgebraTheory theory, std::vector<Node> nodes,
                             std::vector<Edge> edges) {
  if (!universe) throw Error(ErrorCode::Universe, "diagram without participant universe");
  Diagram d(std::move(universe), std::move(theory));

  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i && nodes[i].id == nodes[i - 1].id) throw Error(ErrorCode::DuplicateNodeId, "node '" + nodes[i].id + "'");
    if (!d.theory_.has_object(nodes[i].object))
      throw Error(ErrorCode::TypeMismatch,
                  "node '" + nodes[i].id + "' has object " + to_string(nodes[i].object) + " outside the theory");
    d.node_index_[nodes[i].id] = i;
  }

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  d.out_.assign(nodes.size(), {});
  d.in_.assign(nodes.size(), {});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const std::string name = e.src + "->" + e.dst;
    auto s = d.node_index_.find(e.src);
    auto t = d.node_index_.find(e.dst);
    if (s == d.node_index_.end()) throw Error(ErrorCode::UnknownNode, "edge " + name + " references unknown node '" + e.src + "'");
    if (t == d.node_index_.end()) throw Error(ErrorCode::UnknownNode, "edge " + name + " references unknown node '" + e.dst + "'");
    if (e.src == e.dst) throw Error(ErrorCode::SelfLoop, "edge " + name);
    if (i && edges[i - 1].src == e.src && edges[i - 1].dst == e.dst) throw Error(ErrorCode::ParallelEdge, "two edges " + name);
    if (!d.theory_.admits(e.arrow))
      throw Error(ErrorCode::TypeMismatch, "edge " + name + " arrow " + e.arrow.str() + " is not a normalized arrow of the theory");
    if (e.arrow.source() != nodes[s->second].object || e.arrow.target() != nodes[t->second].object)
      throw Error(ErrorCode::TypeMismatch, "edge " + name + " arrow " + e.arrow.str() + " is typed " +
                                               to_string(e.arrow.source()) + "->" + to_string(e.arrow.target()));
    if (!same_universe(e.tag.universe(), d.universe_))
      throw Error(ErrorCode::Universe, "edge " + name + " tag uses another universe");
    d.edge_index_[EdgeRef{e.src, e.dst}] = i;
    d.endpoints_.emplace_back(s->second, t->second);
    d.out_[s->second].push_back(i);
    d.in_[t->second].push_back(i);
  }
  d.nodes_ = std::move(nodes);
  d.edges_ = std::move(edges);

  // Kahn, smallest index first.
  const std::size_t n = d.nodes_.size();
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& [s, t] : d.endpoints_) ++indeg[t];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) ready.push(v);
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    d.topo_.push_back(v);
    for (auto e : d.out_[v])
      if (--indeg[d.endpoints_[e].second] == 0) ready.push(d.endpoints_[e].second);
  }
  if (d.topo_.size() != n) {
    // Walk backwards through unresolved nodes until one repeats.
    std::size_t v = 0;
    while (indeg[v] == 0) ++v;
    std::vector<std::size_t> trail;
    std::vector<int> seen_at(n, -1);
    while (seen_at[v] < 0) {
      seen_at[v] = static_cast<int>(trail.size());
      trail.push_back(v);
      for (auto e : d.in_[v]) {
        auto u = d.endpoints_[e].first;
        if (indeg[u] > 0) {
          v = u;
          break;
        }
      }
    }
    std::vector<std::size_t> cycle(trail.begin() + seen_at[v], trail.end());
    std::reverse(cycle.begin(), cycle.end());
    std::string witness;
    for (auto c : cycle) witness += d.nodes_[c].id + " -> ";
    witness += d.nodes_[cycle.front()].id;
    throw Error(ErrorCode::CycleDetected, witness);
  }

  const std::size_t words = (n + 63) / 64;
  d.reach_.assign(n, std::vector<std::uint64_t>(words, 0));
  for (auto it = d.topo_.rbegin(); it != d.topo_.rend(); ++it) {
    auto v = *it;
    d.reach_[v][v / 64] |= std::uint64_t{1} << (v % 64);
    for (auto e : d.out_[v]) {
      const auto& r = d.reach_[d.endpoints_[e].second];
      for (std::size_t w = 0; w < words; ++w) d.reach_[v][w] |= r[w];
    }
  }
  return d;
}

/// Every directed path from src to dst, lexicographic by edge sequence.
inline std::vector<PathRef> all_paths(const Diagram& d, const std::string& src, const std::string& dst,
                                      std::size_t cap = kDefaultPathCap) {
  auto s = d.node_index(src);
  auto t = d.node_index(dst);
  if (!s) throw Error(ErrorCode::UnknownNode, "'" + src + "'");
  if (!t) throw Error(ErrorCode::UnknownNode, "'" + dst + "'");
  std::vector<PathRef> out;
  if (*s == *t || !d.reaches(*s, *t)) return out;

  PathRef current;
  auto dfs = [&](auto&& self, std::size_t v) -> void {
    for (auto e : d.out_edges(v)) {
      auto w = d.dst_index(e);
      if (!d.reaches(w, *t)) continue;
      current.edges.push_back(e);
      if (w == *t) {
        if (out.size() >= cap)
          throw Error(ErrorCode::PathExplosion, "more than " + std::to_string(cap) + " paths " + src + " -> " + dst);
        out.push_back(current);
      } else {
        self(self, w);
      }
      current.edges.pop_back();
    }
  };
  dfs(dfs, *s);
  return out;
}

/// Paths of length >= 2 sharing the endpoints of an edge.
inline std::vector<PathRef> parallel_paths(const Diagram& d, std::size_t edge, std::size_t cap = kDefaultPathCap) {
  auto paths = all_paths(d, d.edges()[edge].src, d.edges()[edge].dst, cap + 1);
  std::erase_if(paths, [](const PathRef& p) { return p.size() < 2; });
  if (paths.size() > cap)
    throw Error(ErrorCode::PathExplosion, "more than " + std::to_string(cap) + " paths parallel to " + d.ref(edge).str());
  return paths;
}

/// Composite arrow and meet of tags along a path.
inline std::pair<Arrow, Tag> path_label(const Diagram& d, const PathRef& p) {
  if (p.edges.empty()) throw Error(ErrorCode::Composition, "empty path");
  const auto& first = d.edges().at(p.edges.front());
  Arrow arrow = first.arrow;
  Tag tag = first.tag;
  for (std::size_t i = 1; i < p.edges.size(); ++i) {
    const auto& prev = d.edges().at(p.edges[i - 1]);
    const auto& e = d.edges().at(p.edges[i]);
    if (prev.dst != e.src) throw Error(ErrorCode::Composition, "edges are not consecutive");
    arrow = compose(d.theory(), arrow, e.arrow);
    tag = tag_meet(tag, e.tag);
  }
  return {arrow, tag};
}

inline Tag path_meet(const Diagram& d, const PathRef& p) {
  Tag t = Tag::top(d.universe());
  for (auto e : p.edges) t = tag_meet(t, d.edges()[e].tag);
  return t;
}

/// "star -[select(2)]-> g -[pow(3)]-> g^a"
inline std::string path_str(const Diagram& d, const PathRef& p) {
  if (p.edges.empty()) return "";
  std::string s = d.edges()[p.edges.front()].src;
  for (auto e : p.edges) s += " -[" + d.edges()[e].arrow.str() + "]-> " + d.edges()[e].dst;
  return s;
}

struct CommuteViolation {
  std::string src;
  std::string dst;
  PathRef first;
  PathRef second;
};

struct CommuteReport {
  bool ok = true;
  std::vector<CommuteViolation> violations;
};

/// Checks that the algebraic projection commutes: all paths between any two
/// nodes have equal composites. Per source node, each reachable node keeps one
/// representative path; every in-edge is compared against it, which covers
/// every path by induction along the topological order.
inline CommuteReport check_commutes(const Diagram& d) {
  CommuteReport report;
  const auto n = d.nodes().size();
  const auto& theory = d.theory();
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<std::optional<Arrow>> composite(n);
    std::vector<PathRef> rep(n);
    for (auto v : d.topo_order()) {
      if (v == u || !d.reaches(u, v)) continue;
      for (auto e : d.in_edges(v)) {
        auto y = d.src_index(e);
        if (y != u && !composite[y]) continue;
        PathRef candidate = y == u ? PathRef{} : rep[y];
        candidate.edges.push_back(e);
        Arrow arrow = y == u ? d.edges()[e].arrow : compose(theory, *composite[y], d.edges()[e].arrow);
        if (!composite[v]) {
          composite[v] = arrow;
          rep[v] = std::move(candidate);
        } else if (!arrows_equal(theory, *composite[v], arrow)) {
          report.ok = false;
          report.violations.push_back({d.nodes()[u].id, d.nodes()[v].id, rep[v], std::move(candidate)});
        }
      }
    }
  }
  return report;
}

/// Subgraph-and-labels order, with nodes matched by id.
inline bool diagram_leq(const Diagram& lhs, const Diagram& rhs) {
  if (!(*lhs.universe() == *rhs.universe())) throw Error(ErrorCode::Universe, "diagrams use different universes");
  if (!(lhs.theory() == rhs.theory())) throw Error(ErrorCode::Universe, "diagrams use different theories");
  for (const auto& node : lhs.nodes()) {
    auto i = rhs.node_index(node.id);
    if (!i || rhs.nodes()[*i].object != node.object) return false;
  }
  for (const auto& e : lhs.edges()) {
    auto j = rhs.edge_index(e.src, e.dst);
    if (!j) return false;
    const auto& other = rhs.edges()[*j];
    if (!arrows_equal(lhs.theory(), e.arrow, other.arrow)) return false;
    if (!tag_leq(e.tag, Tag(lhs.universe(), other.tag.bits()))) return false;
  }
  return true;
}

}  // namespace aediag
