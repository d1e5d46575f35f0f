#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aediag/diagram.hpp"

namespace aediag {

enum class ViolationKind { Epistemic, Algebraic };

inline const char* to_string(ViolationKind k) { return k == ViolationKind::Epistemic ? "epistemic" : "algebraic"; }

struct IfoViolation {
  std::size_t edge = 0;
  PathRef path;
  Tag path_tag;
  Tag edge_tag;
  ViolationKind kind = ViolationKind::Epistemic;
};

struct IfoReport {
  bool ok = true;
  std::vector<IfoViolation> violations;
  // Per canonical edge: join over parallel paths of the meet along each path.
  std::vector<Tag> explained;
};

/// Information-flow ordering check. Acyclicity is already guaranteed by
/// construction, so only the edge-versus-path inequalities remain: for every
/// edge e and every parallel path p, the composite along p must equal e's
/// arrow and the meet of p's tags must be contained in e's tag.
inline IfoReport check_ifo(const Diagram& d, std::size_t cap = kDefaultPathCap) {
  IfoReport report;
  report.explained.reserve(d.edges().size());
  for (std::size_t i = 0; i < d.edges().size(); ++i) {
    const auto& e = d.edges()[i];
    Tag explained = Tag::bottom(d.universe());
    for (auto& p : parallel_paths(d, i, cap)) {
      auto [arrow, meet] = path_label(d, p);
      explained = tag_join(explained, meet);
      if (!arrows_equal(d.theory(), arrow, e.arrow))
        report.violations.push_back({i, p, meet, e.tag, ViolationKind::Algebraic});
      if (!tag_leq(meet, e.tag)) report.violations.push_back({i, std::move(p), meet, e.tag, ViolationKind::Epistemic});
    }
    report.explained.push_back(explained);
  }
  report.ok = report.violations.empty();
  return report;
}

namespace detail {

// For every edge (u, v): the join over paths u ~> v of length >= 2 of the
// meet of tags along the path. Computed per source by dynamic programming;
// meet distributes over join in a powerset, so no path enumeration is needed.
inline std::vector<std::uint64_t> explained_bits(const Diagram& d, const std::vector<std::uint64_t>& tags) {
  const auto n = d.nodes().size();
  const auto top = d.universe()->full_mask();
  std::vector<std::uint64_t> out(d.edges().size(), 0);
  std::vector<std::uint64_t> best(n);
  std::vector<std::uint64_t> indirect(n);
  std::vector<char> live(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (d.out_edges(u).empty()) continue;
    std::fill(best.begin(), best.end(), 0);
    std::fill(indirect.begin(), indirect.end(), 0);
    std::fill(live.begin(), live.end(), 0);
    best[u] = top;
    live[u] = 1;
    for (auto v : d.topo_order()) {
      if (v == u || !d.reaches(u, v)) continue;
      std::uint64_t all = 0;
      for (auto e : d.in_edges(v)) {
        auto y = d.src_index(e);
        if (!live[y]) continue;
        auto contribution = best[y] & tags[e];
        all |= contribution;
        if (y != u) indirect[v] |= contribution;
      }
      best[v] = all;
      live[v] = 1;
    }
    for (auto e : d.out_edges(u)) out[e] = indirect[d.dst_index(e)];
  }
  return out;
}

inline std::vector<std::uint64_t> tag_bits(const Diagram& d) {
  std::vector<std::uint64_t> bits;
  bits.reserve(d.edges().size());
  for (const auto& e : d.edges()) bits.push_back(e.tag.bits());
  return bits;
}

}  // namespace detail

/// Join of parallel-path meets for every edge, without enumerating paths.
inline std::vector<Tag> explained_tags(const Diagram& d) {
  std::vector<Tag> out;
  for (auto b : detail::explained_bits(d, detail::tag_bits(d))) out.emplace_back(d.universe(), b);
  return out;
}

/// Least IFO diagram above d with the same graph and arrows. Tags only grow:
/// each pass raises every edge to include the join of its parallel-path
/// meets, until nothing changes. Requires the algebraic projection to commute.
inline Diagram complete_ifo(const Diagram& d) {
  auto commute = check_commutes(d);
  if (!commute.ok) {
    const auto& v = commute.violations.front();
    throw Error(ErrorCode::NoIfoAbove, "composites differ between " + v.src + " and " + v.dst + ": " +
                                           path_str(d, v.first) + " vs " + path_str(d, v.second));
  }
  auto bits = detail::tag_bits(d);
  for (;;) {
    auto explained = detail::explained_bits(d, bits);
    bool changed = false;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      auto grown = bits[i] | explained[i];
      if (grown != bits[i]) {
        bits[i] = grown;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<Tag> tags;
  for (auto b : bits) tags.emplace_back(d.universe(), b);
  return d.with_tags(tags);
}

/// Deadlock-freeness: the relation "f lies on a path parallel to e whose meet
/// is strictly below e's tag, and f, e carry distinct labels" has no cycle.
inline bool strict_cycle_check(const Diagram& d, std::size_t cap = kDefaultPathCap) {
  const auto m = d.edges().size();
  std::vector<std::vector<std::size_t>> below(m);
  auto distinct = [&](const Edge& a, const Edge& b) {
    if (!(a.tag == b.tag)) return true;
    if (a.arrow.source() != b.arrow.source() || a.arrow.target() != b.arrow.target()) return true;
    return !arrows_equal(d.theory(), a.arrow, b.arrow);
  };
  for (std::size_t e = 0; e < m; ++e) {
    const auto& edge = d.edges()[e];
    for (const auto& p : parallel_paths(d, e, cap)) {
      auto meet = path_meet(d, p);
      if (!(tag_leq(meet, edge.tag) && !(meet == edge.tag))) continue;
      for (auto f : p.edges)
        if (distinct(d.edges()[f], edge)) below[f].push_back(e);
    }
  }
  std::vector<std::size_t> indeg(m, 0);
  for (const auto& succ : below)
    for (auto e : succ) ++indeg[e];
  std::vector<std::size_t> ready;
  for (std::size_t e = 0; e < m; ++e)
    if (!indeg[e]) ready.push_back(e);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto f = ready.back();
    ready.pop_back();
    ++seen;
    for (auto e : below[f])
      if (--indeg[e] == 0) ready.push_back(e);
  }
  return seen == m;
}

}  // namespace aediag
