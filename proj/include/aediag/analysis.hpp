#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aediag/diagram.hpp"
#include "aediag/ifo.hpp"

namespace aediag {

// ---------------------------------------------------------------------------
// Views

/// Keeps exactly the edges whose tag contains every member of `who`.
inline Diagram restrict_view(const Diagram& d, const Tag& who) {
  if (who.empty()) throw Error(ErrorCode::BadParams, "view needs at least one participant");
  std::vector<Edge> kept;
  for (const auto& e : d.edges())
    if (tag_leq(who, e.tag)) kept.push_back(e);
  return build_diagram(d.universe(), d.theory(), d.nodes(), std::move(kept));
}

// ---------------------------------------------------------------------------
// Diffs and leaks

enum class DiffCause { Change, Substitution, Consequence };

inline const char* to_string(DiffCause c) {
  switch (c) {
    case DiffCause::Change: return "change";
    case DiffCause::Substitution: return "substitution";
    case DiffCause::Consequence: return "consequence";
  }
  return "?";
}

struct DiffEntry {
  EdgeRef edge;
  Tag old_tag;
  Tag new_tag;
  DiffCause cause = DiffCause::Change;
};

struct DiagramDiff {
  std::vector<DiffEntry> entries;
  bool empty() const { return entries.empty(); }
  std::size_t count(DiffCause c) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [c](const DiffEntry& e) { return e.cause == c; }));
  }
};

/// Tag differences between two diagrams over the same graph and arrows.
inline DiagramDiff diff_diagrams(const Diagram& before, const Diagram& after, DiffCause cause = DiffCause::Change) {
  std::vector<std::string> problems;
  if (!(*before.universe() == *after.universe())) problems.push_back("participant universes differ");
  if (!(before.theory() == after.theory())) problems.push_back("algebraic theories differ");
  if (before.nodes() != after.nodes()) problems.push_back("node sets differ");
  for (const auto& e : before.edges()) {
    auto j = after.edge_index(e.src, e.dst);
    if (!j) {
      problems.push_back("edge " + e.src + "->" + e.dst + " missing on the right");
      continue;
    }
    if (!(e.arrow == after.edges()[*j].arrow)) problems.push_back("arrow of " + e.src + "->" + e.dst + " differs");
  }
  for (const auto& e : after.edges())
    if (!before.edge_index(e.src, e.dst)) problems.push_back("edge " + e.src + "->" + e.dst + " missing on the left");
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::StructuralMismatch, msg);
  }
  DiagramDiff diff;
  for (std::size_t i = 0; i < before.edges().size(); ++i) {
    const auto& e = before.edges()[i];
    const auto& other = after.edges()[i];
    if (e.tag.bits() != other.tag.bits())
      diff.entries.push_back({{e.src, e.dst}, e.tag, Tag(before.universe(), other.tag.bits()), cause});
  }
  return diff;
}

/// Unions `add` into every edge matching all of the given constraints.
/// `member` constrains the current tag to contain that participant, which is
/// how a key owner's exponentiations are told apart from equal-valued ones.
struct LeakRule {
  std::optional<Arrow> arrow;
  std::optional<Tag> exact_tag;
  std::optional<std::size_t> member;
  Tag add;

  bool matches(const Diagram& d, const Edge& e) const {
    if (arrow) {
      if (arrow->source() != e.arrow.source() || arrow->target() != e.arrow.target()) return false;
      if (!arrows_equal(d.theory(), *arrow, e.arrow)) return false;
    }
    if (exact_tag && exact_tag->bits() != e.tag.bits()) return false;
    if (member && !e.tag.contains(*member)) return false;
    return true;
  }
};

struct LeakResult {
  Diagram substituted;  // rule tags applied, before completion
  Diagram completed;
  DiagramDiff diff;  // substitution entries, then consequence entries
};

inline Diagram substitute(const Diagram& d, const std::vector<LeakRule>& rules) {
  auto tags = d.tags();
  for (std::size_t i = 0; i < d.edges().size(); ++i)
    for (const auto& rule : rules)
      if (rule.matches(d, d.edges()[i])) tags[i] = tag_join(tags[i], rule.add);
  return d.with_tags(tags);
}

inline LeakResult apply_leak(const Diagram& d, const std::vector<LeakRule>& rules) {
  auto substituted = substitute(d, rules);
  auto completed = complete_ifo(substituted);
  DiagramDiff diff = diff_diagrams(d, substituted, DiffCause::Substitution);
  for (auto& e : diff_diagrams(substituted, completed, DiffCause::Consequence).entries)
    diff.entries.push_back(std::move(e));
  return {std::move(substituted), std::move(completed), std::move(diff)};
}

// ---------------------------------------------------------------------------
// Announcements and computations

enum class EventClass { Primitive, Computation, Announcement };

inline const char* to_string(EventClass c) {
  switch (c) {
    case EventClass::Primitive: return "primitive";
    case EventClass::Computation: return "computation";
    case EventClass::Announcement: return "announcement";
  }
  return "?";
}

struct Route {
  PathRef path;
  Tag meet;
};

struct EdgeEvent {
  std::size_t edge = 0;
  EventClass kind = EventClass::Primitive;
  Tag explained;
  Tag newly_informed;   // tag minus explained; empty unless an announcement
  std::vector<Route> routes;  // parallel paths with a non-empty meet
};

struct EventReport {
  std::vector<EdgeEvent> events;
  std::size_t count(EventClass c) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [c](const EdgeEvent& e) { return e.kind == c; }));
  }
};

inline EventReport classify_events(const Diagram& d, std::size_t cap = kDefaultPathCap) {
  if (auto report = check_ifo(d, cap); !report.ok)
    throw Error(ErrorCode::NotIfo, std::to_string(report.violations.size()) + " IFO violation(s)");
  EventReport out;
  for (std::size_t i = 0; i < d.edges().size(); ++i) {
    const auto& tag = d.edges()[i].tag;
    EdgeEvent ev{i, EventClass::Primitive, Tag::bottom(d.universe()), Tag::bottom(d.universe()), {}};
    auto paths = parallel_paths(d, i, cap);
    if (!paths.empty()) {
      for (auto& p : paths) {
        auto meet = path_meet(d, p);
        ev.explained = tag_join(ev.explained, meet);
        if (!meet.empty()) ev.routes.push_back({std::move(p), meet});
      }
      if (ev.explained == tag) {
        ev.kind = EventClass::Computation;
      } else {
        ev.kind = EventClass::Announcement;
        ev.newly_informed = tag_minus(tag, ev.explained);
      }
    }
    out.events.push_back(std::move(ev));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Triangulations

/// Tag given to chords inserted while triangulating. Audience: the target
/// edge's tag. Minimal: meet of the two sides of the triangle the chord tops.
enum class ChordPolicy { Audience, Minimal };

struct Triangle {
  EdgeRef side1;  // first leg along the path
  EdgeRef side2;
  EdgeRef apex;
};

struct Announcement {
  EdgeRef edge;
  Arrow value;
  Tag announcers;  // meet of the two sides
  Tag audience;    // tag of the apex
};

struct Scenario {
  Diagram triangulation;
  std::vector<EdgeRef> inserted;  // chords not present in the input
  std::vector<Triangle> triangles;
  std::vector<Announcement> announcements;
};

namespace detail {

using Tri = std::array<std::size_t, 3>;

// All triangulations of the polygon on vertices lo..hi (positions along the
// boundary path), with lo--hi as the closing side.
inline std::vector<std::vector<Tri>> triangulations(std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return {{}};
  std::vector<std::vector<Tri>> out;
  for (std::size_t mid = lo + 1; mid < hi; ++mid) {
    auto left = triangulations(lo, mid);
    auto right = triangulations(mid, hi);
    for (const auto& l : left)
      for (const auto& r : right) {
        std::vector<Tri> t = l;
        t.insert(t.end(), r.begin(), r.end());
        t.push_back({lo, mid, hi});
        out.push_back(std::move(t));
      }
  }
  return out;
}

inline std::vector<std::size_t> path_vertices(const Diagram& d, const PathRef& p) {
  std::vector<std::size_t> v{d.src_index(p.edges.front())};
  for (auto e : p.edges) v.push_back(d.dst_index(e));
  return v;
}

}  // namespace detail

/// Scenarios explaining a target edge by triangulating the polygon formed by
/// the edge and its maximal parallel path. Chords already in the diagram are
/// kept; each scenario lists one announcement per triangle.
inline std::vector<Scenario> enumerate_triangulations(const Diagram& d, const EdgeRef& target,
                                                      ChordPolicy policy = ChordPolicy::Audience,
                                                      std::size_t cap = kDefaultPathCap) {
  auto target_index = d.edge_index(target);
  if (!target_index) throw Error(ErrorCode::BadTarget, "no edge " + target.str());
  if (auto report = check_ifo(d, cap); !report.ok)
    throw Error(ErrorCode::NotIfo, std::to_string(report.violations.size()) + " IFO violation(s)");

  auto paths = parallel_paths(d, *target_index, cap);
  if (paths.empty()) throw Error(ErrorCode::BadTarget, "edge " + target.str() + " has no parallel path");

  // Maximal by vertex-set inclusion. In a DAG a vertex set determines the path.
  std::vector<std::vector<std::size_t>> vsets;
  for (const auto& p : paths) {
    auto v = detail::path_vertices(d, p);
    std::sort(v.begin(), v.end());
    vsets.push_back(std::move(v));
  }
  std::vector<std::size_t> maximal;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < paths.size() && !dominated; ++j)
      dominated = j != i && vsets[j].size() > vsets[i].size() &&
                  std::includes(vsets[j].begin(), vsets[j].end(), vsets[i].begin(), vsets[i].end());
    if (!dominated) maximal.push_back(i);
  }
  if (maximal.size() > 1) {
    std::string msg = "edge " + target.str() + " has " + std::to_string(maximal.size()) + " maximal parallel paths:";
    for (auto i : maximal) msg += " [" + path_str(d, paths[i]) + "]";
    throw Error(ErrorCode::AmbiguousPolygon, msg);
  }
  const auto& boundary = paths[maximal.front()];
  const auto verts = detail::path_vertices(d, boundary);
  const std::size_t n = boundary.size();
  const auto& target_edge = d.edges()[*target_index];

  auto id = [&](std::size_t pos) { return d.nodes()[verts[pos]].id; };
  auto chord_ref = [&](std::size_t i, std::size_t j) { return EdgeRef{id(i), id(j)}; };

  std::set<std::pair<std::size_t, std::size_t>> required;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j <= n; ++j)
      if (!(i == 0 && j == n) && d.edge_index(id(i), id(j))) required.insert({i, j});

  std::vector<Scenario> out;
  for (auto tris : detail::triangulations(0, n)) {
    std::set<std::pair<std::size_t, std::size_t>> chords;
    for (const auto& t : tris) {
      if (t[1] - t[0] >= 2) chords.insert({t[0], t[1]});
      if (t[2] - t[1] >= 2) chords.insert({t[1], t[2]});
    }
    if (!std::includes(chords.begin(), chords.end(), required.begin(), required.end())) continue;

    // Triangles are produced children-first, so both legs of a triangle
    // already have labels when its apex needs one.
    std::vector<Edge> edges = d.edges();
    std::map<std::pair<std::size_t, std::size_t>, std::pair<Arrow, Tag>> label;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = d.edges()[boundary.edges[i]];
      label.emplace(std::make_pair(i, i + 1), std::make_pair(e.arrow, e.tag));
    }
    std::vector<EdgeRef> inserted;
    for (const auto& t : tris) {
      auto key = std::make_pair(t[0], t[2]);
      if (label.count(key)) continue;
      const auto& lower = label.at({t[0], t[1]});
      const auto& upper = label.at({t[1], t[2]});
      Arrow arrow = compose(d.theory(), lower.first, upper.first);
      std::optional<std::size_t> existing = d.edge_index(id(t[0]), id(t[2]));
      Tag tag = existing ? d.edges()[*existing].tag
                         : (policy == ChordPolicy::Audience ? target_edge.tag : tag_meet(lower.second, upper.second));
      if (!existing) {
        edges.push_back({id(t[0]), id(t[2]), arrow, tag});
        inserted.push_back(chord_ref(t[0], t[2]));
      }
      label.emplace(key, std::make_pair(existing ? d.edges()[*existing].arrow : arrow, tag));
    }

    auto tri_diagram = build_diagram(d.universe(), d.theory(), d.nodes(), std::move(edges));
    if (!check_ifo(tri_diagram, cap).ok) tri_diagram = complete_ifo(tri_diagram);

    Scenario sc{tri_diagram, std::move(inserted), {}, {}};
    for (const auto& t : tris) {
      Triangle tri{chord_ref(t[0], t[1]), chord_ref(t[1], t[2]), chord_ref(t[0], t[2])};
      const auto& s1 = tri_diagram.edge(tri.side1);
      const auto& s2 = tri_diagram.edge(tri.side2);
      const auto& apex = tri_diagram.edge(tri.apex);
      sc.announcements.push_back({tri.apex, apex.arrow, tag_meet(s1.tag, s2.tag), apex.tag});
      sc.triangles.push_back(std::move(tri));
    }
    out.push_back(std::move(sc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Event orderings

inline constexpr std::uint64_t kDefaultOrderingBound = 10'000'000;

struct OrderingResult {
  std::vector<EdgeRef> events;                    // canonical order
  std::vector<std::vector<std::size_t>> depends;  // indices into events
  std::uint64_t count = 0;
  std::vector<std::vector<std::size_t>> orderings;  // lexicographic, up to the limit
};

/// Linear extensions of the precedence order on value events (edges out of
/// the unit object). An event follows every event on any of its parallel
/// paths.
inline OrderingResult enumerate_orderings(const Diagram& d, std::size_t limit,
                                          std::uint64_t bound = kDefaultOrderingBound,
                                          std::size_t cap = kDefaultPathCap) {
  if (auto report = check_ifo(d, cap); !report.ok)
    throw Error(ErrorCode::NotIfo, std::to_string(report.violations.size()) + " IFO violation(s)");
  OrderingResult out;
  std::vector<std::size_t> edge_to_event(d.edges().size(), SIZE_MAX);
  std::vector<std::size_t> event_edges;
  for (std::size_t i = 0; i < d.edges().size(); ++i)
    if (d.nodes()[d.src_index(i)].object == ObjectKind::Unit) {
      edge_to_event[i] = event_edges.size();
      event_edges.push_back(i);
      out.events.push_back(d.ref(i));
    }
  const std::size_t k = event_edges.size();
  if (k > 64) throw Error(ErrorCode::CountExplosion, std::to_string(k) + " events exceed the 64-event limit");

  std::vector<std::uint64_t> pred(k, 0);
  out.depends.assign(k, {});
  for (std::size_t ev = 0; ev < k; ++ev) {
    for (const auto& p : parallel_paths(d, event_edges[ev], cap))
      for (auto e : p.edges)
        if (edge_to_event[e] != SIZE_MAX) pred[ev] |= std::uint64_t{1} << edge_to_event[e];
    for (std::size_t j = 0; j < k; ++j)
      if ((pred[ev] >> j) & 1U) out.depends[ev].push_back(j);
  }

  const std::uint64_t full = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  constexpr std::size_t kMemoLimit = std::size_t{1} << 22;
  std::unordered_map<std::uint64_t, std::uint64_t> memo;
  auto count = [&](auto&& self, std::uint64_t placed) -> std::uint64_t {
    if (placed == full) return 1;
    if (auto it = memo.find(placed); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    for (std::size_t ev = 0; ev < k; ++ev) {
      auto bit = std::uint64_t{1} << ev;
      if ((placed & bit) || (pred[ev] & ~placed)) continue;
      total += self(self, placed | bit);
      if (total > bound) throw Error(ErrorCode::CountExplosion, "more than " + std::to_string(bound) + " orderings");
    }
    if (memo.size() >= kMemoLimit) throw Error(ErrorCode::CountExplosion, "ordering state space too large");
    memo.emplace(placed, total);
    return total;
  };
  out.count = count(count, 0);

  std::vector<std::size_t> prefix;
  auto list = [&](auto&& self, std::uint64_t placed) -> void {
    if (out.orderings.size() >= limit) return;
    if (placed == full) {
      out.orderings.push_back(prefix);
      return;
    }
    for (std::size_t ev = 0; ev < k && out.orderings.size() < limit; ++ev) {
      auto bit = std::uint64_t{1} << ev;
      if ((placed & bit) || (pred[ev] & ~placed)) continue;
      prefix.push_back(ev);
      self(self, placed | bit);
      prefix.pop_back();
    }
  };
  list(list, 0);
  return out;
}

}  // namespace aediag
