#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aediag/analysis.hpp"
#include "aediag/diagram.hpp"
#include "aediag/ifo.hpp"

namespace aediag::io {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

/// A diagram plus free-form metadata (generator provenance, conventions,
/// leak history). Metadata is null when absent.
struct Document {
  Diagram diagram;
  json metadata;
};

namespace detail {

[[noreturn]] inline void schema(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Schema, where + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) schema(where + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::uint64_t uint_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_unsigned()) schema(where + "." + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

inline Matrix matrix_from_json(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim) schema(where, "expected " + std::to_string(dim) + " rows");
  Matrix m{dim, {}};
  for (std::size_t r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != dim) schema(where, "row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
    for (const auto& x : row) {
      if (!x.is_number_unsigned()) schema(where, "matrix entries must be non-negative integers");
      m.entries.push_back(x.get<std::uint64_t>());
    }
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tags, arrows, theories

inline json tag_to_json(const Tag& t) { return json(t.members()); }

inline Tag tag_from_json(const UniversePtr& u, const json& j, const std::string& where) {
  if (!j.is_array()) detail::schema(where, "a tag is an array of participant names");
  std::uint64_t bits = 0;
  for (const auto& m : j) {
    if (!m.is_string()) detail::schema(where, "participant names are strings");
    int i = u->index_of(m.get<std::string>());
    if (i < 0) detail::schema(where, "undeclared participant '" + m.get<std::string>() + "'");
    bits |= std::uint64_t{1} << i;
  }
  return Tag(u, bits);
}

inline json arrow_to_json(const Arrow& a) {
  if (a.is_select()) return {{"op", "select"}, {"value", a.select().value}};
  if (a.is_pow()) return {{"op", "pow"}, {"exp", a.pow().exp}};
  if (!a.elem().name.empty()) return {{"op", "elem"}, {"name", a.elem().name}};
  return {{"op", "elem"}, {"matrix", detail::matrix_to_json(a.elem().matrix)}};
}

inline Arrow arrow_from_json(const AlgebraTheory& theory, const json& j, const std::string& where) {
  auto op = detail::string_field(j, "op", where);
  try {
    if (op == "select" || op == "pow") {
      if (!theory.is_modexp()) detail::schema(where, "'" + op + "' arrows need a modexp algebra");
      if (op == "select") return theory.modexp().select(detail::uint_field(j, "value", where));
      return theory.modexp().pow(detail::uint_field(j, "exp", where));
    }
    if (op == "elem") {
      if (!theory.is_monoid()) detail::schema(where, "'elem' arrows need a matrix_monoid algebra");
      const auto& m = theory.monoid();
      if (j.contains("name")) {
        auto name = detail::string_field(j, "name", where);
        if (!m.elements().count(name)) detail::schema(where, "undeclared monoid element '" + name + "'");
        return m.elem(name);
      }
      return m.elem(detail::matrix_from_json(detail::field(j, "matrix", where), m.dim(), where + ".matrix"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    detail::schema(where, e.what());
  }
  detail::schema(where, "unknown arrow op '" + op + "'");
}

inline json theory_to_json(const AlgebraTheory& theory) {
  if (theory.is_modexp()) return {{"kind", "modexp"}, {"p", theory.modexp().p()}};
  const auto& m = theory.monoid();
  json elements = json::object();
  for (const auto& [name, mat] : m.elements()) elements[name] = detail::matrix_to_json(mat);
  json out = {{"kind", "matrix_monoid"}, {"modulus", m.modulus()}, {"dim", m.dim()}, {"elements", elements}};
  if (!m.pools().empty()) out["pools"] = m.pools();
  return out;
}

inline AlgebraTheory theory_from_json(const json& j, const std::string& where = "algebra") {
  auto kind = detail::string_field(j, "kind", where);
  try {
    if (kind == "modexp") return ModExpTheory(detail::uint_field(j, "p", where));
    if (kind == "matrix_monoid") {
      auto modulus = detail::uint_field(j, "modulus", where);
      auto dim = detail::uint_field(j, "dim", where);
      if (dim == 0 || dim > 64) detail::schema(where + ".dim", "dimension must be in 1..64");
      std::map<std::string, Matrix> elements;
      if (j.contains("elements")) {
        const auto& el = j.at("elements");
        if (!el.is_object()) detail::schema(where + ".elements", "expected an object");
        for (const auto& [name, mat] : el.items())
          elements[name] = detail::matrix_from_json(mat, dim, where + ".elements." + name);
      }
      std::map<std::string, std::vector<std::string>> pools;
      if (j.contains("pools")) {
        const auto& pl = j.at("pools");
        if (!pl.is_object()) detail::schema(where + ".pools", "expected an object");
        for (const auto& [name, list] : pl.items()) {
          if (!list.is_array()) detail::schema(where + ".pools." + name, "expected an array of names");
          for (const auto& n : list) {
            if (!n.is_string()) detail::schema(where + ".pools." + name, "expected an array of names");
            pools[name].push_back(n.get<std::string>());
          }
        }
      }
      return MatrixMonoidTheory(modulus, dim, std::move(elements), std::move(pools));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    detail::schema(where, e.what());
  }
  detail::schema(where + ".kind", "unknown algebra kind '" + kind + "'");
}

inline json edge_ref_to_json(const EdgeRef& r) { return {{"src", r.src}, {"dst", r.dst}}; }

inline json path_to_json(const Diagram& d, const PathRef& p) {
  json out = json::array();
  for (auto e : p.edges) out.push_back(edge_ref_to_json(d.ref(e)));
  return out;
}

// ---------------------------------------------------------------------------
// Diagrams

inline json diagram_to_json(const Diagram& d, const json& metadata = nullptr) {
  json nodes = json::array();
  for (const auto& n : d.nodes()) nodes.push_back({{"id", n.id}, {"object", to_string(n.object)}});
  json edges = json::array();
  for (const auto& e : d.edges())
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"arrow", arrow_to_json(e.arrow)}, {"tag", tag_to_json(e.tag)}});
  json out = {{"version", kFormatVersion},
              {"algebra", theory_to_json(d.theory())},
              {"participants", d.universe()->names()},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)}};
  if (!metadata.is_null()) out["metadata"] = metadata;
  return out;
}

/// Canonical text: sorted keys, canonical node/edge order, two-space indent,
/// trailing newline.
inline std::string serialize_diagram(const Diagram& d, const json& metadata = nullptr) {
  return diagram_to_json(d, metadata).dump(2) + "\n";
}

inline Document document_from_json(const json& j) {
  if (!j.is_object()) detail::schema("$", "expected an object");
  if (j.contains("version")) {
    if (!j.at("version").is_string() || j.at("version").get<std::string>() != kFormatVersion)
      detail::schema("version", "unsupported format version");
  }
  auto theory = theory_from_json(detail::field(j, "algebra", "$"));

  const auto& parts = detail::field(j, "participants", "$");
  if (!parts.is_array()) detail::schema("participants", "expected an array");
  std::vector<std::string> names;
  for (const auto& p : parts) {
    if (!p.is_string()) detail::schema("participants", "participant names are strings");
    names.push_back(p.get<std::string>());
  }
  UniversePtr universe;
  try {
    universe = make_universe(std::move(names));
  } catch (const Error& e) {
    detail::schema("participants", e.what());
  }

  const auto& jn = detail::field(j, "nodes", "$");
  if (!jn.is_array()) detail::schema("nodes", "expected an array");
  std::vector<Node> nodes;
  std::map<std::string, ObjectKind> objects;
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const auto where = "nodes[" + std::to_string(i) + "]";
    auto id = detail::string_field(jn[i], "id", where);
    auto obj = object_kind_from_string(detail::string_field(jn[i], "object", where));
    if (!obj) detail::schema(where + ".object", "expected unit, carrier or dot");
    if (!objects.emplace(id, *obj).second) throw Error(ErrorCode::DuplicateNodeId, where + ": node '" + id + "'");
    nodes.push_back({id, *obj});
  }

  const auto& je = detail::field(j, "edges", "$");
  if (!je.is_array()) detail::schema("edges", "expected an array");
  std::vector<Edge> edges;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto where = "edges[" + std::to_string(i) + "]";
    auto src = detail::string_field(je[i], "src", where);
    auto dst = detail::string_field(je[i], "dst", where);
    if (!objects.count(src)) detail::schema(where + ".src", "unknown node id '" + src + "'");
    if (!objects.count(dst)) detail::schema(where + ".dst", "unknown node id '" + dst + "'");
    if (src == dst) throw Error(ErrorCode::SelfLoop, where + ": " + src + "->" + dst);
    if (auto [it, fresh] = seen.emplace(std::make_pair(src, dst), i); !fresh)
      throw Error(ErrorCode::ParallelEdge,
                  where + " repeats edges[" + std::to_string(it->second) + "]: " + src + "->" + dst);
    auto arrow = arrow_from_json(theory, detail::field(je[i], "arrow", where), where + ".arrow");
    if (arrow.source() != objects[src] || arrow.target() != objects[dst])
      throw Error(ErrorCode::TypeMismatch, where + ": arrow " + arrow.str() + " does not fit " + src + "->" + dst);
    auto tag = tag_from_json(universe, detail::field(je[i], "tag", where), where + ".tag");
    edges.push_back({src, dst, std::move(arrow), std::move(tag)});
  }
  Document doc{build_diagram(universe, std::move(theory), std::move(nodes), std::move(edges)), nullptr};
  if (j.contains("metadata")) doc.metadata = j.at("metadata");
  return doc;
}

inline Document parse_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::Syntax, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return document_from_json(j);
}

inline Diagram parse_diagram(std::string_view text) { return parse_document(text).diagram; }

// ---------------------------------------------------------------------------
// Reports

inline json ifo_report_to_json(const Diagram& d, const IfoReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"edge", edge_ref_to_json(d.ref(v.edge))},
                          {"path", path_to_json(d, v.path)},
                          {"path_tag", tag_to_json(v.path_tag)},
                          {"edge_tag", tag_to_json(v.edge_tag)},
                          {"kind", to_string(v.kind)}});
  return {{"ok", r.ok}, {"violations", std::move(violations)}};
}

inline json commute_report_to_json(const Diagram& d, const CommuteReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"src", v.src},
                          {"dst", v.dst},
                          {"first", path_to_json(d, v.first)},
                          {"second", path_to_json(d, v.second)}});
  return {{"ok", r.ok}, {"violations", std::move(violations)}};
}

inline json events_to_json(const Diagram& d, const EventReport& r) {
  json out = json::array();
  for (const auto& ev : r.events) {
    json routes = json::array();
    for (const auto& route : ev.routes)
      routes.push_back({{"path", path_to_json(d, route.path)}, {"meet", tag_to_json(route.meet)}});
    out.push_back({{"edge", edge_ref_to_json(d.ref(ev.edge))},
                   {"class", to_string(ev.kind)},
                   {"explained", tag_to_json(ev.explained)},
                   {"newly_informed", tag_to_json(ev.newly_informed)},
                   {"routes", std::move(routes)}});
  }
  return out;
}

inline json diff_to_json(const DiagramDiff& diff) {
  json out = json::array();
  for (const auto& e : diff.entries)
    out.push_back({{"edge", edge_ref_to_json(e.edge)},
                   {"old", tag_to_json(e.old_tag)},
                   {"new", tag_to_json(e.new_tag)},
                   {"cause", to_string(e.cause)}});
  return out;
}

inline json announcements_to_json(const Scenario& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.announcements.size(); ++i) {
    const auto& a = s.announcements[i];
    const auto& t = s.triangles[i];
    out.push_back({{"edge", edge_ref_to_json(a.edge)},
                   {"value", arrow_to_json(a.value)},
                   {"sides", json::array({edge_ref_to_json(t.side1), edge_ref_to_json(t.side2)})},
                   {"announcers", tag_to_json(a.announcers)},
                   {"audience", tag_to_json(a.audience)}});
  }
  return out;
}

/// A scenario as a standalone diagram document; the triangle list and its
/// announcements ride along in the metadata.
inline json scenario_to_json(const Scenario& s, std::size_t index) {
  json inserted = json::array();
  for (const auto& r : s.inserted) inserted.push_back(edge_ref_to_json(r));
  json meta = {{"scenario", {{"index", index}, {"inserted", inserted}, {"announcements", announcements_to_json(s)}}}};
  return diagram_to_json(s.triangulation, meta);
}

inline json orderings_to_json(const OrderingResult& r) {
  json events = json::array();
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    json deps = json::array();
    for (auto j : r.depends[i]) deps.push_back(edge_ref_to_json(r.events[j]));
    events.push_back({{"edge", edge_ref_to_json(r.events[i])}, {"after", deps}});
  }
  json orderings = json::array();
  for (const auto& o : r.orderings) {
    json seq = json::array();
    for (auto i : o) seq.push_back(r.events[i].dst);
    orderings.push_back(std::move(seq));
  }
  return {{"count", r.count}, {"events", events}, {"orderings", orderings}};
}

// ---------------------------------------------------------------------------
// DOT

namespace detail {
inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_quote(std::string_view s) { return "\"" + dot_escape(s) + "\""; }

}  // namespace detail

using DotAnnotations = std::variant<std::monostate, IfoReport, EventReport>;

/// Graphviz rendering: one node per diagram node, edges labelled
/// "arrow, {tag}". IFO violations are drawn red; announcements are drawn
/// blue and dashed with their newly informed participants.
inline std::string export_dot(const Diagram& d, const DotAnnotations& annotations = std::monostate{}) {
  std::set<std::size_t> violating;
  std::map<std::size_t, const EdgeEvent*> events;
  if (const auto* r = std::get_if<IfoReport>(&annotations))
    for (const auto& v : r->violations) violating.insert(v.edge);
  if (const auto* r = std::get_if<EventReport>(&annotations))
    for (const auto& ev : r->events) events[ev.edge] = &ev;

  std::ostringstream os;
  os << "digraph aediag {\n";
  os << "  rankdir=LR;\n";
  for (const auto& n : d.nodes()) {
    os << "  " << detail::dot_quote(n.id) << " [label=\"" << detail::dot_escape(n.id) << "\\n" << to_string(n.object) << "\"";
    if (n.object == ObjectKind::Unit) os << ", shape=point, xlabel=" << detail::dot_quote(n.id);
    os << "];\n";
  }
  for (std::size_t i = 0; i < d.edges().size(); ++i) {
    const auto& e = d.edges()[i];
    std::string label = detail::dot_escape(e.arrow.str() + ", " + e.tag.str());
    std::string style;
    if (violating.count(i)) style = ", color=red, fontcolor=red, penwidth=2";
    if (auto it = events.find(i); it != events.end() && it->second->kind == EventClass::Announcement) {
      label += "\\nannounced to " + it->second->newly_informed.str();
      style += ", color=blue, style=dashed";
    }
    os << "  " << detail::dot_quote(e.src) << " -> " << detail::dot_quote(e.dst) << " [label=\"" << label << "\""
       << style << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace aediag::io
