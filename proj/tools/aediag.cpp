#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "aediag.hpp"

namespace {

using namespace aediag;
using io::json;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Options {
  std::string input = "-";
  std::string second;
  std::string output;
  std::string format = "text";

  std::string kind;
  std::uint64_t p = 101;
  std::uint64_t g = 2;
  std::string keys;
  std::string eve = "E";
  std::size_t n = 0;
  std::size_t k = 0;
  std::string preset = "cake-matrix-demo";

  std::string who;
  std::vector<std::string> rules;
  std::string rules_file;
  std::string edge;
  std::string policy = "audience";
  std::string out_dir;
  std::size_t limit = 100;
  std::string annotate = "none";
};

bool json_mode(const Options& o) { return o.format == "json"; }

bool color_enabled() { return std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

std::string paint(const std::string& s, const char* code) {
  if (!color_enabled()) return s;
  return std::string("\033[") + code + "m" + s + "\033[0m";
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadParams, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const Options& o, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadParams, "cannot write '" + o.output + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string strip_braces(std::string s) {
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  return s;
}

Tag parse_tag(const UniversePtr& u, const std::string& text) {
  std::uint64_t bits = 0;
  for (const auto& name : split(strip_braces(text), ',')) {
    int i = u->index_of(name);
    if (i < 0) throw Error(ErrorCode::BadParams, "unknown participant '" + name + "'");
    bits |= std::uint64_t{1} << i;
  }
  return Tag(u, bits);
}

EdgeRef parse_edge_ref(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw Error(ErrorCode::BadParams, "edge must be written src:dst, got '" + text + "'");
  return {text.substr(0, colon), text.substr(colon + 1)};
}

std::string path_text(const Diagram& d, const PathRef& p) { return path_str(d, p); }

// ---------------------------------------------------------------------------
// gen

protocols::DhParams dh_params(const Options& o, std::size_t default_owners) {
  protocols::DhParams params;
  params.p = o.p;
  params.g = o.g;
  if (o.keys.empty()) {
    params = protocols::default_dh_params(default_owners, o.p, o.g);
  } else {
    for (const auto& item : split(o.keys, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::BadParams, "key must be NAME=EXP, got '" + item + "'");
      std::uint64_t exp = 0;
      try {
        std::size_t used = 0;
        exp = std::stoull(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorCode::BadParams, "bad exponent in '" + item + "'");
      }
      params.keys.emplace_back(item.substr(0, eq), exp);
    }
  }
  params.eavesdroppers = split(o.eve, ',');
  return params;
}

json dh_metadata(const std::string& generator, const protocols::DhParams& params) {
  json keys = json::array();
  for (const auto& [owner, exp] : params.keys) {
    std::string symbol = owner;
    for (auto& c : symbol) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    keys.push_back({{"owner", owner}, {"symbol", symbol}, {"exponent", exp}});
  }
  return {{"generator", generator},
          {"g", params.g},
          {"keys", keys},
          {"eavesdroppers", params.eavesdroppers},
          {"conventions", {{"broadcast", true}}}};
}

int cmd_gen(const Options& o) {
  Diagram d = [&]() -> Diagram {
    if (o.kind == "dh2") return protocols::gen_dh2(dh_params(o, 2));
    if (o.kind == "dh-ring") return protocols::gen_dh_ring(dh_params(o, o.n ? o.n : 3));
    if (o.kind == "dh-pairwise") return protocols::gen_dh_pairwise(dh_params(o, o.n ? o.n : 3));
    if (o.kind == "dh-nk") {
      if (!o.n || !o.k) throw Error(ErrorCode::BadParams, "dh-nk needs --n and --k");
      return protocols::gen_dh_nk(o.n, o.k, dh_params(o, o.n));
    }
    if (o.kind == "cake") {
      protocols::CakeParams params;
      if (o.preset == "cake-matrix-demo")
        params = protocols::cake_matrix_demo();
      else if (o.preset == "cake-identity")
        params = protocols::cake_identity_demo();
      else
        throw Error(ErrorCode::BadParams, "unknown preset '" + o.preset + "'");
      params.eavesdroppers = split(o.eve, ',');
      return protocols::gen_cake(params);
    }
    throw Error(ErrorCode::BadParams, "unknown generator '" + o.kind + "'");
  }();
  json meta;
  if (o.kind == "cake") {
    meta = {{"generator", "cake"}, {"preset", o.preset}, {"conventions", {{"broadcast", true}}}};
  } else {
    auto params = dh_params(o, o.kind == "dh2" ? 2 : (o.n ? o.n : 3));
    meta = dh_metadata(o.kind, params);
    if (o.kind == "dh-nk") meta["k"] = o.k;
  }
  write_output(o, io::serialize_diagram(d, meta));
  return kOk;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const Options& o) {
  auto d = io::parse_diagram(read_input(o.input));
  auto commute = check_commutes(d);
  auto ifo = check_ifo(d);
  bool ok = commute.ok && ifo.ok;
  if (json_mode(o)) {
    auto out = io::ifo_report_to_json(d, ifo);
    out["ok"] = ok;
    out["commutes"] = io::commute_report_to_json(d, commute);
    if (ok) out["deadlock_free"] = strict_cycle_check(d);
    write_output(o, dump(out));
  } else {
    std::ostringstream os;
    for (const auto& v : commute.violations)
      os << paint("non-commuting", "31") << " " << v.src << " ~> " << v.dst << "\n  " << path_text(d, v.first)
         << "\n  " << path_text(d, v.second) << "\n";
    for (const auto& v : ifo.violations) {
      const auto& e = d.edges()[v.edge];
      os << paint(std::string(to_string(v.kind)) + " violation", "31") << " at " << e.src << " -[" << e.arrow.str()
         << "]-> " << e.dst << " " << v.edge_tag.str() << "\n  path " << path_text(d, v.path) << " meet "
         << v.path_tag.str() << "\n";
    }
    if (ok)
      os << paint("IFO holds", "32") << ": " << d.nodes().size() << " nodes, " << d.edges().size() << " edges\n";
    else
      os << paint("IFO fails", "31") << ": " << commute.violations.size() << " commutation and "
         << ifo.violations.size() << " ordering violation(s)\n";
    write_output(o, os.str());
  }
  return ok ? kOk : kNegative;
}

// ---------------------------------------------------------------------------
// complete / view

int cmd_complete(const Options& o) {
  auto doc = io::parse_document(read_input(o.input));
  auto completed = complete_ifo(doc.diagram);
  write_output(o, io::serialize_diagram(completed, doc.metadata));
  return kOk;
}

int cmd_view(const Options& o) {
  auto doc = io::parse_document(read_input(o.input));
  auto who = parse_tag(doc.diagram.universe(), o.who);
  auto view = restrict_view(doc.diagram, who);
  json meta = doc.metadata.is_null() ? json::object() : doc.metadata;
  meta["view"] = io::tag_to_json(who);
  write_output(o, io::serialize_diagram(view, meta));
  return kOk;
}

// ---------------------------------------------------------------------------
// leak

LeakRule parse_rule(const io::Document& doc, const std::string& text) {
  const auto& d = doc.diagram;
  auto plus = text.rfind('+');
  if (plus == std::string::npos) throw Error(ErrorCode::BadParams, "rule needs '+<participants>': '" + text + "'");
  LeakRule rule{std::nullopt, std::nullopt, std::nullopt, parse_tag(d.universe(), text.substr(plus + 1))};
  auto head = text.substr(0, plus);
  if (head.rfind("tag:", 0) == 0) {
    rule.exact_tag = parse_tag(d.universe(), head.substr(4));
    return rule;
  }
  if (head.rfind("pow:", 0) != 0) throw Error(ErrorCode::BadParams, "rule must start with pow: or tag:, got '" + text + "'");
  if (!d.theory().is_modexp()) throw Error(ErrorCode::BadParams, "pow rules need a modexp diagram");
  auto key = head.substr(4);
  bool numeric = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
  if (numeric) {
    rule.arrow = d.theory().modexp().pow(std::stoull(key));
    return rule;
  }
  const auto* keys = doc.metadata.is_object() && doc.metadata.contains("keys") ? &doc.metadata.at("keys") : nullptr;
  if (keys && keys->is_array()) {
    for (const auto& k : *keys) {
      if (k.value("symbol", "") != key && k.value("owner", "") != key) continue;
      rule.arrow = d.theory().modexp().pow(k.at("exponent").get<std::uint64_t>());
      int owner = d.universe()->index_of(k.at("owner").get<std::string>());
      if (owner >= 0) rule.member = static_cast<std::size_t>(owner);
      return rule;
    }
  }
  throw Error(ErrorCode::BadParams, "key '" + key + "' is not recorded in the diagram metadata");
}

std::vector<LeakRule> parse_rule_file(const io::Document& doc, const std::string& path) {
  const auto& d = doc.diagram;
  json j;
  try {
    j = json::parse(read_input(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Syntax, path + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::Schema, path + ": expected an array of rules");
  std::vector<LeakRule> rules;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = path + "[" + std::to_string(i) + "]";
    const auto& r = j[i];
    if (!r.is_object() || !r.contains("add")) throw Error(ErrorCode::Schema, where + ": rule needs 'add'");
    LeakRule rule{std::nullopt, std::nullopt, std::nullopt, io::tag_from_json(d.universe(), r.at("add"), where + ".add")};
    if (r.contains("arrow")) rule.arrow = io::arrow_from_json(d.theory(), r.at("arrow"), where + ".arrow");
    if (r.contains("tag")) rule.exact_tag = io::tag_from_json(d.universe(), r.at("tag"), where + ".tag");
    if (r.contains("member")) {
      auto name = r.at("member").is_string() ? r.at("member").get<std::string>() : std::string();
      int idx = d.universe()->index_of(name);
      if (idx < 0) throw Error(ErrorCode::Schema, where + ".member: unknown participant '" + name + "'");
      rule.member = static_cast<std::size_t>(idx);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

int cmd_leak(const Options& o) {
  auto text = read_input(o.input);
  auto doc = io::parse_document(text);
  std::vector<LeakRule> rules;
  for (const auto& r : o.rules) rules.push_back(parse_rule(doc, r));
  if (!o.rules_file.empty())
    for (auto& r : parse_rule_file(doc, o.rules_file)) rules.push_back(std::move(r));
  if (rules.empty()) throw Error(ErrorCode::BadParams, "leak needs at least one --rule or --rules-file");

  auto result = apply_leak(doc.diagram, rules);
  json substituted = json::array();
  for (const auto& e : result.diff.entries)
    if (e.cause == DiffCause::Substitution)
      substituted.push_back({{"edge", io::edge_ref_to_json(e.edge)}, {"tag", io::tag_to_json(e.new_tag)}});
  json meta = doc.metadata.is_null() ? json::object() : doc.metadata;
  meta.erase("derived_from");
  meta.erase("leak");
  meta["derived_from"] = io::diagram_to_json(doc.diagram, doc.metadata);
  json rule_text = o.rules;
  if (!o.rules_file.empty()) rule_text.push_back("file:" + o.rules_file);
  meta["leak"] = {{"rules", rule_text}, {"substituted", substituted}};
  write_output(o, io::serialize_diagram(result.completed, meta));
  return kOk;
}

// ---------------------------------------------------------------------------
// diff

std::string diff_text(const DiagramDiff& diff) {
  std::ostringstream os;
  for (const auto& e : diff.entries)
    os << to_string(e.cause) << " " << e.edge.str() << " " << e.old_tag.str() << " -> " << e.new_tag.str() << "\n";
  return os.str();
}

int cmd_diff(const Options& o) {
  auto doc = io::parse_document(read_input(o.input));
  DiagramDiff diff;
  if (!o.second.empty()) {
    auto other = io::parse_document(read_input(o.second));
    diff = diff_diagrams(doc.diagram, other.diagram);
  } else {
    const auto& meta = doc.metadata;
    if (!meta.is_object() || !meta.contains("derived_from"))
      throw Error(ErrorCode::BadParams, "diff needs two inputs, or one produced by leak");
    auto before = io::document_from_json(meta.at("derived_from")).diagram;
    auto tags = before.tags();
    if (meta.contains("leak") && meta.at("leak").contains("substituted")) {
      for (const auto& s : meta.at("leak").at("substituted")) {
        EdgeRef ref{s.at("edge").at("src").get<std::string>(), s.at("edge").at("dst").get<std::string>()};
        auto idx = before.edge_index(ref);
        if (!idx) throw Error(ErrorCode::Schema, "metadata.leak.substituted: unknown edge " + ref.str());
        tags[*idx] = io::tag_from_json(before.universe(), s.at("tag"), "metadata.leak.substituted");
      }
    }
    auto middle = before.with_tags(tags);
    diff = diff_diagrams(before, middle, DiffCause::Substitution);
    for (auto& e : diff_diagrams(middle, doc.diagram, DiffCause::Consequence).entries) diff.entries.push_back(std::move(e));
  }
  if (json_mode(o)) {
    write_output(o, dump({{"count", diff.entries.size()},
                          {"substitutions", diff.count(DiffCause::Substitution)},
                          {"consequences", diff.count(DiffCause::Consequence)},
                          {"entries", io::diff_to_json(diff)}}));
  } else {
    write_output(o, diff.empty() ? std::string("no differences\n") : diff_text(diff));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// events

int cmd_events(const Options& o) {
  auto d = io::parse_diagram(read_input(o.input));
  auto report = classify_events(d);
  if (json_mode(o)) {
    write_output(o, dump(io::events_to_json(d, report)));
    return kOk;
  }
  std::ostringstream os;
  for (const auto& ev : report.events) {
    const auto& e = d.edges()[ev.edge];
    os << to_string(ev.kind) << " " << e.src << " -[" << e.arrow.str() << "]-> " << e.dst << " " << e.tag.str();
    if (ev.kind == EventClass::Announcement)
      os << " by " << ev.explained.str() << " to " << ev.newly_informed.str();
    os << "\n";
    for (const auto& r : ev.routes) os << "  via " << path_text(d, r.path) << " meet " << r.meet.str() << "\n";
  }
  os << report.count(EventClass::Primitive) << " primitive, " << report.count(EventClass::Computation)
     << " computation, " << report.count(EventClass::Announcement) << " announcement\n";
  write_output(o, os.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// triangulate

int cmd_triangulate(const Options& o) {
  auto d = io::parse_diagram(read_input(o.input));
  ChordPolicy policy;
  if (o.policy == "audience")
    policy = ChordPolicy::Audience;
  else if (o.policy == "minimal")
    policy = ChordPolicy::Minimal;
  else
    throw Error(ErrorCode::BadParams, "policy must be audience or minimal");
  auto scenarios = enumerate_triangulations(d, parse_edge_ref(o.edge), policy);

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      auto path = std::filesystem::path(o.out_dir) / ("scenario-" + std::to_string(i + 1) + ".json");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorCode::BadParams, "cannot write '" + path.string() + "'");
      out << dump(io::scenario_to_json(scenarios[i], i + 1));
    }
  }
  if (json_mode(o)) {
    json all = json::array();
    for (std::size_t i = 0; i < scenarios.size(); ++i) all.push_back(io::scenario_to_json(scenarios[i], i + 1));
    write_output(o, dump(all));
    return kOk;
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    os << "scenario " << i + 1 << ":";
    for (const auto& c : s.inserted) os << " " << c.str();
    os << "\n";
    for (const auto& a : s.announcements)
      os << "  " << a.edge.str() << " " << a.value.str() << " announced by " << a.announcers.str() << " to "
         << a.audience.str() << "\n";
  }
  os << scenarios.size() << " scenario(s)\n";
  write_output(o, os.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// orderings / dot

int cmd_orderings(const Options& o) {
  auto d = io::parse_diagram(read_input(o.input));
  auto result = enumerate_orderings(d, o.limit);
  if (json_mode(o)) {
    write_output(o, dump(io::orderings_to_json(result)));
    return kOk;
  }
  std::ostringstream os;
  os << result.count << " ordering(s) of " << result.events.size() << " event(s)\n";
  for (const auto& ord : result.orderings) {
    for (std::size_t i = 0; i < ord.size(); ++i) os << (i ? " " : "") << "[" << result.events[ord[i]].dst << "]";
    os << "\n";
  }
  write_output(o, os.str());
  return kOk;
}

int cmd_dot(const Options& o) {
  auto d = io::parse_diagram(read_input(o.input));
  io::DotAnnotations annotations;
  if (o.annotate == "ifo")
    annotations = check_ifo(d);
  else if (o.annotate == "events")
    annotations = classify_events(d);
  else if (o.annotate != "none")
    throw Error(ErrorCode::BadParams, "annotate must be none, ifo or events");
  write_output(o, io::export_dot(d, annotations));
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotIfo:
    case ErrorCode::NoIfoAbove:
    case ErrorCode::PathExplosion:
    case ErrorCode::CountExplosion:
    case ErrorCode::AmbiguousPolygon:
    case ErrorCode::PoolsDoNotCommute:
      return kNegative;
    default:
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Algebraic-epistemic diagram toolkit"};
  app.require_subcommand(1);

  auto input = [&](CLI::App* sub) { sub->add_option("input", o.input, "diagram JSON, - for stdin"); };
  auto output = [&](CLI::App* sub) { sub->add_option("-o,--output", o.output, "output path"); };
  auto format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  };

  auto* gen = app.add_subcommand("gen", "generate a protocol diagram");
  gen->add_option("kind", o.kind, "dh2, dh-ring, dh-pairwise, dh-nk or cake")->required();
  gen->add_option("--p", o.p, "prime modulus");
  gen->add_option("--g", o.g, "generator");
  gen->add_option("--keys", o.keys, "owner exponents, e.g. A=3,B=4");
  gen->add_option("--eve", o.eve, "eavesdroppers, comma separated");
  gen->add_option("--n", o.n, "number of owners");
  gen->add_option("--k", o.k, "group size for dh-nk");
  gen->add_option("--preset", o.preset, "cake-matrix-demo or cake-identity");
  output(gen);

  auto* check = app.add_subcommand("check", "check commutation and IFO");
  input(check), output(check), format(check);

  auto* complete = app.add_subcommand("complete", "least IFO completion");
  input(complete), output(complete);

  auto* view = app.add_subcommand("view", "participant-restricted view");
  input(view), output(view);
  view->add_option("--who", o.who, "participants, e.g. A,B")->required();

  auto* leak = app.add_subcommand("leak", "substitute tags and complete");
  input(leak), output(leak);
  leak->add_option("--rule", o.rules, "pow:<key>+<participants> or tag:{A}+E");
  leak->add_option("--rules-file", o.rules_file, "JSON rule list");

  auto* events = app.add_subcommand("events", "classify edges as events");
  input(events), output(events), format(events);

  auto* tri = app.add_subcommand("triangulate", "enumerate triangulation scenarios");
  input(tri), output(tri), format(tri);
  tri->add_option("--edge", o.edge, "target edge src:dst")->required();
  tri->add_option("--policy", o.policy, "audience or minimal");
  tri->add_option("--out-dir", o.out_dir, "write scenario-N.json files here");

  auto* ord = app.add_subcommand("orderings", "count and list event orderings");
  input(ord), output(ord), format(ord);
  ord->add_option("--limit", o.limit, "orderings to list");

  auto* dot = app.add_subcommand("dot", "Graphviz export");
  input(dot), output(dot);
  dot->add_option("--annotate", o.annotate, "none, ifo or events");

  auto* diff = app.add_subcommand("diff", "tag differences");
  diff->add_option("input", o.input, "diagram JSON, - for stdin");
  diff->add_option("other", o.second, "second diagram; omitted for leak output");
  output(diff), format(diff);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*check) return cmd_check(o);
    if (*complete) return cmd_complete(o);
    if (*view) return cmd_view(o);
    if (*leak) return cmd_leak(o);
    if (*events) return cmd_events(o);
    if (*tri) return cmd_triangulate(o);
    if (*ord) return cmd_orderings(o);
    if (*dot) return cmd_dot(o);
    if (*diff) return cmd_diff(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
