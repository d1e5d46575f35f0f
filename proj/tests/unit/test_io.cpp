#include <gtest/gtest.h>

#include "support.hpp"

using namespace aediag;
using testing_support::fixture;
using testing_support::read_file;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    io::parse_diagram(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed";
  return ErrorCode::BadParams;
}

std::string message_of(const std::string& text) {
  try {
    io::parse_diagram(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string tiny(const std::string& edges, const std::string& participants = R"(["A","E"])") {
  return R"({"version":"1","algebra":{"kind":"modexp","p":11},"participants":)" + participants +
         R"(,"nodes":[{"id":"s","object":"unit"},{"id":"x","object":"carrier"}],"edges":)" + edges + "}";
}

}  // namespace

TEST(Io, RoundTripGenerators) {
  std::vector<Diagram> all{protocols::gen_dh2(protocols::default_dh_params(2)),
                           protocols::gen_dh_ring(protocols::default_dh_params(3)),
                           protocols::gen_dh_pairwise(protocols::default_dh_params(4)),
                           protocols::gen_dh_nk(4, 3, protocols::default_dh_params(4)),
                           protocols::gen_cake(protocols::cake_matrix_demo())};
  for (const auto& d : all) {
    auto text = io::serialize_diagram(d);
    EXPECT_EQ(io::parse_diagram(text), d);
    EXPECT_EQ(io::serialize_diagram(io::parse_diagram(text)), text);
  }
}

TEST(Io, FixturesRoundTrip) {
  for (auto name : {"ring3.json", "ring3_leak_a.json", "ring3_leak_a_completed.json", "square.json", "square_cb.json"}) {
    auto text = read_file(std::string(AEDIAG_FIXTURES) + "/" + name);
    auto parsed = io::parse_diagram(text);
    auto once = io::serialize_diagram(parsed);
    EXPECT_EQ(io::parse_diagram(once), parsed) << name;
    EXPECT_EQ(io::serialize_diagram(io::parse_diagram(once)), once) << name;
  }
}

TEST(Io, RingRecordCounts) {
  auto j = io::json::parse(io::serialize_diagram(protocols::gen_dh_ring(protocols::default_dh_params(3))));
  EXPECT_EQ(j["nodes"].size(), 9U);
  EXPECT_EQ(j["edges"].size(), 17U);
  EXPECT_EQ(j["version"], "1");
}

TEST(Io, MetadataSurvives) {
  auto d = protocols::gen_dh2(protocols::default_dh_params(2));
  io::json meta = {{"generator", "dh2"}};
  auto doc = io::parse_document(io::serialize_diagram(d, meta));
  EXPECT_EQ(doc.metadata, meta);
}

TEST(Io, SyntaxErrorsCarryLocation) {
  EXPECT_EQ(parse_code("{\n  \"nodes\": [,]\n}"), ErrorCode::Syntax);
  EXPECT_NE(message_of("{\n  \"nodes\": [,]\n}").find("line 2"), std::string::npos);
}

TEST(Io, SchemaErrors) {
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"zz","arrow":{"op":"select","value":2},"tag":["A"]}])")),
            ErrorCode::Schema);
  EXPECT_NE(message_of(tiny(R"([{"src":"s","dst":"zz","arrow":{"op":"select","value":2},"tag":["A"]}])")).find("zz"),
            std::string::npos);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"select","value":2},"tag":["Q"]}])")),
            ErrorCode::Schema);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"fly"},"tag":[]}])")), ErrorCode::Schema);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"select","value":-2},"tag":[]}])")),
            ErrorCode::Schema);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"pow","exp":0},"tag":[]}])")), ErrorCode::Schema);
  EXPECT_EQ(parse_code(tiny("[]", R"(["A","A"])")), ErrorCode::Schema);
  EXPECT_EQ(parse_code(R"({"algebra":{"kind":"modexp","p":9},"participants":["A"],"nodes":[],"edges":[]})"),
            ErrorCode::Schema);
  EXPECT_EQ(parse_code(R"({"participants":["A"],"nodes":[],"edges":[]})"), ErrorCode::Schema);
  EXPECT_EQ(parse_code(R"([1,2])"), ErrorCode::Schema);
}

TEST(Io, StructuralErrors) {
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"pow","exp":2},"tag":[]}])")),
            ErrorCode::TypeMismatch);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"x","dst":"x","arrow":{"op":"pow","exp":2},"tag":[]}])")), ErrorCode::SelfLoop);
  EXPECT_EQ(parse_code(tiny(R"([{"src":"s","dst":"x","arrow":{"op":"select","value":2},"tag":[]},
                                 {"src":"s","dst":"x","arrow":{"op":"select","value":3},"tag":[]}])")),
            ErrorCode::ParallelEdge);
}

TEST(Io, UnnamedMatricesRoundTrip) {
  auto d = fixture("square.json").diagram;
  auto s = enumerate_triangulations(d, {"n0", "n4"});
  for (const auto& sc : s) {
    auto text = io::serialize_diagram(sc.triangulation);
    EXPECT_EQ(io::parse_diagram(text), sc.triangulation);
  }
}

TEST(Dot, BipartiteHasEightEdges) {
  auto d = protocols::gen_dh2(protocols::default_dh_params(2));
  auto dot = io::export_dot(d);
  std::size_t arrows = 0;
  for (std::size_t pos = dot.find(" -> "); pos != std::string::npos; pos = dot.find(" -> ", pos + 1)) ++arrows;
  EXPECT_EQ(arrows, 8U);
  EXPECT_NE(dot.find("\"select(2), {A,B,E}\""), std::string::npos);
  EXPECT_EQ(dot, io::export_dot(d));
}

TEST(Dot, ViolationHighlighted) {
  auto d = fixture("ring3_leak_a.json").diagram;
  auto dot = io::export_dot(d, check_ifo(d));
  std::size_t red = 0;
  for (std::size_t pos = dot.find("penwidth=2"); pos != std::string::npos; pos = dot.find("penwidth=2", pos + 1)) ++red;
  EXPECT_EQ(red, 1U);
  auto line_start = dot.rfind('\n', dot.find("penwidth=2"));
  EXPECT_EQ(dot.substr(line_start + 1, 20), "  \"star\" -> \"g^abc\" ");
}

TEST(Dot, AnnouncementsMarked) {
  auto d = protocols::gen_dh2(protocols::default_dh_params(2));
  auto dot = io::export_dot(d, classify_events(d));
  std::size_t dashed = 0;
  for (std::size_t pos = dot.find("style=dashed"); pos != std::string::npos; pos = dot.find("style=dashed", pos + 1))
    ++dashed;
  EXPECT_EQ(dashed, 2U);
}

TEST(Dot, EmptyDiagram) {
  auto d = build_diagram(make_universe({"A"}), ModExpTheory(7), {}, {});
  EXPECT_EQ(io::export_dot(d), "digraph aediag {\n  rankdir=LR;\n}\n");
}

TEST(Diff, RingLeakFixtures) {
  auto diff = diff_diagrams(fixture("ring3_leak_a.json").diagram, fixture("ring3_leak_a_completed.json").diagram);
  ASSERT_EQ(diff.entries.size(), 1U);
  auto j = io::diff_to_json(diff);
  EXPECT_EQ(j[0]["old"], io::json({"A", "B", "C"}));
  EXPECT_EQ(j[0]["new"], io::json({"A", "B", "C", "E"}));
}
