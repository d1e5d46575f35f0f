#pragma once

#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "aediag.hpp"

namespace testing_support {

using namespace aediag;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline io::Document fixture(const std::string& name) {
  return io::parse_document(read_file(std::string(AEDIAG_FIXTURES) + "/" + name));
}

inline UniversePtr letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.emplace_back(1, static_cast<char>('P' + i));
  return make_universe(names);
}

// Scalars mod 101 on dot nodes. Each node gets a unit potential and each edge
// carries phi(dst)/phi(src), so every pair of parallel paths composes equally.
inline Diagram random_commuting(std::mt19937& rng, std::size_t max_nodes, std::size_t participants,
                                std::size_t max_edges, double density = 0.5) {
  constexpr std::uint64_t q = 101;
  auto u = letters(participants);
  std::uniform_int_distribution<std::size_t> nodes_d(2, max_nodes);
  std::uniform_int_distribution<std::uint64_t> phi_d(1, q - 1);
  std::uniform_int_distribution<std::uint64_t> tag_d(0, u->full_mask());
  std::bernoulli_distribution keep(density);
  auto n = nodes_d(rng);
  std::vector<std::uint64_t> phi(n);
  for (auto& x : phi) x = phi_d(rng);
  auto inverse = [&](std::uint64_t x) { return detail::powmod(x, q - 2, q); };
  MatrixMonoidTheory theory(q, 1);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"v" + std::to_string(i), ObjectKind::Dot});
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  if (pairs.size() > max_edges) pairs.resize(max_edges);
  std::vector<Edge> edges;
  for (auto [i, j] : pairs) {
    auto ratio = detail::mulmod(phi[j], inverse(phi[i]), q);
    edges.push_back({nodes[i].id, nodes[j].id, theory.elem(Matrix{1, {ratio}}), Tag(u, tag_d(rng))});
  }
  return build_diagram(u, theory, nodes, edges);
}

// All paths src ~> dst as edge-index lists, by plain recursion over the edge
// list. Independent of the library's path enumeration.
inline std::vector<std::vector<std::size_t>> oracle_paths(const Diagram& d, const std::string& src,
                                                          const std::string& dst) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  std::function<void(const std::string&)> walk = [&](const std::string& at) {
    if (at == dst && !stack.empty()) {
      out.push_back(stack);
      return;
    }
    for (std::size_t i = 0; i < d.edges().size(); ++i) {
      if (d.edges()[i].src != at) continue;
      stack.push_back(i);
      walk(d.edges()[i].dst);
      stack.pop_back();
    }
  };
  walk(src);
  return out;
}

inline std::uint64_t oracle_meet(const std::vector<std::uint64_t>& tags, const std::vector<std::size_t>& path,
                                 std::uint64_t top) {
  auto m = top;
  for (auto e : path) m &= tags[e];
  return m;
}

// Epistemic half of IFO for an arbitrary tag assignment; the algebraic half
// holds by construction for diagrams built by random_commuting.
inline bool oracle_ifo_tags(const Diagram& d, const std::vector<std::uint64_t>& tags) {
  auto top = d.universe()->full_mask();
  for (std::size_t i = 0; i < d.edges().size(); ++i) {
    for (const auto& p : oracle_paths(d, d.edges()[i].src, d.edges()[i].dst)) {
      if (p.size() < 2) continue;
      if (oracle_meet(tags, p, top) & ~tags[i]) return false;
    }
  }
  return true;
}

inline std::vector<std::uint64_t> bits_of(const Diagram& d) {
  std::vector<std::uint64_t> out;
  for (const auto& e : d.edges()) out.push_back(e.tag.bits());
  return out;
}

}  // namespace testing_support
