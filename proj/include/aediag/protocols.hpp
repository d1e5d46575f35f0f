#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aediag/algebra.hpp"
#include "aediag/analysis.hpp"
#include "aediag/diagram.hpp"

namespace aediag::protocols {

inline constexpr const char* kUnitNode = "star";

/// Diffie-Hellman parameters. Key owners appear in `keys` in cyclic order;
/// each owner's exponent symbol is the lower-cased participant name.
struct DhParams {
  std::uint64_t p = 101;
  std::uint64_t g = 2;
  std::vector<std::pair<std::string, std::uint64_t>> keys;
  std::vector<std::string> eavesdroppers{"E"};
};

/// Owners A, B, C, ... with exponents 3, 4, 5, ...
inline DhParams default_dh_params(std::size_t owners, std::uint64_t p = 101, std::uint64_t g = 2) {
  DhParams params;
  params.p = p;
  params.g = g;
  for (std::size_t i = 0; i < owners; ++i)
    params.keys.emplace_back(std::string(1, static_cast<char>('A' + i)), 3 + i);
  return params;
}

namespace detail {

struct DhContext {
  ModExpTheory theory;
  UniversePtr universe;
  std::vector<std::string> owners;
  std::vector<std::string> symbols;
  std::vector<std::uint64_t> exponents;  // normalized
  std::uint64_t g;

  Tag top() const { return Tag::top(universe); }
  Tag owner(std::size_t i) const { return Tag(universe, std::uint64_t{1} << i); }
  Tag eaves() const {
    std::uint64_t bits = 0;
    for (std::size_t i = owners.size(); i < universe->size(); ++i) bits |= std::uint64_t{1} << i;
    return Tag(universe, bits);
  }
  Arrow pow(std::size_t i) const { return theory.pow(exponents[i]); }
  Arrow select_power(const std::vector<std::size_t>& members) const {
    std::uint64_t v = g;
    for (auto i : members) v = aediag::detail::powmod(v, exponents[i], theory.p());
    return theory.select(v);
  }
  std::string node_id(const std::vector<std::size_t>& members) const {
    if (members.empty()) return "g";
    std::string id = "g^";
    for (auto i : members) id += symbols[i];
    return id;
  }
};

inline DhContext make_context(const DhParams& params, std::size_t min_owners) {
  ModExpTheory theory(params.p);
  if (params.keys.size() < min_owners)
    throw Error(ErrorCode::BadParams, "need at least " + std::to_string(min_owners) + " key owners");
  if (params.g == 0 || params.g >= params.p) throw Error(ErrorCode::BadParams, "root g must lie in 1..p-1");
  std::vector<std::string> names;
  DhContext ctx{theory, nullptr, {}, {}, {}, params.g};
  std::set<std::string> symbols;
  for (const auto& [owner, exp] : params.keys) {
    if (exp == 0 || exp >= params.p)
      throw Error(ErrorCode::BadParams, "key of " + owner + " must lie in 1..p-1");
    std::string sym;
    for (char c : owner) sym += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!symbols.insert(sym).second) throw Error(ErrorCode::BadParams, "duplicate key owner " + owner);
    ctx.owners.push_back(owner);
    ctx.symbols.push_back(sym);
    ctx.exponents.push_back(theory.normalize_exponent(exp));
    names.push_back(owner);
  }
  for (const auto& e : params.eavesdroppers) {
    if (std::find(ctx.owners.begin(), ctx.owners.end(), e) != ctx.owners.end())
      throw Error(ErrorCode::BadParams, e + " is both a key owner and an eavesdropper");
    names.push_back(e);
  }
  try {
    ctx.universe = make_universe(std::move(names));
  } catch (const Error& err) {
    throw Error(ErrorCode::BadParams, err.what());
  }
  return ctx;
}

}  // namespace detail

/// Pairwise Diffie-Hellman among n >= 2 owners: public g and g^x, and a
/// shared secret g^{xy} known to x and y, reachable through both g^x and g^y.
inline Diagram gen_dh_pairwise(const DhParams& params) {
  auto ctx = detail::make_context(params, 2);
  const auto n = ctx.owners.size();
  std::vector<Node> nodes{{kUnitNode, ObjectKind::Unit}, {"g", ObjectKind::Carrier}};
  std::vector<Edge> edges{{kUnitNode, "g", ctx.select_power({}), ctx.top()}};
  for (std::size_t x = 0; x < n; ++x) {
    auto gx = ctx.node_id({x});
    nodes.push_back({gx, ObjectKind::Carrier});
    edges.push_back({"g", gx, ctx.pow(x), ctx.owner(x)});
    edges.push_back({kUnitNode, gx, ctx.select_power({x}), ctx.top()});
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      auto gxy = ctx.node_id({x, y});
      nodes.push_back({gxy, ObjectKind::Carrier});
      edges.push_back({ctx.node_id({x}), gxy, ctx.pow(y), ctx.owner(y)});
      edges.push_back({ctx.node_id({y}), gxy, ctx.pow(x), ctx.owner(x)});
      edges.push_back({kUnitNode, gxy, ctx.select_power({x, y}), tag_join(ctx.owner(x), ctx.owner(y))});
    }
  return build_diagram(ctx.universe, ctx.theory, std::move(nodes), std::move(edges));
}

/// Bipartite Diffie-Hellman: five nodes, eight edges.
inline Diagram gen_dh2(const DhParams& params) {
  if (params.keys.size() != 2) throw Error(ErrorCode::BadParams, "bipartite Diffie-Hellman needs exactly 2 key owners");
  return gen_dh_pairwise(params);
}

/// Ring Diffie-Hellman among n >= 3 owners. Owner i's chain raises g through
/// the keys of i, i+1, ... ; every partial value is computed by the owner of
/// its last key and passed to the next owner, with eavesdroppers listening.
/// The full product is known to the owners only.
inline Diagram gen_dh_ring(const DhParams& params) {
  auto ctx = detail::make_context(params, 3);
  const auto n = ctx.owners.size();
  std::vector<std::size_t> everyone(n);
  for (std::size_t i = 0; i < n; ++i) everyone[i] = i;
  const auto full_id = ctx.node_id(everyone);

  std::vector<Node> nodes{{kUnitNode, ObjectKind::Unit}, {"g", ObjectKind::Carrier}, {full_id, ObjectKind::Carrier}};
  std::vector<Edge> edges{{kUnitNode, "g", ctx.select_power({}), ctx.top()}};
  Tag owners_only = Tag::bottom(ctx.universe);
  for (std::size_t i = 0; i < n; ++i) owners_only = tag_join(owners_only, ctx.owner(i));
  edges.push_back({kUnitNode, full_id, ctx.select_power(everyone), owners_only});

  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> interval;
    std::string prev = "g";
    for (std::size_t len = 1; len < n; ++len) {
      const auto last = (start + len - 1) % n;
      interval.push_back(last);
      auto id = ctx.node_id(interval);
      nodes.push_back({id, ObjectKind::Carrier});
      edges.push_back({prev, id, ctx.pow(last), ctx.owner(last)});
      Tag audience = tag_join(tag_join(ctx.owner(last), ctx.owner((last + 1) % n)), ctx.eaves());
      edges.push_back({kUnitNode, id, ctx.select_power(interval), audience});
      prev = id;
    }
    const auto closing = (start + n - 1) % n;
    edges.push_back({prev, full_id, ctx.pow(closing), ctx.owner(closing)});
  }
  return build_diagram(ctx.universe, ctx.theory, std::move(nodes), std::move(edges));
}

/// Broadcast <n,k> Diffie-Hellman: one node per owner subset of size <= k,
/// exponentiation edges adding one owner, every intermediate value public and
/// each k-subset's value known to exactly that subset.
inline Diagram gen_dh_nk(std::size_t n, std::size_t k, const DhParams& params) {
  if (params.keys.size() != n) throw Error(ErrorCode::BadParams, "expected " + std::to_string(n) + " key owners");
  if (k < 2 || k > n) throw Error(ErrorCode::BadParams, "need 2 <= k <= n");
  if (n > 20) throw Error(ErrorCode::BadParams, "at most 20 owners");
  auto ctx = detail::make_context(params, 2);

  auto members_of = [&](std::uint32_t mask) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1U) m.push_back(i);
    return m;
  };
  std::vector<Node> nodes{{kUnitNode, ObjectKind::Unit}};
  std::vector<Edge> edges;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    auto members = members_of(mask);
    if (members.size() > k) continue;
    auto id = ctx.node_id(members);
    nodes.push_back({id, ObjectKind::Carrier});
    Tag tag = ctx.top();
    if (members.size() == k) {
      tag = Tag::bottom(ctx.universe);
      for (auto i : members) tag = tag_join(tag, ctx.owner(i));
    }
    edges.push_back({kUnitNode, id, ctx.select_power(members), tag});
    if (members.size() == k) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) continue;
      edges.push_back({id, ctx.node_id(members_of(mask | (std::uint32_t{1} << i))), ctx.pow(i), ctx.owner(i)});
    }
  }
  return build_diagram(ctx.universe, ctx.theory, std::move(nodes), std::move(edges));
}

// ---------------------------------------------------------------------------
// Semigroup CAKE

struct CakeParams {
  MatrixMonoidTheory theory{2, 1};
  std::string gamma = "gamma";
  std::string alpha1 = "alpha1";
  std::string alpha2 = "alpha2";
  std::string beta1 = "beta1";
  std::string beta2 = "beta2";
  std::string alice = "A";
  std::string bob = "B";
  std::vector<std::string> eavesdroppers{"E"};
};

namespace detail {

inline Matrix block_diag(const Matrix& upper, const Matrix& lower) {
  Matrix m{upper.dim + lower.dim, std::vector<std::uint64_t>((upper.dim + lower.dim) * (upper.dim + lower.dim), 0)};
  for (std::size_t r = 0; r < upper.dim; ++r)
    for (std::size_t c = 0; c < upper.dim; ++c) m.at(r, c) = upper.at(r, c);
  for (std::size_t r = 0; r < lower.dim; ++r)
    for (std::size_t c = 0; c < lower.dim; ++c) m.at(upper.dim + r, upper.dim + c) = lower.at(r, c);
  return m;
}

inline Matrix mat2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) { return Matrix{2, {a, b, c, d}}; }

}  // namespace detail

/// 4x4 matrices over Z_7. Alice's keys act on the upper 2x2 block and Bob's
/// on the lower block, so the pools commute pointwise while neither pool is
/// commutative internally and gamma mixes the blocks.
inline CakeParams cake_matrix_demo() {
  using detail::block_diag;
  using detail::mat2;
  const auto id2 = Matrix::identity(2);
  std::map<std::string, Matrix> elements{
      {"alpha1", block_diag(mat2(1, 2, 3, 5), id2)},
      {"alpha2", block_diag(mat2(2, 1, 1, 1), id2)},
      {"beta1", block_diag(id2, mat2(1, 1, 0, 1))},
      {"beta2", block_diag(id2, mat2(3, 0, 2, 1))},
      {"gamma", Matrix{4, {1, 2, 0, 3, 4, 1, 5, 0, 0, 6, 1, 2, 3, 0, 4, 1}}},
  };
  std::map<std::string, std::vector<std::string>> pools{{"A", {"alpha1", "alpha2"}}, {"B", {"beta1", "beta2"}}};
  CakeParams params;
  params.theory = MatrixMonoidTheory(7, 4, std::move(elements), std::move(pools));
  return params;
}

/// Identity keys for both parties; the shared secret collapses to gamma.
inline CakeParams cake_identity_demo() {
  std::map<std::string, Matrix> elements{
      {"alpha1", Matrix::identity(2)}, {"alpha2", Matrix::identity(2)}, {"beta1", Matrix::identity(2)},
      {"beta2", Matrix::identity(2)},  {"gamma", Matrix{2, {1, 2, 3, 4}}},
  };
  CakeParams params;
  params.theory = MatrixMonoidTheory(5, 2, std::move(elements), {{"A", {"alpha1", "alpha2"}}, {"B", {"beta1", "beta2"}}});
  return params;
}

/// Semigroup CAKE over a matrix monoid. Eight nodes:
///
///   in --alpha2--> a2 --P_B--> pb --alpha1--> out
///   in --beta2---> b2 --P_A--> pa --beta1---> out
///   a2 --beta2--> ab2, b2 --alpha2--> ab2, ab2 --gamma--> gab2,
///   gab2 --beta1--> pb, gab2 --alpha1--> pa, in --sigma--> out
///
/// P_A = alpha1 gamma alpha2 and P_B = beta1 gamma beta2 are the public
/// announcements; sigma = alpha1 beta1 gamma beta2 alpha2 is the shared
/// secret. The returned theory also names P_A, P_B and sigma.
inline Diagram gen_cake(const CakeParams& params) {
  const auto& t = params.theory;
  for (const auto* name : {&params.gamma, &params.alpha1, &params.alpha2, &params.beta1, &params.beta2})
    if (!t.elements().count(*name)) throw Error(ErrorCode::BadParams, "undeclared monoid element '" + *name + "'");
  if (auto w = find_noncommuting_pair(t, {params.alpha1, params.alpha2}, {params.beta1, params.beta2}))
    throw Error(ErrorCode::PoolsDoNotCommute, w->a + " * " + w->b + " != " + w->b + " * " + w->a);

  const auto& a1 = t.matrix(params.alpha1);
  const auto& a2 = t.matrix(params.alpha2);
  const auto& b1 = t.matrix(params.beta1);
  const auto& b2 = t.matrix(params.beta2);
  const auto& gm = t.matrix(params.gamma);
  auto mul = [&](std::initializer_list<const Matrix*> factors) {
    Matrix acc = Matrix::identity(t.dim());
    for (const auto* f : factors) acc = t.multiply(acc, *f);
    return acc;
  };
  auto elements = t.elements();
  for (const char* derived : {"P_A", "P_B", "sigma"})
    if (elements.count(derived)) throw Error(ErrorCode::BadParams, std::string("element name ") + derived + " is reserved");
  elements["P_A"] = mul({&a1, &gm, &a2});
  elements["P_B"] = mul({&b1, &gm, &b2});
  elements["sigma"] = mul({&a1, &b1, &gm, &b2, &a2});
  MatrixMonoidTheory theory(t.modulus(), t.dim(), std::move(elements), t.pools());

  std::vector<std::string> names{params.alice, params.bob};
  for (const auto& e : params.eavesdroppers) names.push_back(e);
  UniversePtr universe;
  try {
    universe = make_universe(names);
  } catch (const Error& err) {
    throw Error(ErrorCode::BadParams, err.what());
  }
  const Tag top = Tag::top(universe);
  const Tag alice = Tag(universe, 1);
  const Tag bob = Tag(universe, 2);

  std::vector<Node> nodes;
  for (const char* id : {"in", "a2", "b2", "ab2", "gab2", "pa", "pb", "out"}) nodes.push_back({id, ObjectKind::Dot});
  std::vector<Edge> edges{
      {"in", "a2", theory.elem(params.alpha2), alice},
      {"in", "b2", theory.elem(params.beta2), bob},
      {"a2", "ab2", theory.elem(params.beta2), bob},
      {"b2", "ab2", theory.elem(params.alpha2), alice},
      {"ab2", "gab2", theory.elem(params.gamma), top},
      {"gab2", "pb", theory.elem(params.beta1), bob},
      {"gab2", "pa", theory.elem(params.alpha1), alice},
      {"a2", "pb", theory.elem("P_B"), top},
      {"b2", "pa", theory.elem("P_A"), top},
      {"pb", "out", theory.elem(params.alpha1), alice},
      {"pa", "out", theory.elem(params.beta1), bob},
      {"in", "out", theory.elem("sigma"), tag_join(alice, bob)},
  };
  return build_diagram(universe, theory, std::move(nodes), std::move(edges));
}

}  // namespace aediag::protocols
