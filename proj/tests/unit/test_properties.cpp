#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace aediag;
using namespace testing_support;

namespace {

std::vector<Tag> to_tags(const Diagram& d, const std::vector<std::uint64_t>& bits) {
  std::vector<Tag> out;
  for (auto b : bits) out.emplace_back(d.universe(), b);
  return out;
}

bool pointwise_leq(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

}  // namespace

TEST(Properties, CompletionIsExtensiveIdempotentMonotone) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    auto d = random_commuting(rng, 8, 1 + trial % 4, 14);
    auto c = complete_ifo(d);
    auto before = bits_of(d);
    auto after = bits_of(c);
    ASSERT_TRUE(pointwise_leq(before, after));
    ASSERT_TRUE(oracle_ifo_tags(c, after));
    ASSERT_TRUE(check_ifo(c).ok);
    ASSERT_EQ(complete_ifo(c), c);
    // Monotone: raise a few tags of d, completion can only grow.
    auto raised = before;
    std::uniform_int_distribution<std::uint64_t> extra(0, d.universe()->full_mask());
    for (auto& b : raised)
      if (rng() % 3 == 0) b |= extra(rng);
    auto c2 = complete_ifo(d.with_tags(to_tags(d, raised)));
    ASSERT_TRUE(pointwise_leq(after, bits_of(c2)));
  }
}

// The completion is below every IFO assignment above the input: brute force
// over all such assignments for small universes and edge counts.
TEST(Properties, CompletionIsLeastAbove) {
  std::mt19937 rng(2);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto d = random_commuting(rng, 5, 1 + trial % 3, 6, 0.7);
    auto base = bits_of(d);
    auto best = bits_of(complete_ifo(d));
    const auto top = d.universe()->full_mask();
    std::vector<std::uint64_t> cur = base;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == cur.size()) {
        if (oracle_ifo_tags(d, cur)) {
          ++checked;
          ASSERT_TRUE(pointwise_leq(best, cur));
        }
        return;
      }
      // Supersets of base[i] inside top.
      const auto free = top & ~base[i];
      for (std::uint64_t s = free;; s = (s - 1) & free) {
        cur[i] = base[i] | s;
        rec(i + 1);
        if (s == 0) break;
      }
      cur[i] = base[i];
    };
    rec(0);
  }
  EXPECT_GT(checked, 1000);
}

TEST(Properties, ExplainedTagsMatchOracle) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto d = random_commuting(rng, 8, 4, 20);
    auto fast = explained_tags(d);
    auto tags = bits_of(d);
    for (std::size_t i = 0; i < d.edges().size(); ++i) {
      std::uint64_t join = 0;
      for (const auto& p : oracle_paths(d, d.edges()[i].src, d.edges()[i].dst))
        if (p.size() >= 2) join |= oracle_meet(tags, p, d.universe()->full_mask());
      ASSERT_EQ(fast[i].bits(), join);
    }
  }
}

TEST(Properties, RestrictionPreservesIfoAndNoStrictCycles) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    auto d = complete_ifo(random_commuting(rng, 8, 1 + trial % 4, 14));
    ASSERT_TRUE(strict_cycle_check(d));
    std::uniform_int_distribution<std::uint64_t> who(1, d.universe()->full_mask());
    for (int k = 0; k < 3; ++k) {
      auto v = restrict_view(d, Tag(d.universe(), who(rng)));
      ASSERT_TRUE(check_ifo(v).ok);
    }
  }
}

TEST(Properties, NonCommutingRejectedByCompletion) {
  std::mt19937 rng(5);
  int rejected = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto d = random_commuting(rng, 6, 2, 10, 0.8);
    if (d.edges().empty()) continue;
    // Perturb one arrow; if it sits on a parallel pair, commutation breaks.
    auto nodes = d.nodes();
    auto edges = d.edges();
    auto& e = edges[rng() % edges.size()];
    auto v = e.arrow.elem().matrix.entries[0];
    e.arrow = d.theory().monoid().elem(Matrix{1, {v % 100 + 1}});
    auto bad = build_diagram(d.universe(), d.theory(), nodes, edges);
    if (check_commutes(bad).ok) continue;
    ++rejected;
    EXPECT_THROW(complete_ifo(bad), Error);
  }
  EXPECT_GT(rejected, 20);
}

TEST(Properties, RandomRoundTrips) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    auto d = random_commuting(rng, 8, 1 + trial % 4, 14);
    auto text = io::serialize_diagram(d);
    auto back = io::parse_diagram(text);
    ASSERT_EQ(back, d);
    ASSERT_EQ(io::serialize_diagram(back), text);
  }
}
