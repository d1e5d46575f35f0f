#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace aediag;

namespace {

std::uint64_t naive_pow(std::uint64_t x, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  for (std::uint64_t i = 0; i < e; ++i) r = r * x % p;
  return r;
}

bool naive_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST(Algebra, SelectThenPow) {
  AlgebraTheory t = ModExpTheory(11);
  auto g = t.modexp().select(2);
  auto ga = compose(t, g, t.modexp().pow(3));
  EXPECT_TRUE(arrows_equal(t, ga, t.modexp().select(8)));
  auto gab = compose(t, ga, t.modexp().pow(4));
  EXPECT_TRUE(arrows_equal(t, gab, t.modexp().select(4)));
  auto gb = compose(t, g, t.modexp().pow(4));
  EXPECT_TRUE(arrows_equal(t, gb, t.modexp().select(5)));
  EXPECT_TRUE(arrows_equal(t, compose(t, gb, t.modexp().pow(3)), gab));
}

TEST(Algebra, PowComposesMultiplicatively) {
  AlgebraTheory t = ModExpTheory(11);
  auto ab = compose(t, t.modexp().pow(3), t.modexp().pow(4));
  auto ba = compose(t, t.modexp().pow(4), t.modexp().pow(3));
  EXPECT_TRUE(arrows_equal(t, ab, ba));
  EXPECT_EQ(ab.pow().exp, 2U);
}

TEST(Algebra, ExponentNormalization) {
  ModExpTheory t(11);
  EXPECT_EQ(t.pow(13).pow().exp, 3U);
  EXPECT_EQ(t.pow(10).pow().exp, 10U);
  EXPECT_EQ(t.pow(20).pow().exp, 10U);
  EXPECT_THROW(t.pow(0), Error);
  EXPECT_EQ(t.select(13).select().value, 2U);
}

TEST(Algebra, ModulusValidation) {
  EXPECT_THROW(ModExpTheory(9), Error);
  EXPECT_THROW(ModExpTheory(2), Error);
  EXPECT_THROW(ModExpTheory(1), Error);
  EXPECT_NO_THROW(ModExpTheory(2147483647));
  EXPECT_THROW(ModExpTheory((std::uint64_t{1} << 31) + 11), Error);
  for (std::uint64_t n = 0; n < 2000; ++n) EXPECT_EQ(detail::is_prime(n), naive_prime(n)) << n;
}

TEST(Algebra, CompositionTypeErrors) {
  AlgebraTheory t = ModExpTheory(11);
  try {
    compose(t, t.modexp().pow(3), t.modexp().select(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Composition);
  }
  EXPECT_THROW(arrows_equal(t, t.modexp().select(2), t.modexp().pow(2)), Error);
}

TEST(Algebra, EvalErrors) {
  ModExpTheory t(11);
  EXPECT_EQ(eval_point(t, t.pow(3), std::uint64_t{2}), 8U);
  EXPECT_EQ(eval_point(t, t.select(7), UnitPoint{}), 7U);
  EXPECT_THROW(eval_point(t, t.pow(3), UnitPoint{}), Error);
  EXPECT_THROW(eval_point(t, t.select(7), std::uint64_t{3}), Error);
  EXPECT_THROW(eval_point(t, t.pow(3), std::uint64_t{11}), Error);
}

TEST(Algebra, LargeModulusUsesWideMultiplication) {
  ModExpTheory t(2147483647);
  AlgebraTheory a = t;
  auto x = compose(a, t.select(2147483646), t.pow(2));
  EXPECT_EQ(x.select().value, 1U);
}

TEST(Algebra, OracleBound) {
  ModExpTheory t(10009);
  EXPECT_THROW(extensionally_equal(t, t.pow(2), t.pow(3)), Error);
  EXPECT_NO_THROW(extensionally_equal(t, t.pow(2), t.pow(3), 20000));
}

// Normalized equality agrees with exhaustive evaluation for every prime up to 31.
TEST(Algebra, NormalizedEqualityMatchesPointwiseOracle) {
  for (std::uint64_t p = 3; p <= 31; ++p) {
    if (!naive_prime(p)) continue;
    ModExpTheory t(p);
    AlgebraTheory a = t;
    for (std::uint64_t e1 = 1; e1 <= 2 * p; ++e1)
      for (std::uint64_t e2 = 1; e2 <= 2 * p; ++e2) {
        bool pointwise = true;
        for (std::uint64_t x = 0; x < p; ++x) pointwise &= naive_pow(x, e1, p) == naive_pow(x, e2, p);
        EXPECT_EQ(arrows_equal(a, t.pow(e1), t.pow(e2)), pointwise) << p << " " << e1 << " " << e2;
        EXPECT_EQ(extensionally_equal(t, t.pow(e1), t.pow(e2)), pointwise);
      }
  }
}

TEST(Algebra, ComposeEvalConsistencyRandomTriples) {
  std::mt19937 rng(7);
  const std::vector<std::uint64_t> primes{3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 101, 7919};
  std::uniform_int_distribution<std::size_t> pick(0, primes.size() - 1);
  for (int trial = 0; trial < 10000; ++trial) {
    auto p = primes[pick(rng)];
    ModExpTheory t(p);
    AlgebraTheory a = t;
    std::uniform_int_distribution<std::uint64_t> exp(1, 3 * p);
    std::uniform_int_distribution<std::uint64_t> res(0, p - 1);
    auto f = t.pow(exp(rng));
    auto g = t.pow(exp(rng));
    auto x = res(rng);
    auto fg = compose(a, f, g);
    EXPECT_EQ(eval_point(t, fg, x), eval_point(t, g, eval_point(t, f, x)));
    auto s = t.select(x);
    EXPECT_EQ(eval_point(t, compose(a, s, g), UnitPoint{}), eval_point(t, g, x));
    auto h = t.pow(exp(rng));
    EXPECT_TRUE(arrows_equal(a, compose(a, compose(a, f, g), h), compose(a, f, compose(a, g, h))));
  }
}

TEST(Algebra, MatrixMonoidComposesRightToLeft) {
  MatrixMonoidTheory m(7, 2, {{"a", Matrix{2, {1, 1, 0, 1}}}, {"b", Matrix{2, {1, 0, 1, 1}}}});
  AlgebraTheory t = m;
  auto ba = compose(t, m.elem("a"), m.elem("b"));
  // b * a = [[1,0],[1,1]] * [[1,1],[0,1]] = [[1,1],[1,2]]
  EXPECT_EQ(ba.elem().matrix.entries, (std::vector<std::uint64_t>{1, 1, 1, 2}));
  EXPECT_FALSE(arrows_equal(t, ba, compose(t, m.elem("b"), m.elem("a"))));
  EXPECT_THROW(m.elem("zz"), Error);
  EXPECT_THROW(m.elem(Matrix{3, std::vector<std::uint64_t>(9, 0)}), Error);
}

TEST(Algebra, PoolCommutationWitness) {
  MatrixMonoidTheory m(7, 2,
                       {{"x", Matrix{2, {1, 1, 0, 1}}},
                        {"y", Matrix{2, {1, 0, 1, 1}}},
                        {"z", Matrix{2, {2, 0, 0, 2}}}});
  EXPECT_TRUE(check_pointwise_commuting(m, {"x"}, {"z"}));
  auto w = find_noncommuting_pair(m, {"x", "z"}, {"z", "y"});
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->a, "x");
  EXPECT_EQ(w->b, "y");
}

TEST(Algebra, ArrowPrinting) {
  ModExpTheory t(11);
  EXPECT_EQ(t.pow(3).str(), "pow(3)");
  EXPECT_EQ(t.select(2).str(), "select(2)");
}
