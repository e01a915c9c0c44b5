#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dinicert/expr.hpp"
#include "oracles.hpp"

using namespace dinicert;

TEST(FuncExpr, EvaluatesEachNode) {
  const TailSeq x({1.0, -2.0, 3.0}, TailRule::constant(-0.5));
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::constant(4.0), x), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::coord(1), x), -2.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::affine({1.0, 1.0, 1.0}, 0.5), x), 2.5);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::square(FuncExpr::coord(2)), x), 9.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::abs(FuncExpr::coord(1)), x), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::norm_one({0, 1, 2}), x), 6.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::norm_two_sq({0, 1}), x), 5.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::limsup_abs(), x), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::max({FuncExpr::coord(0), FuncExpr::coord(2)}), x), 3.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::scale(2.0, FuncExpr::coord(0)), x), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::sum({FuncExpr::coord(0), FuncExpr::coord(2)}), x), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(FuncExpr::atan_sq_affine({1.0}, 0.0), x), std::atan(1.0) * std::atan(1.0));
}

TEST(FuncExpr, AffineTailCoefficients) {
  // sum_n c_n x_n with c_n = 0.5^(n-1) past the head and x_n = 1 everywhere.
  const FuncExpr f = FuncExpr::affine({1.0}, 0.0, TailRule::geometric(1.0, 0.5));
  const TailSeq x({1.0}, TailRule::constant(1.0));
  EXPECT_NEAR(evaluate(f, x), 3.0, 1e-12);
}

TEST(FuncExpr, ConvexityFlags) {
  EXPECT_TRUE(FuncExpr::norm_one({0, 1}).is_convex());
  EXPECT_TRUE(FuncExpr::square(FuncExpr::affine({1.0, -1.0})).is_convex());
  EXPECT_TRUE(FuncExpr::limsup_abs().is_convex());
  EXPECT_FALSE(FuncExpr::atan_sq_affine({1.0}).is_convex());
  EXPECT_FALSE(FuncExpr::scale(-1.0, FuncExpr::abs(FuncExpr::coord(0))).is_convex());
  EXPECT_TRUE(FuncExpr::square(FuncExpr::abs(FuncExpr::affine({1.0}, -1.0))).is_convex());
  EXPECT_FALSE(FuncExpr::square(FuncExpr::sum({FuncExpr::abs(FuncExpr::coord(0)), FuncExpr::constant(-1.0)})).is_convex());
  EXPECT_TRUE(FuncExpr::max({FuncExpr::coord(0), FuncExpr::norm_two_sq({1})}).is_convex());
}

TEST(FuncExpr, IndexMetadata) {
  EXPECT_EQ(FuncExpr::norm_one({0, 7}).max_index(), std::optional<std::size_t>(7));
  EXPECT_FALSE(FuncExpr::limsup_abs().max_index().has_value());
  EXPECT_TRUE(FuncExpr::limsup_abs().reads_tail());
  EXPECT_FALSE(FuncExpr::coord(3).reads_tail());
}

// Midpoint convexity on sampled pairs for every expression flagged convex.
TEST(FuncExpr, ConvexFlagIsSound) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int e = 0; e < 300; ++e) {
    const FuncExpr f = oracle::random_expr(rng, 3, 3, false);
    if (!f.is_convex()) continue;
    ++checked;
    for (int p = 0; p < 50; ++p) {
      const TailSeq x(oracle::uniform_vector(rng, 3, -2.0, 2.0), TailRule::geometric(0.3, 0.5));
      const TailSeq y(oracle::uniform_vector(rng, 3, -2.0, 2.0), TailRule::geometric(-0.7, 0.5));
      const double mid = evaluate(f, 0.5 * (x + y));
      EXPECT_LE(mid, 0.5 * (evaluate(f, x) + evaluate(f, y)) + 1e-12);
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(FuncExpr, NonConvexLeafIsDetectedBySampling) {
  // atan(x)^2 is not convex on [1, 3]: the midpoint lies above the chord.
  const FuncExpr f = FuncExpr::atan_sq_affine({1.0});
  const TailSeq x({1.0}), y({3.0});
  EXPECT_GT(evaluate(f, 0.5 * (x + y)), 0.5 * (evaluate(f, x) + evaluate(f, y)));
}
