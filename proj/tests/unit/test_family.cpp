#include <cmath>

#include <gtest/gtest.h>

#include "dinicert/family.hpp"
#include "dinicert/problems.hpp"

using namespace dinicert;

TEST(Coef, Forms) {
  EXPECT_DOUBLE_EQ(Coef(2.5).eval(7), 2.5);
  EXPECT_DOUBLE_EQ(Coef::poly({1.0, 2.0, 3.0}).eval(2), 1.0 + 4.0 + 12.0);
  EXPECT_DOUBLE_EQ(Coef::pow2(-3.0).eval(2), 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(Coef::pow2(1.0, 2.0).eval(1), 8.0);
  EXPECT_DOUBLE_EQ(Coef::recip(2.0).eval(3), 0.2);
  EXPECT_DOUBLE_EQ(Coef::add({Coef(1.0), Coef::recip(0.0)}).eval(4), 1.25);
  EXPECT_DOUBLE_EQ(Coef::mul({Coef(-1.0), Coef::pow2(-1.0)}).eval(3), -0.125);
  EXPECT_FALSE(Coef(3.0).depends_on_n());
  EXPECT_TRUE(Coef::mul({Coef(3.0), Coef::recip(1.0)}).depends_on_n());
}

TEST(IndexExpr, Evaluates) {
  EXPECT_EQ((IndexExpr{2, -2}).eval(3), 4u);
  EXPECT_EQ((IndexExpr{0, 5}).eval(9), 5u);
  EXPECT_THROW((IndexExpr{1, -3}).eval(1), EvaluationError);
}

TEST(ConstraintFamily, TemplateInstantiatesPerIndex) {
  // f_n = n x_n + 1
  const auto gen = ExprTemplate::affine({{{1, 0}, Coef::poly({0.0, 1.0})}}, Coef(1.0));
  const auto fam = ConstraintFamily::from_template(gen, FuncExpr::constant(1.0), 4);
  ASSERT_EQ(fam.truncated().size(), 4u);
  const TailSeq x(Vector(10, 0.5));
  for (std::size_t n = 1; n <= 8; ++n) {
    EXPECT_DOUBLE_EQ(evaluate(fam.at(n), x), 0.5 * static_cast<double>(n) + 1.0) << n;
  }
  EXPECT_DOUBLE_EQ(evaluate(fam.truncated()[2], x), evaluate(fam.at(3), x));
  EXPECT_FALSE(fam.exact_at_truncation());
}

TEST(ConstraintFamily, StationaryTemplateIsExactAtTruncation) {
  const auto inst = example2(3);
  const auto& fam = inst.spec.family;
  EXPECT_EQ(fam.truncation(), 4u);
  EXPECT_TRUE(fam.exact_at_truncation());
  const TailSeq x(Vector(8, 0.3));
  EXPECT_DOUBLE_EQ(evaluate(fam.at(9), x), evaluate(*fam.limit(), x));
  EXPECT_DOUBLE_EQ(evaluate(fam.at(4), x), evaluate(*fam.limit(), x));
}

TEST(ConstraintFamily, ListIsStationaryAfterLastEntry) {
  const auto fam = ConstraintFamily::from_list({FuncExpr::coord(0), FuncExpr::coord(1)});
  const TailSeq x({3.0, 4.0});
  EXPECT_EQ(fam.truncation(), 2u);
  EXPECT_DOUBLE_EQ(evaluate(fam.at(1), x), 3.0);
  EXPECT_DOUBLE_EQ(evaluate(fam.at(5), x), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(*fam.limit(), x), 4.0);
  EXPECT_TRUE(fam.exact_at_truncation());
}

TEST(ConstraintFamily, WithTruncationKeepsTheSequence) {
  const auto fam = example1(8).spec.family;
  const auto wider = fam.with_truncation(12);
  EXPECT_EQ(wider.truncation(), 12u);
  const TailSeq x(Vector(14, 0.25), TailRule::geometric(0.1, 0.5));
  for (std::size_t n = 1; n <= 12; ++n) {
    EXPECT_DOUBLE_EQ(evaluate(wider.truncated()[n - 1], x), evaluate(fam.at(n), x));
  }
}

TEST(ConstraintFamily, EmptyFamily) {
  const ConstraintFamily fam;
  EXPECT_TRUE(fam.empty());
  EXPECT_TRUE(fam.all_convex());
  EXPECT_TRUE(fam.truncated().empty());
}
