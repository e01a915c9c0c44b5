#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dinicert/tail_seq.hpp"

using namespace dinicert;

TEST(TailRule, KindsAndEntries) {
  EXPECT_EQ(TailRule::zero().kind(), TailRule::Kind::Zero);
  EXPECT_EQ(TailRule::constant(2.0).kind(), TailRule::Kind::Constant);
  const TailRule g = TailRule::geometric(3.0, 0.5);
  EXPECT_EQ(g.kind(), TailRule::Kind::Geometric);
  EXPECT_DOUBLE_EQ(g.at(0), 3.0);
  EXPECT_DOUBLE_EQ(g.at(3), 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(g.limit(), 0.0);
}

TEST(TailRule, GeometricRatioMustBeBelowOne) {
  EXPECT_THROW(TailRule::geometric(1.0, 1.0), InvariantError);
  EXPECT_THROW(TailRule::geometric(1.0, -1.5), InvariantError);
  EXPECT_THROW(TailRule::geometric(std::nan(""), 0.5), InvariantError);
}

TEST(TailRule, ClosedFormsMatchBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = U(rng) * 4.0, q = U(rng) * 0.95;
    const TailRule t = TailRule::geometric(a, q);
    double sum = 0.0, sup = 0.0, inf = INFINITY;
    for (std::size_t k = 0; k < 2000; ++k) {
      sum += t.at(k);
      sup = std::max(sup, std::abs(t.at(k)));
      inf = std::min(inf, t.at(k));
    }
    inf = std::min(inf, 0.0);  // the limit is approached, never passed
    EXPECT_NEAR(t.series_sum(), sum, 1e-9 * (1 + std::abs(sum)));
    EXPECT_NEAR(t.sup_abs(), sup, 1e-12);
    EXPECT_NEAR(t.inf_value(), inf, 1e-12);
    EXPECT_NEAR(t.advanced(5).at(2), t.at(7), 1e-15);
  }
}

TEST(TailRule, ConstantSeriesDiverges) {
  EXPECT_THROW(TailRule::constant(0.1).series_sum(), InvariantError);
  EXPECT_DOUBLE_EQ(TailRule::constant(0.0).series_sum(), 0.0);
}

TEST(TailRule, SumOfConstantAndGeometricIsShifted) {
  const TailRule s = TailRule::constant(1.0) + TailRule::geometric(2.0, 0.25);
  EXPECT_EQ(s.kind(), TailRule::Kind::ShiftedGeometric);
  EXPECT_DOUBLE_EQ(s.at(1), 1.5);
  EXPECT_DOUBLE_EQ(s.limit(), 1.0);
  EXPECT_THROW(TailRule::geometric(1.0, 0.5) + TailRule::geometric(1.0, 0.25), InvariantError);
}

TEST(TailSeq, EntriesNormsAndArithmetic) {
  const TailSeq x({1.0, -2.0}, TailRule::geometric(0.5, 0.5));
  EXPECT_DOUBLE_EQ(x.at(1), -2.0);
  EXPECT_DOUBLE_EQ(x.at(2), 0.5);
  EXPECT_DOUBLE_EQ(x.at(4), 0.125);
  EXPECT_DOUBLE_EQ(x.sup_norm(), 2.0);
  EXPECT_DOUBLE_EQ(x.limsup_abs(), 0.0);

  const TailSeq c({0.0}, TailRule::constant(-3.0));
  EXPECT_DOUBLE_EQ(c.limsup_abs(), 3.0);
  EXPECT_DOUBLE_EQ(c.sup_norm(), 3.0);

  const TailSeq y = x + 2.0 * TailSeq::basis(3, 2);
  EXPECT_DOUBLE_EQ(y.at(2), 2.5);
  EXPECT_DOUBLE_EQ(y.at(3), 0.25);
  EXPECT_EQ((y - y).sup_norm(), 0.0);
}

TEST(TailSeq, ExtendedKeepsTheSequence) {
  const TailSeq x({1.0}, TailRule::geometric(1.0, 0.5));
  const TailSeq e = x.extended(6);
  EXPECT_EQ(e.head_size(), 6u);
  for (std::size_t n = 0; n < 20; ++n) EXPECT_DOUBLE_EQ(e.at(n), x.at(n)) << n;
}

TEST(TailSeq, WithHeadReplacesPrefix) {
  const TailSeq x({1.0, 2.0, 3.0}, TailRule::constant(4.0));
  const Vector h{9.0};
  const TailSeq y = x.with_head(h);
  EXPECT_DOUBLE_EQ(y.at(0), 9.0);
  EXPECT_DOUBLE_EQ(y.at(1), 2.0);
  EXPECT_DOUBLE_EQ(y.at(10), 4.0);
}

TEST(TailSeq, RejectsNonFiniteHead) {
  EXPECT_THROW(TailSeq({1.0, std::nan("")}), InvariantError);
}

TEST(TailSeq, AxpyMatchesOperators) {
  const TailSeq x({1.0, 2.0}, TailRule::geometric(1.0, 0.5));
  const TailSeq u({0.5}, TailRule::geometric(-2.0, 0.5));
  const TailSeq a = axpy(x, 0.25, u);
  const TailSeq b = x + 0.25 * u;
  for (std::size_t n = 0; n < 12; ++n) EXPECT_DOUBLE_EQ(a.at(n), b.at(n));
}
