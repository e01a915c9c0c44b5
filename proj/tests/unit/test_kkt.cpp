#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dinicert/calculus.hpp"
#include "dinicert/kkt.hpp"
#include "dinicert/problems.hpp"
#include "oracles.hpp"

using namespace dinicert;

namespace {

MultiplierCertificate beta_cert(Vector alphas, double alpha_inf = 0.0, TailRule tail = {}) {
  MultiplierCertificate c;
  c.alphas = std::move(alphas);
  c.alpha_inf = alpha_inf;
  c.tail = tail;
  c.mode = MultiplierCertificate::Mode::BetaNormalized;
  return c;
}

// min x0^2 + x1^2 subject to x0 + x1 + 1 <= 0: optimum (-1/2, -1/2), beta = 1.
ProblemSpec smooth_problem() {
  ProblemSpec p;
  p.domain = Domain::ball(TailSeq::zeros(2), 2.0);
  p.objective = FuncExpr::norm_two_sq({0, 1});
  p.family = ConstraintFamily::from_list({FuncExpr::affine({1.0, 1.0}, 1.0)});
  return p;
}

}  // namespace

TEST(Verify, Example2GroundTruthMatchesClosedForm) {
  for (std::size_t N : {0, 1, 2, 5}) {
    const auto inst = example2(N);
    const auto truth = oracle::example2_truth(N);
    EXPECT_EQ(inst.xhat->head(), truth.xhat);
    for (std::size_t n = 0; n <= N + 1; ++n) EXPECT_NEAR(inst.cert->at(n), truth.beta[n], 1e-15);

    const auto rep = verify_kkt_certificate(inst.spec, TailSeq(truth.xhat), beta_cert(truth.beta));
    EXPECT_TRUE(rep.certified()) << N << ": " << rep.reason;
    for (double s : rep.slackness) EXPECT_LE(s, 1e-12);
    for (double s : rep.stationarity) EXPECT_GE(s, -1e-9);
    EXPECT_EQ(rep.stationarity.size(), 2 * (2 * N + 2) + 128);
  }
}

TEST(Verify, Example1GroundTruthAcrossTruncations) {
  for (std::size_t M : {4, 8, 16, 24}) {
    const auto inst = example1(M);
    const auto rep = verify_kkt_certificate(inst.spec, *inst.xhat, *inst.cert);
    EXPECT_TRUE(rep.certified()) << M << ": " << rep.reason;
  }
}

TEST(Verify, Example1StationaritySumIsTwiceTheSeminormDerivative) {
  const auto inst = example1(16);
  const auto& x = *inst.xhat;
  const auto& fam = inst.spec.family;
  const FuncExpr p = FuncExpr::limsup_abs();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const TailSeq u(oracle::uniform_vector(rng, 17, -1.0, 1.0), TailRule::constant(k % 3 - 1.0));
    double s = dir_deriv_exact(inst.spec.objective, x, u);
    for (std::size_t n = 1; n <= 200; ++n) s += std::exp2(-static_cast<double>(n)) * dir_deriv_exact(fam.at(n), x, u);
    EXPECT_NEAR(s, 2.0 * dir_deriv_exact(p, x, u), 1e-9) << k;
  }
}

TEST(Verify, HalfWeightOnTheLimitIsNotStationary) {
  const auto inst = example1(16);
  const auto rep = verify_kkt_certificate(inst.spec, *inst.xhat, example1_half_weight_certificate(16));
  EXPECT_EQ(rep.verdict, Verdict::Rejected);
  ASSERT_TRUE(rep.failed.has_value());
  EXPECT_EQ(*rep.failed, Condition::Stationarity);
  // Along e_0 the weighted sum is -beta_inf.
  EXPECT_NEAR(rep.find(Condition::Stationarity)->worst, -0.5, 1e-9);
}

TEST(Verify, MutationsNameTheFailedCondition) {
  const auto inst = example2(2);
  const auto& x = *inst.xhat;

  auto beta = *inst.cert;
  beta.alphas[2] += 5e-3;
  EXPECT_EQ(verify_kkt_certificate(inst.spec, x, beta).failed, Condition::Stationarity);

  auto norm = *inst.cert;
  norm.alphas[0] = 1.004;
  EXPECT_EQ(verify_kkt_certificate(inst.spec, x, norm).failed, Condition::Normalization);

  auto neg = *inst.cert;
  neg.alpha_inf = -2e-3;
  EXPECT_EQ(verify_kkt_certificate(inst.spec, x, neg).failed, Condition::Nonnegativity);

  Vector h = x.head();
  h[2] += 3e-3;
  EXPECT_EQ(verify_kkt_certificate(inst.spec, TailSeq(h), *inst.cert).failed,
            Condition::ComplementarySlackness);

  h = x.head();
  h[0] = 1.5;
  EXPECT_EQ(verify_kkt_certificate(inst.spec, TailSeq(h), *inst.cert).failed, Condition::Domain);
}

TEST(Verify, InfeasiblePointWithZeroMultiplier) {
  // The constraint is violated but carries no weight: feasibility catches it.
  const ProblemSpec p = smooth_problem();
  const auto rep = verify_kkt_certificate(p, TailSeq({0.0, 0.0}), beta_cert({1.0, 0.0}));
  EXPECT_EQ(rep.failed, Condition::Feasibility);
}

TEST(Verify, SimplexAndBetaFormsAgree) {
  for (const auto& inst : {example2(3), example1(8)}) {
    const auto simplex = to_simplex(*inst.cert);
    EXPECT_NEAR(sum_certificate(simplex), 1.0, 1e-12);
    const auto a = verify_kkt_certificate(inst.spec, *inst.xhat, *inst.cert);
    const auto b = verify_kkt_certificate(inst.spec, *inst.xhat, simplex);
    const auto c = verify_kkt_certificate(inst.spec, *inst.xhat, to_beta(simplex));
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.verdict, c.verdict);
  }
}

TEST(Verify, OptionalChecks) {
  const ProblemSpec p = smooth_problem();
  KktConfig cfg;
  cfg.check_slater = true;
  cfg.check_gateaux = true;
  const auto rep = verify_kkt_certificate(p, TailSeq({-0.5, -0.5}), beta_cert({1.0, 1.0}), cfg);
  EXPECT_TRUE(rep.certified()) << rep.reason;
  ASSERT_NE(rep.find(Condition::GateauxEquality), nullptr);
  ASSERT_NE(rep.find(Condition::Slater), nullptr);
}

TEST(Find, RecoversExample2Multipliers) {
  for (std::size_t N : {0, 1, 4}) {
    const auto inst = example2(N);
    const auto s = find_kkt_certificate(inst.spec, *inst.xhat);
    ASSERT_TRUE(s.found()) << N << ": " << s.failure;
    const auto beta = to_beta(*s.cert);
    const auto truth = oracle::example2_truth(N);
    for (std::size_t n = 0; n <= N + 1; ++n) EXPECT_NEAR(beta.at(n), truth.beta[n], 1e-6) << N;
    EXPECT_EQ(s.active.size(), N + 1);
  }
}

TEST(Find, RecoversExample1Multipliers) {
  const auto inst = example1(8);
  const auto s = find_kkt_certificate(inst.spec, *inst.xhat);
  ASSERT_TRUE(s.found()) << s.failure;
  const auto beta = to_beta(*s.cert);
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_NEAR(beta.at(n), std::exp2(-static_cast<double>(n)), 1e-6);
}

TEST(Find, ReportsNonStationaryPoint) {
  const auto inst = example2(1);
  const auto s = find_kkt_certificate(inst.spec, TailSeq({-0.3, 0.0, -0.2, 0.0}));
  EXPECT_FALSE(s.found());
  EXPECT_FALSE(s.failure.empty());
}

TEST(Slater, PublishedDirections) {
  const auto e1 = example1(16);
  EXPECT_LE(slater_margin(e1.spec, *e1.xhat, TailSeq::basis(17, 0)), -1.0 + 1e-9);
  const auto e2 = example2(5);
  EXPECT_LT(slater_margin(e2.spec, *e2.xhat, TailSeq(Vector(12, -1.0))), 0.0);
  const auto found = slater_direction(e1.spec, *e1.xhat);
  ASSERT_TRUE(found.has_value());
  EXPECT_LT(found->margin, 0.0);
  EXPECT_NEAR(found->w.sup_norm(), 1.0, 1e-12);
}

TEST(Invexity, ConvexFunctionsWithIdentityKernel) {
  const auto inst = example2(2);
  std::vector<FuncExpr> fs{inst.spec.objective};
  for (const auto& f : inst.spec.family.truncated()) fs.push_back(f);
  std::mt19937_64 rng(6);
  std::vector<TailSeq> samples;
  for (int i = 0; i < 200; ++i) samples.emplace_back(oracle::uniform_vector(rng, 6, -0.9, 0.9));
  EXPECT_TRUE(invexity_check(fs, *inst.xhat, {}, samples).empty());

  const FuncExpr bumpy = FuncExpr::atan_sq_affine({1.0});
  const auto bad = invexity_check({bumpy}, TailSeq({1.0}), {}, {TailSeq({3.0}), TailSeq({-1.0})});
  EXPECT_FALSE(bad.empty());
}

TEST(Sufficiency, ConvexCertificates) {
  const auto e2 = example2(3);
  EXPECT_TRUE(sufficiency_check_convex(e2.spec, *e2.xhat, *e2.cert).sufficient);
  const auto e1 = example1(8);
  EXPECT_TRUE(sufficiency_check_convex(e1.spec, *e1.xhat, *e1.cert).sufficient);
  EXPECT_FALSE(sufficiency_check_convex(e1.spec, *e1.xhat, example1_half_weight_certificate(8)).sufficient);
}

TEST(Solve, Example2FromRandomStarts) {
  const auto inst = example2(3);
  const auto r = solve_truncated(inst.spec);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(r.head[i], inst.xhat->at(i), 1e-4) << i;
  EXPECT_LE(r.max_violation, 1e-6);
}

TEST(Solve, Example1IsUnique) {
  const auto inst = example1(16);
  SolveConfig cfg;
  cfg.seed = 5;
  const auto r = solve_truncated(inst.spec, cfg);
  for (std::size_t i = 0; i <= 16; ++i) EXPECT_NEAR(r.head[i], inst.xhat->at(i), 1e-3) << i;
}

TEST(Solve, RandomInstanceAgainstGridSearch) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = random_convex_instance(seed, 2, 2);
    const auto r = solve_truncated(inst.spec);
    // Dense grid over the feasible part of the search box.
    const Vector lo = inst.spec.domain.search_lo(), hi = inst.spec.domain.search_hi();
    double best = INFINITY;
    for (int i = 0; i <= 600; ++i) {
      for (int j = 0; j <= 600; ++j) {
        const TailSeq x({lo[0] + (hi[0] - lo[0]) * i / 600.0, lo[1] + (hi[1] - lo[1]) * j / 600.0});
        bool ok = true;
        for (const auto& f : inst.spec.family.truncated()) ok = ok && evaluate(f, x) <= 0.0;
        if (ok) best = std::min(best, evaluate(inst.spec.objective, x));
      }
    }
    EXPECT_LE(r.objective, best + 1e-9) << seed;
    EXPECT_GE(r.objective, best - 0.05) << seed;

    KktConfig kc = KktConfig::for_solver_output();
    const auto s = find_kkt_certificate(inst.spec, r.point, kc);
    EXPECT_TRUE(s.found()) << seed << ": " << s.failure;
  }
}

TEST(Solve, UnconstrainedCertificateIsObjectiveOnly) {
  const auto inst = random_convex_instance(4, 2, 0);
  const auto r = solve_truncated(inst.spec);
  const auto s = find_kkt_certificate(inst.spec, r.point, KktConfig::for_solver_output());
  ASSERT_TRUE(s.found()) << s.failure;
  EXPECT_DOUBLE_EQ(s.cert->alphas[0], 1.0);
  EXPECT_DOUBLE_EQ(s.cert->alpha_inf, 0.0);
}
