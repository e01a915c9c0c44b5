// One PASS/FAIL line per acceptance criterion. `--criterion N` runs only N;
// the exit status is nonzero when any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <variant>

#include "dinicert/alternative.hpp"
#include "dinicert/calculus.hpp"
#include "dinicert/kkt.hpp"
#include "dinicert/problems.hpp"
#include "dinicert/property_h.hpp"
#include "oracles.hpp"

using namespace dinicert;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string note;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.note = why;
  o.pass = false;
}

MultiplierCertificate beta_cert(const Vector& beta) {
  MultiplierCertificate c;
  c.mode = MultiplierCertificate::Mode::BetaNormalized;
  c.alphas = beta;
  return c;
}

// 1. Closed-form optimum of the (2N+2)-dimensional example is certified.
Outcome criterion1() {
  Outcome o;
  double worst_slack = 0.0, worst_stat = INFINITY, worst_time = 0.0;
  for (std::size_t N : {0, 1, 2, 5, 10}) {
    const auto t0 = Clock::now();
    const auto truth = oracle::example2_truth(N);
    const auto inst = example2(N);
    const auto rep = verify_kkt_certificate(inst.spec, TailSeq(truth.xhat), beta_cert(truth.beta));
    const double dt = seconds_since(t0);
    worst_time = std::max(worst_time, dt);
    if (!rep.certified()) fail(o, "N=" + std::to_string(N) + " rejected: " + rep.reason);
    for (double s : rep.slackness) worst_slack = std::max(worst_slack, std::abs(s));
    for (double s : rep.stationarity) worst_stat = std::min(worst_stat, s);
    if (rep.stationarity.size() < 2 * inst.spec.dim() + 128) fail(o, "too few directions");
    if (dt >= 1.0) fail(o, "N=" + std::to_string(N) + " took " + std::to_string(dt) + " s");
  }
  if (worst_slack > 1e-12) fail(o, "slackness residual");
  if (worst_stat < -1e-9) fail(o, "stationarity residual");
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |slack| %.3g, min stationarity %.3g, max time %.3f s", worst_slack,
                worst_stat, worst_time);
  if (o.pass) o.note = buf;
  return o;
}

// 2. Solve from random starts, then search for multipliers at the result.
Outcome criterion2() {
  Outcome o;
  const std::size_t N = 10;
  const auto t0 = Clock::now();
  const auto truth = oracle::example2_truth(N);
  const auto inst = example2(N);
  SolveConfig sc;
  sc.starts = 32;
  const auto sol = solve_truncated(inst.spec, sc);
  double xerr = 0.0;
  for (std::size_t i = 0; i < truth.xhat.size(); ++i) xerr = std::max(xerr, std::abs(sol.head[i] - truth.xhat[i]));
  if (xerr > 1e-4) fail(o, "point error " + std::to_string(xerr));

  auto search = find_kkt_certificate(inst.spec, sol.point, KktConfig::for_solver_output());
  if (!search.cert) search = find_kkt_certificate(inst.spec, sol.point);
  double berr = INFINITY;
  if (!search.cert) {
    fail(o, "no certificate found: " + search.failure);
  } else {
    const auto beta = to_beta(*search.cert);
    berr = 0.0;
    for (std::size_t n = 0; n < truth.beta.size(); ++n) berr = std::max(berr, std::abs(beta.at(n) - truth.beta[n]));
    if (berr > 1e-6) fail(o, "multiplier error " + std::to_string(berr));
  }
  const double dt = seconds_since(t0);
  if (dt >= 30.0) fail(o, "took " + std::to_string(dt) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |x - xhat| %.3g, max |beta error| %.3g, %.2f s", xerr, berr, dt);
  if (o.pass) o.note = buf;
  return o;
}

// 3. Half-weight certificate on the M=16 example, checked literally. Its
// stationarity sum is (2 + 1/2) limsup|u| - u_0 / 2, which is negative along
// e_0, so this criterion is expected to fail. The sub-results printed below
// check the identity with the limit weight dropped and the decay bound.
Outcome criterion3() {
  Outcome o;
  const std::size_t M = 16;
  const auto t0 = Clock::now();
  const auto inst = example1(M);
  const auto half = example1_half_weight_certificate(M);
  const auto rep = verify_kkt_certificate(inst.spec, *inst.xhat, half);
  if (!rep.certified()) {
    const auto* st = rep.find(Condition::Stationarity);
    fail(o, "half-weight certificate rejected at " + (rep.failed ? to_string(*rep.failed) : std::string("?")) +
                (st ? " (worst " + std::to_string(st->worst) + ")" : std::string()));
  }

  // Identity: stationarity sum of the zero-limit-weight certificate equals 2 d+p(xhat)(u).
  const auto& fam = inst.spec.family;
  const auto p = FuncExpr::limsup_abs();
  const auto dirs = sample_directions(inst.spec.dim(), 128, 1);
  double ident = 0.0;
  for (const auto& u : dirs) {
    double s = dir_deriv_exact(inst.spec.objective, *inst.xhat, u);
    for (std::size_t n = 1; n <= 200; ++n) s += inst.cert->at(n) * dir_deriv_exact(fam.at(n), *inst.xhat, u);
    ident = std::max(ident, std::abs(s - 2.0 * dir_deriv_exact(p, *inst.xhat, u)));
  }
  std::vector<std::size_t> sched;
  for (std::size_t n = 2; n <= M; n += 2) sched.push_back(n);
  const auto ph = check_property_h(fam, *inst.xhat, 0.5, sched);
  double decay_excess = -INFINITY;
  for (const auto& e : ph.decay) {
    decay_excess = std::max(decay_excess, e.seminorm - std::exp2(1.0 - static_cast<double>(e.n)));
  }
  const double dt = seconds_since(t0);
  std::printf("  3a identity residual (limit weight 0): %.3g %s\n", ident, ident <= 1e-9 ? "ok" : "BAD");
  std::printf("  3b decay table minus 2^(1-n), max: %.3g %s\n", decay_excess, decay_excess <= 0.0 ? "ok" : "BAD");
  std::printf("  3c runtime %.2f s %s\n", dt, dt < 5.0 ? "ok" : "BAD");
  if (ident > 1e-9) fail(o, "identity residual");
  if (decay_excess > 0.0) fail(o, "decay bound");
  if (dt >= 5.0) fail(o, "runtime");
  return o;
}

// 4. Seeded perturbations of the ground truths must be rejected with the
// condition they break named.
Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4);
  auto delta = [&] {
    const double d = std::uniform_real_distribution<double>(1e-3, 1e-2)(rng);
    return (rng() & 1) ? d : -d;
  };
  int rejected = 0, total = 0;
  auto expect = [&](const CertificateReport& rep, Condition c, const std::string& what) {
    ++total;
    if (rep.verdict == Verdict::Rejected && rep.failed == c) {
      ++rejected;
    } else {
      fail(o, what + ": expected " + to_string(c) + ", got " +
                  (rep.failed ? to_string(*rep.failed) : std::string("none")));
    }
  };

  const std::size_t N = 5;
  const auto e2 = example2(N);
  for (int k = 0; k < 20; ++k) {
    const int kind = k % 3;
    if (kind == 0) {
      auto c = *e2.cert;
      c.alphas[1 + rng() % (N + 1)] += delta();
      expect(verify_kkt_certificate(e2.spec, *e2.xhat, c), Condition::Stationarity, "example2 beta");
    } else if (kind == 1) {
      auto c = *e2.cert;
      c.alphas[0] += delta();
      expect(verify_kkt_certificate(e2.spec, *e2.xhat, c), Condition::Normalization, "example2 alpha0");
    } else {
      Vector h = e2.xhat->head();
      h[2 * (rng() % (N + 1))] += delta();
      expect(verify_kkt_certificate(e2.spec, TailSeq(h), *e2.cert), Condition::ComplementarySlackness,
             "example2 point");
    }
  }

  const std::size_t M = 16;
  const auto e1 = example1(M);
  for (int k = 0; k < 20; ++k) {
    const int kind = k % 3;
    const std::size_t n = 1 + rng() % 6;
    if (kind == 0) {
      auto c = *e1.cert;
      c.alphas[n] += delta();
      expect(verify_kkt_certificate(e1.spec, *e1.xhat, c), Condition::Stationarity, "example1 beta");
    } else if (kind == 1) {
      auto c = *e1.cert;
      c.alpha_inf = -std::abs(delta());
      expect(verify_kkt_certificate(e1.spec, *e1.xhat, c), Condition::Nonnegativity, "example1 limit weight");
    } else {
      Vector h = e1.xhat->head();
      h[n] += delta();
      expect(verify_kkt_certificate(e1.spec, e1.xhat->with_head(h), *e1.cert),
             Condition::ComplementarySlackness, "example1 point");
    }
  }
  if (o.pass) o.note = std::to_string(rejected) + "/" + std::to_string(total) + " rejected as expected";
  return o;
}

// 5. Exactly one branch on random convex systems, each cross-checked.
Outcome criterion5() {
  Outcome o;
  const auto t0 = Clock::now();
  int witnesses = 0, multipliers = 0;
  double worst = INFINITY;
  for (int s = 0; s < 200; ++s) {
    std::mt19937_64 rng(1000 + s);
    const std::size_t d = 1 + s % 3, m = 1 + (s / 3) % 3;
    const auto inst = random_convex_instance(static_cast<std::uint64_t>(s), d, m);
    auto sys = AlternativeSystem::from_problem(inst.spec);
    sys.funcs[0] = sys.funcs[0].shifted(std::uniform_real_distribution<double>(-2.0, 1.0)(rng));
    const auto out = solve_alternative(sys);
    if (const auto* w = std::get_if<Witness>(&out)) {
      ++witnesses;
      if (find_multipliers(sys, {w->point})) fail(o, "seed " + std::to_string(s) + ": witness cut is LP-feasible");
    } else if (const auto* mu = std::get_if<Multipliers>(&out)) {
      ++multipliers;
      Vector a = mu->cert.alphas;
      if (sys.limit) a.push_back(mu->cert.alpha_inf);
      const double g = oracle::grid_min(sys, a, 41);
      worst = std::min(worst, g);
      if (g < -2e-6) fail(o, "seed " + std::to_string(s) + ": grid audit " + std::to_string(g));
    } else {
      fail(o, "seed " + std::to_string(s) + " inconclusive: " + std::get<Inconclusive>(out).diagnostics);
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 120.0) fail(o, "took " + std::to_string(dt) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d witness, %d multipliers, worst grid value %.3g, %.2f s", witnesses,
                multipliers, worst, dt);
  if (o.pass) o.note = buf;
  return o;
}

// 6. Non-decreasing step functions on (0, 1]: the interchange of max and inf
// against the exact right limits at 0.
Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int grid = 200;
  Vector s(grid);
  for (int j = 0; j < grid; ++j) s[j] = static_cast<double>(j + 1) / grid;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vector> tables(2);
    double exact = -INFINITY;  // max_i lim_{s -> 0+} h_i(s)
    double cell = 0.0;         // variation over the first grid cell
    for (auto& t : tables) {
      const int jumps = 1 + static_cast<int>(rng() % 6);
      Vector at(jumps), size(jumps);
      for (int k = 0; k < jumps; ++k) {
        at[k] = U(rng);
        size[k] = U(rng);
      }
      const double base = 4.0 * U(rng) - 2.0;
      auto h = [&](double x) {
        double v = base;
        for (int k = 0; k < jumps; ++k) v += x > at[k] ? size[k] : 0.0;
        return v;
      };
      t.resize(grid);
      for (int j = 0; j < grid; ++j) t[j] = h(s[j]);
      exact = std::max(exact, base);
      cell = std::max(cell, t[0] - base);
    }
    const auto r = max_inf_interchange(tables);
    const double err = std::max(std::abs(r.max_of_infs - r.inf_of_maxes), std::abs(r.max_of_infs - exact));
    worst = std::max(worst, err - cell);
    if (std::abs(r.max_of_infs - r.inf_of_maxes) > 0.0 || std::abs(r.max_of_infs - exact) > cell) {
      fail(o, "trial " + std::to_string(trial));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "200 pairs, worst excess over cell variation %.3g", worst);
  if (o.pass) o.note = buf;
  return o;
}

// 7. Exact directional derivatives against the numeric estimator, and the
// subgradient inequality on convex pairs.
Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const FuncExpr f = oracle::random_expr(rng, 3, 3, false);
    const TailSeq x(oracle::uniform_vector(rng, 3, -1.0, 1.0), TailRule::geometric(0.2, 0.5));
    const TailSeq u(oracle::uniform_vector(rng, 3, -1.0, 1.0), TailRule::geometric(-0.4, 0.5));
    const double v = dir_deriv_exact(f, x, u);
    const double num = dini_upper_numeric(f, x, u).value;
    const double rel = std::abs(num - v) / (1.0 + std::abs(v));
    worst = std::max(worst, rel);
    if (rel > 1e-6) fail(o, "triple " + std::to_string(trial));
  }
  int pairs = 0;
  double excess = -INFINITY;
  while (pairs < 10000) {
    const FuncExpr f = oracle::random_expr(rng, 3, 2, true);
    for (int k = 0; k < 20; ++k, ++pairs) {
      const TailSeq x(oracle::uniform_vector(rng, 3, -1.0, 1.0));
      const TailSeq y(oracle::uniform_vector(rng, 3, -1.0, 1.0));
      const double e = evaluate(f, x) + dir_deriv_exact(f, x, y - x) - evaluate(f, y);
      excess = std::max(excess, e);
      if (e > 1e-12) fail(o, "subgradient inequality at pair " + std::to_string(pairs));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst relative gap %.3g, worst inequality excess %.3g over %d pairs", worst,
                excess, pairs);
  if (o.pass) o.note = buf;
  return o;
}

// 8. Stated Slater directions.
Outcome criterion8() {
  Outcome o;
  const auto e1 = example1(16);
  const double m1 = slater_margin(e1.spec, *e1.xhat, TailSeq::basis(e1.spec.dim(), 0));
  if (m1 > -1.0 + 1e-9) fail(o, "example1 margin " + std::to_string(m1));
  const auto e2 = example2(5);
  const double m2 = slater_margin(e2.spec, *e2.xhat, TailSeq(Vector(e2.spec.dim(), -1.0)));
  if (!(m2 < 0.0)) fail(o, "example2 margin " + std::to_string(m2));
  char buf[96];
  std::snprintf(buf, sizeof buf, "margins %.12g and %.12g", m1, m2);
  if (o.pass) o.note = buf;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 64;
    }
  }
  const std::function<Outcome()> all[] = {criterion1, criterion2, criterion3, criterion4,
                                          criterion5, criterion6, criterion7, criterion8};
  if (only < 0 || only > 8) {
    std::fprintf(stderr, "criterion must be 1..8\n");
    return 64;
  }
  int failures = 0;
  for (int c = 1; c <= 8; ++c) {
    if (only != 0 && c != only) continue;
    Outcome r;
    try {
      r = all[c - 1]();
    } catch (const std::exception& e) {
      r.pass = false;
      r.note = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s\n", r.pass ? "PASS" : "FAIL", c, r.note.c_str());
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
