#include "dinicert/problems.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "dinicert/family.hpp"

namespace dinicert {

Instance example1(std::size_t M) {
  if (M < 2) throw InvariantError("example1 needs M >= 2");
  const std::size_t dim = M + 1;
  const auto p = FuncExpr::limsup_abs();

  Vector c(dim);
  c[0] = 1.0;
  for (std::size_t n = 1; n <= M; ++n) c[n] = -2.0 * std::exp2(-3.0 * static_cast<double>(n));
  const TailRule ctail = TailRule::geometric(-2.0 * std::exp2(-3.0 * static_cast<double>(M + 1)), 0.125);
  const FuncExpr f0 = FuncExpr::sum({p, FuncExpr::affine(c, 0.0, ctail)});

  const ExprTemplate gen = ExprTemplate::sum({
      ExprTemplate::scale(Coef::pow2(-1.0), ExprTemplate::square(ExprTemplate::coord({1, 0}))),
      ExprTemplate::limsup_abs(),
      ExprTemplate::affine({{{0, 0}, Coef(-1.0)}}, Coef::mul({Coef(-1.0), Coef::pow2(-3.0)})),
  });
  const FuncExpr limit = FuncExpr::sum({p, FuncExpr::affine({-1.0})});

  Instance inst;
  inst.name = "example1:M=" + std::to_string(M);
  inst.spec.domain = Domain::ball(TailSeq::zeros(dim), 1.0);
  inst.spec.objective = f0;
  inst.spec.family = ConstraintFamily::from_template(gen, limit, M);

  Vector head(dim, 0.0);
  for (std::size_t n = 1; n <= M; ++n) head[n] = std::exp2(-static_cast<double>(n));
  const TailRule half = TailRule::geometric(std::exp2(-static_cast<double>(M + 1)), 0.5);
  inst.xhat = TailSeq(head, half);

  MultiplierCertificate cert;
  cert.mode = MultiplierCertificate::Mode::BetaNormalized;
  cert.alpha_inf = 0.0;
  cert.alphas = head;
  cert.alphas[0] = 1.0;
  cert.tail = half;
  inst.cert = cert;

  inst.slater_hint = TailSeq::basis(dim, 0);
  return inst;
}

MultiplierCertificate example1_half_weight_certificate(std::size_t M) {
  MultiplierCertificate cert = *example1(M).cert;
  cert.alpha_inf = 0.5;
  return cert;
}

Instance example2(std::size_t N) {
  const std::size_t dim = 2 * N + 2;
  std::vector<std::size_t> evens, odds;
  for (std::size_t n = 0; n <= N; ++n) {
    evens.push_back(2 * n);
    odds.push_back(2 * n + 1);
  }
  const FuncExpr f0 = FuncExpr::sum({FuncExpr::norm_two_sq(evens), FuncExpr::norm_one(odds),
                                     FuncExpr::affine(Vector(dim, -1.0))});
  // f_m = (m + 1) x_{2m-2} + m x_{2m-1} + 1 for m = n + 1.
  const ExprTemplate gen = ExprTemplate::affine(
      {{{2, -2}, Coef::poly({1.0, 1.0})}, {{2, -1}, Coef::poly({0.0, 1.0})}}, Coef(1.0));
  const std::size_t M = N + 1;

  Instance inst;
  inst.name = "example2:N=" + std::to_string(N);
  inst.spec.domain = Domain::ball(TailSeq::zeros(dim), 1.0);
  inst.spec.objective = f0;
  inst.spec.family = ConstraintFamily::from_template(gen, gen.instantiate(static_cast<long>(M)), M, M);

  Vector head(dim, 0.0);
  MultiplierCertificate cert;
  cert.mode = MultiplierCertificate::Mode::BetaNormalized;
  cert.alphas.assign(M + 1, 0.0);
  cert.alphas[0] = 1.0;
  for (std::size_t n = 0; n <= N; ++n) {
    const double k = static_cast<double>(n + 2);
    head[2 * n] = -1.0 / k;
    cert.alphas[n + 1] = (1.0 / k) * (1.0 + 2.0 / k);
  }
  inst.xhat = TailSeq(head);
  inst.cert = cert;
  inst.slater_hint = TailSeq(Vector(dim, -1.0));
  return inst;
}

Instance random_convex_instance(std::uint64_t seed, std::size_t d, std::size_t m) {
  if (d == 0) throw InvariantError("random instance needs d >= 1");
  std::mt19937_64 rng(seed);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  std::vector<FuncExpr> terms;
  for (std::size_t i = 0; i < d; ++i) {
    terms.push_back(FuncExpr::scale(U(0.5, 2.0), FuncExpr::square(FuncExpr::coord(i))));
  }
  std::vector<std::size_t> block;
  for (std::size_t i = 0; i < d; ++i) {
    if (U(0.0, 1.0) < 0.5) block.push_back(i);
  }
  if (!block.empty()) terms.push_back(FuncExpr::scale(U(0.0, 1.0), FuncExpr::norm_one(block)));
  Vector c(d);
  for (double& v : c) v = U(-0.5, 0.5);
  terms.push_back(FuncExpr::affine(c));

  Vector x0(d);
  for (double& v : x0) v = U(-0.5, 0.5);
  std::vector<FuncExpr> cons;
  for (std::size_t j = 0; j < m; ++j) {
    Vector a(d);
    double ax = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = U(-1.0, 1.0);
      ax += a[i] * x0[i];
    }
    cons.push_back(FuncExpr::affine(a, -ax - U(0.1, 0.5)));
  }

  Instance inst;
  inst.name = "random:seed=" + std::to_string(seed) + ",d=" + std::to_string(d) +
              ",m=" + std::to_string(m);
  inst.spec.domain = Domain::ball(TailSeq::zeros(d), 3.0);
  inst.spec.objective = FuncExpr::sum(terms);
  if (m > 0) inst.spec.family = ConstraintFamily::from_list(cons);
  return inst;
}

Instance builtin(const std::string& name) {
  const auto colon = name.find(':');
  const std::string kind = name.substr(0, colon);
  std::map<std::string, long> kv;
  if (colon != std::string::npos) {
    std::string rest = name.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + item + "'");
      try {
        std::size_t used = 0;
        const std::string val = item.substr(eq + 1);
        const long v = std::stol(val, &used);
        if (used != val.size() || v < 0) throw std::invalid_argument(val);
        kv[item.substr(0, eq)] = v;
      } catch (const std::exception&) {
        throw std::invalid_argument("bad integer in '" + item + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  auto get = [&](const std::string& key, long def) {
    const auto it = kv.find(key);
    const long v = it == kv.end() ? def : it->second;
    kv.erase(key);
    return static_cast<std::size_t>(v);
  };
  auto done = [&] {
    if (!kv.empty()) throw std::invalid_argument("unknown key '" + kv.begin()->first + "' for " + kind);
  };
  if (kind == "example1") {
    const std::size_t M = get("M", 16);
    done();
    return example1(M);
  }
  if (kind == "example2") {
    const std::size_t N = get("N", 0);
    done();
    return example2(N);
  }
  if (kind == "random") {
    const std::size_t seed = get("seed", 1), d = get("d", 2), m = get("m", 2);
    done();
    return random_convex_instance(seed, d, m);
  }
  throw std::invalid_argument("unknown builtin '" + kind + "'");
}

}  // namespace dinicert
