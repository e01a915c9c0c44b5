#include "dinicert/alternative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dinicert/calculus.hpp"

namespace dinicert {

ConvexFunction ConvexFunction::from_expr(FuncExpr f) {
  ConvexFunction c;
  c.convex = f.is_convex();
  c.value = [f](const TailSeq& x) { return evaluate(f, x); };
  c.subgradient = [f](const TailSeq& x, std::size_t dim) { return dinicert::subgradient(f, x, dim); };
  return c;
}

ConvexFunction ConvexFunction::directional(FuncExpr f, TailSeq xhat, double shift, double kink_tol) {
  ConvexFunction c;
  c.convex = f.is_convex();
  c.value = [f, xhat, shift, kink_tol](const TailSeq& u) {
    return dir_deriv_exact(f, xhat, u, kink_tol) + shift;
  };
  c.subgradient = [f, xhat, kink_tol](const TailSeq& u, std::size_t dim) {
    return dir_deriv_subgradient(f, xhat, u, dim, kink_tol);
  };
  return c;
}

ConvexFunction ConvexFunction::shifted(double shift) const {
  ConvexFunction c = *this;
  auto v = value;
  c.value = [v, shift](const TailSeq& x) { return v(x) + shift; };
  return c;
}

TailSeq AlternativeSystem::lift(std::span<const double> head) const {
  return anchor ? anchor->with_head(head) : domain.lift(head);
}

AlternativeSystem AlternativeSystem::from_problem(const ProblemSpec& p) {
  AlternativeSystem sys;
  sys.domain = p.domain;
  sys.funcs.push_back(ConvexFunction::from_expr(p.objective));
  for (const auto& f : p.family.truncated()) sys.funcs.push_back(ConvexFunction::from_expr(f));
  if (p.family.limit()) sys.limit = ConvexFunction::from_expr(*p.family.limit());
  return sys;
}

AlternativeSystem AlternativeSystem::linearized(const std::vector<FuncExpr>& funcs,
                                                const std::optional<FuncExpr>& limit,
                                                const TailSeq& xhat, std::size_t dim,
                                                double kink_tol) {
  AlternativeSystem sys;
  sys.domain = Domain::box(Vector(dim, -1.0), Vector(dim, 1.0));
  sys.anchor = TailSeq::zeros(dim);
  for (const auto& f : funcs) {
    sys.funcs.push_back(ConvexFunction::directional(f, xhat, evaluate(f, xhat), kink_tol));
  }
  if (limit) {
    sys.limit = ConvexFunction::directional(*limit, xhat, evaluate(*limit, xhat), kink_tol);
  }
  return sys;
}

namespace {

double sup_value(const AlternativeSystem& sys, const TailSeq& x, std::size_t* arg = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sys.slots(); ++k) {
    const double v = sys.slot(k).value(x);
    if (v > best) {
      best = v;
      if (arg) *arg = k;
    }
  }
  return best;
}

double norm2(const Vector& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

// Single function sum_k alpha_k h_k as a one-slot system.
AlternativeSystem weighted(const AlternativeSystem& sys, const Vector& alpha) {
  AlternativeSystem w;
  w.domain = sys.domain;
  w.anchor = sys.anchor;
  ConvexFunction f;
  f.value = [&sys, alpha](const TailSeq& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (alpha[k] != 0.0) s += alpha[k] * sys.slot(k).value(x);
    }
    return s;
  };
  f.subgradient = [&sys, alpha](const TailSeq& x, std::size_t dim) {
    Vector g(dim, 0.0);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (alpha[k] == 0.0) continue;
      const Vector gk = sys.slot(k).subgradient(x, dim);
      for (std::size_t i = 0; i < dim; ++i) g[i] += alpha[k] * gk[i];
    }
    return g;
  };
  w.funcs.push_back(std::move(f));
  return w;
}

MultiplierCertificate to_certificate(const AlternativeSystem& sys, const Vector& alpha) {
  MultiplierCertificate cert;
  cert.mode = MultiplierCertificate::Mode::Simplex;
  cert.alphas.assign(alpha.begin(), alpha.begin() + static_cast<long>(sys.funcs.size()));
  cert.alpha_inf = sys.limit ? alpha.back() : 0.0;
  return cert;
}

Vector values_at(const AlternativeSystem& sys, const TailSeq& x) {
  Vector row(sys.slots());
  for (std::size_t k = 0; k < row.size(); ++k) row[k] = sys.slot(k).value(x);
  return row;
}

}  // namespace

SupMinimum minimize_sup(const AlternativeSystem& sys, const DescentConfig& cfg,
                        const std::vector<Vector>& extra_starts) {
  const Domain& dom = sys.domain;
  const std::size_t dim = dom.dim();
  const Vector lo = dom.search_lo();
  const Vector hi = dom.search_hi();
  const double eta0 = cfg.eta0 > 0.0 ? cfg.eta0 : 0.5 * dom.search_radius();

  auto phi = [&](const Vector& h, Vector& g) {
    const TailSeq x = sys.lift(h);
    std::size_t arg = 0;
    const double v = sup_value(sys, x, &arg);
    g = sys.slot(arg).subgradient(x, dim);
    return v;
  };

  std::vector<Vector> starts;
  for (const auto& s : extra_starts) starts.push_back(dom.project(s));
  const std::size_t total = std::max<std::size_t>(static_cast<std::size_t>(std::max(cfg.restarts, 1)), starts.size());
  if (starts.size() < total) {
    const TailSeq c = sys.anchor ? *sys.anchor : dom.center();
    starts.push_back(dom.project(c.extended(dim).head()));
  }
  std::mt19937_64 rng(cfg.seed);
  while (starts.size() < total) {
    Vector s(dim);
    for (std::size_t i = 0; i < dim; ++i) s[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    starts.push_back(std::move(s));
  }

  SupMinimum out;
  out.value = std::numeric_limits<double>::infinity();
  Vector g;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Vector x = starts[s];
    double fx = phi(x, g);
    Vector best_x = x;
    double best = fx;

    auto step_once = [&](double eta) {
      const double n = norm2(g);
      if (n == 0.0) return false;
      for (std::size_t i = 0; i < dim; ++i) x[i] -= eta * g[i] / n;
      x = dom.project(x);
      fx = phi(x, g);
      if (fx < best) {
        best = fx;
        best_x = x;
      }
      return true;
    };

    for (int k = 1; k <= cfg.iterations; ++k) {
      if (!step_once(eta0 / std::sqrt(static_cast<double>(k)))) break;
      if (cfg.cut_stride > 0 && k % cfg.cut_stride == 0) out.cuts.push_back(x);
    }
    x = best_x;
    fx = phi(x, g);
    double eta = eta0 / std::sqrt(static_cast<double>(cfg.iterations + 1));
    for (int k = 0; k < cfg.polish; ++k) {
      if (k > 0 && k % 20 == 0) eta *= 0.7;
      if (!step_once(eta)) break;
    }
    out.cuts.push_back(best_x);
    if (best < out.value) {
      out.value = best;
      out.head = best_x;
      out.start = static_cast<int>(s);
    }
  }
  out.point = sys.lift(out.head);
  return out;
}

SupMinimum refine_dilation(const AlternativeSystem& sys, const Vector& start, int iterations,
                           double step) {
  const Domain& dom = sys.domain;
  const std::size_t n = dom.dim();
  constexpr double kBeta = 1.0 / 4.0 - 1.0;  // dilation coefficient 4
  constexpr double kGrow = 1.1;
  constexpr int kLong = 3;

  auto phi = [&](const Vector& h, Vector& g) {
    const TailSeq x = sys.lift(h);
    std::size_t arg = 0;
    const double v = sup_value(sys, x, &arg);
    g = sys.slot(arg).subgradient(x, n);
    return v;
  };
  auto dot = [](const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  Vector B(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) B[i * n + i] = 1.0;
  auto Bt_mul = [&](const Vector& v) {
    Vector out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[j] += B[i * n + j] * v[i];
    }
    return out;
  };

  Vector x = dom.project(start);
  Vector g, gn;
  double fx = phi(x, g);
  SupMinimum out;
  out.head = x;
  out.value = fx;
  const double h0 = step > 0.0 ? step : 0.1 * dom.search_radius();
  double h = h0;
  int restarts = 0;
  Vector g1 = Bt_mul(g);
  long evals = 0;
  const long max_evals = 20L * iterations;
  for (int it = 0; it < iterations && evals < max_evals; ++it) {
    const double n1 = norm2(g1);
    if (n1 == 0.0) break;
    Vector dx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dx[i] += B[i * n + j] * g1[j];
      dx[i] /= n1;
    }
    const double ndx = norm2(dx);
    double travelled = 0.0;
    int count = 0;
    do {
      for (std::size_t i = 0; i < n; ++i) x[i] -= h * dx[i];
      x = dom.project(x);
      fx = phi(x, gn);
      travelled += h * ndx;
      ++count;
      ++evals;
      if (count % kLong == 0) h *= kGrow;
      if (fx < out.value) {
        out.value = fx;
        out.head = x;
      }
    } while (dot(dx, gn) > 0.0 && evals < max_evals);
    if (travelled < 1e-15) {
      // The metric has collapsed: restart from the best point with a fresh one.
      if (++restarts > 30) break;
      std::fill(B.begin(), B.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) B[i * n + i] = 1.0;
      x = out.head;
      phi(x, gn);
      g1 = gn;
      h = std::max(h0 * std::pow(0.3, restarts), 1e-12);
      continue;
    }

    const Vector g2 = Bt_mul(gn);
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = g2[i] - g1[i];
    const double nr = norm2(r);
    if (nr > 1e-12 * std::max(norm2(g1), norm2(g2))) {
      for (double& v : r) v /= nr;
      Vector Br(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) Br[i] += B[i * n + j] * r[j];
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) B[i * n + j] += kBeta * Br[i] * r[j];
      }
      const double rg = dot(r, g2);
      g1 = g2;
      for (std::size_t i = 0; i < n; ++i) g1[i] += kBeta * rg * r[i];
      // Rescale B (and h inversely) so repeated dilation cannot underflow.
      double bmax = 0.0;
      for (double v : B) bmax = std::max(bmax, std::abs(v));
      if (bmax < 1e-8) {
        for (double& v : B) v /= bmax;
        for (double& v : g1) v /= bmax;
        h *= bmax;
      }
    } else {
      g1 = g2;
    }
  }
  out.point = sys.lift(out.head);
  out.cuts.push_back(out.head);
  return out;
}

GameSolution solve_game(const std::vector<Vector>& values, double lp_tol) {
  if (values.empty()) throw InvariantError("game needs at least one cut");
  const std::size_t K = values[0].size();
  const std::size_t J = values.size();

  LinearProgram primal;
  primal.objective.assign(K + 2, 0.0);
  primal.objective[K] = 1.0;
  primal.objective[K + 1] = -1.0;
  Vector ones(K + 2, 0.0);
  std::fill(ones.begin(), ones.begin() + static_cast<long>(K), 1.0);
  primal.add_row(ones, LinearProgram::Sense::Eq, 1.0);
  for (const auto& row : values) {
    Vector r(K + 2, 0.0);
    std::copy(row.begin(), row.end(), r.begin());
    r[K] = -1.0;
    r[K + 1] = 1.0;
    primal.add_row(std::move(r), LinearProgram::Sense::Ge, 0.0);
  }
  const LpResult p = solve_lp(primal, lp_tol);
  if (p.status != LpResult::Status::Optimal) {
    throw std::runtime_error("game LP failed: " + to_string(p.status) + " after " +
                             std::to_string(p.pivots) + " pivots");
  }

  LinearProgram dual;
  dual.objective.assign(J + 2, 0.0);
  dual.objective[J] = -1.0;
  dual.objective[J + 1] = 1.0;
  Vector lam_ones(J + 2, 0.0);
  std::fill(lam_ones.begin(), lam_ones.begin() + static_cast<long>(J), 1.0);
  dual.add_row(lam_ones, LinearProgram::Sense::Eq, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    Vector r(J + 2, 0.0);
    for (std::size_t j = 0; j < J; ++j) r[j] = values[j][k];
    r[J] = -1.0;
    r[J + 1] = 1.0;
    dual.add_row(std::move(r), LinearProgram::Sense::Le, 0.0);
  }
  const LpResult d = solve_lp(dual, lp_tol);
  if (d.status != LpResult::Status::Optimal) {
    throw std::runtime_error("game dual LP failed: " + to_string(d.status));
  }

  GameSolution sol;
  sol.alpha.assign(p.x.begin(), p.x.begin() + static_cast<long>(K));
  sol.value = p.x[K] - p.x[K + 1];
  sol.lambda.assign(d.x.begin(), d.x.begin() + static_cast<long>(J));
  return sol;
}

std::optional<Vector> find_multipliers(const std::vector<Vector>& values, double lp_tol) {
  if (values.empty()) throw InvariantError("need at least one cut");
  const std::size_t K = values[0].size();
  LinearProgram lp;
  lp.objective.assign(K, 0.0);
  lp.add_row(Vector(K, 1.0), LinearProgram::Sense::Eq, 1.0);
  for (const auto& row : values) {
    if (row.size() != K) throw InvariantError("ragged value matrix");
    lp.add_row(row, LinearProgram::Sense::Ge, 0.0);
  }
  const LpResult r = solve_lp(lp, lp_tol);
  if (r.status == LpResult::Status::Infeasible) return std::nullopt;
  if (r.status != LpResult::Status::Optimal) {
    throw std::runtime_error("multiplier LP failed: " + to_string(r.status) + " after " +
                             std::to_string(r.pivots) + " pivots");
  }
  return r.x;
}

std::optional<MultiplierCertificate> find_multipliers(const AlternativeSystem& sys,
                                                      const std::vector<TailSeq>& cuts,
                                                      double lp_tol) {
  std::vector<Vector> H;
  for (const auto& u : cuts) H.push_back(values_at(sys, u));
  auto alpha = find_multipliers(H, lp_tol);
  if (!alpha) return std::nullopt;
  return to_certificate(sys, *alpha);
}

AuditResult audit_weighted_sum(const AlternativeSystem& sys, const Vector& alpha, int grid,
                               int samples, std::uint64_t seed) {
  const std::size_t dim = sys.domain.dim();
  const Vector lo = sys.domain.search_lo();
  const Vector hi = sys.domain.search_hi();
  AuditResult out;
  out.min_value = std::numeric_limits<double>::infinity();
  Vector h(dim);
  auto consider = [&] {
    const TailSeq x = sys.lift(h);
    double s = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (alpha[k] != 0.0) s += alpha[k] * sys.slot(k).value(x);
    }
    if (s < out.min_value) {
      out.min_value = s;
      out.argmin = x;
    }
  };
  if (dim <= 3 && grid > 1) {
    std::vector<int> idx(dim, 0);
    while (true) {
      for (std::size_t i = 0; i < dim; ++i) {
        h[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (grid - 1);
      }
      consider();
      std::size_t i = 0;
      while (i < dim && ++idx[i] == grid) idx[i++] = 0;
      if (i == dim) break;
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
      for (std::size_t i = 0; i < dim; ++i) h[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
      consider();
    }
  }
  return out;
}

AlternativeOutcome solve_alternative(const AlternativeSystem& sys, const AlternativeConfig& cfg) {
  if (sys.slots() == 0) throw InvariantError("alternative system has no functions");
  for (std::size_t k = 0; k < sys.slots(); ++k) {
    if (!sys.slot(k).convex) {
      throw InvariantError("function " + std::to_string(k) +
                           " is not flagged convex; the multiplier engine needs convexity");
    }
  }
  const double tol = cfg.tol;
  const SupMinimum first = minimize_sup(sys, cfg.descent);
  if (first.value < -tol) return Witness{first.point, 1.0, first.value};

  std::vector<Vector> cuts = first.cuts;
  std::vector<Vector> H;
  for (const auto& c : cuts) H.push_back(values_at(sys, sys.lift(c)));

  DescentConfig inner = cfg.descent;
  inner.restarts = std::max(2, cfg.descent.restarts / 2);
  double game_value = 0.0;
  double best_sup = first.value;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    inner.seed = cfg.descent.seed + 7919u * static_cast<std::uint64_t>(round + 1);
    const GameSolution game = solve_game(H);
    game_value = game.value;
    if (game.value < -tol) {
      // The dual mixture of cuts is a point where every h_k is below the
      // game value (convexity), so it is a witness candidate.
      Vector ubar(sys.domain.dim(), 0.0);
      for (std::size_t j = 0; j < cuts.size(); ++j) {
        for (std::size_t i = 0; i < ubar.size(); ++i) ubar[i] += game.lambda[j] * cuts[j][i];
      }
      const TailSeq x = sys.lift(ubar);
      const double m = sup_value(sys, x);
      if (m < -tol) return Witness{x, 1.0, m};
      const SupMinimum again = minimize_sup(sys, inner, {ubar});
      if (again.value < -tol) return Witness{again.point, 1.0, again.value};
      best_sup = std::min(best_sup, again.value);
      for (const auto& c : again.cuts) {
        cuts.push_back(c);
        H.push_back(values_at(sys, sys.lift(c)));
      }
      continue;
    }
    const AlternativeSystem w = weighted(sys, game.alpha);
    const SupMinimum m = minimize_sup(w, inner);
    if (m.value < -tol) {
      for (const auto& c : m.cuts) {
        cuts.push_back(c);
        H.push_back(values_at(sys, sys.lift(c)));
      }
      continue;
    }
    const AuditResult audit = audit_weighted_sum(sys, game.alpha, cfg.audit_grid,
                                                 cfg.audit_samples, cfg.descent.seed);
    if (audit.min_value < -2.0 * tol) {
      cuts.push_back(audit.argmin.extended(sys.domain.dim()).head());
      cuts.back().resize(sys.domain.dim());
      H.push_back(values_at(sys, audit.argmin));
      continue;
    }
    Multipliers out;
    out.cert = to_certificate(sys, game.alpha);
    out.min_weighted = game.value;
    out.audit_min = audit.min_value;
    out.cuts = cuts.size();
    return out;
  }
  std::ostringstream os;
  os << "no decision after " << cfg.max_rounds << " rounds; best sup value " << best_sup
     << ", game value " << game_value;
  return Inconclusive{os.str(), best_sup, game_value};
}

AlternativeOutcome homotopy_alternative(const std::vector<FuncExpr>& funcs,
                                        const std::optional<FuncExpr>& limit,
                                        const TailSeq& xhat, const Domain& domain,
                                        const AlternativeConfig& cfg) {
  const std::size_t dim = domain.dim();
  const TailSeq base = xhat.extended(dim);
  std::vector<FuncExpr> all = funcs;
  if (limit) all.push_back(*limit);
  Vector hx;
  for (const auto& f : all) {
    if (!f.is_convex()) throw InvariantError("homotopy search needs convex functions");
    hx.push_back(evaluate(f, base));
  }

  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    AlternativeSystem sys;
    sys.domain = domain;
    sys.anchor = base;
    for (std::size_t k = 0; k < all.size(); ++k) {
      sys.funcs.push_back(ConvexFunction::from_expr(all[k]).shifted(-(1.0 - t) * hx[k]));
    }
    const SupMinimum m = minimize_sup(sys, cfg.descent, {base.head()});
    if (m.value < -cfg.tol) return Witness{m.point, t, m.value};
  }

  const AlternativeSystem lin = AlternativeSystem::linearized(funcs, limit, base, dim);
  AlternativeOutcome out = solve_alternative(lin, cfg);
  if (const auto* w = std::get_if<Witness>(&out)) {
    // Transfer the linearized witness u0 back to (xhat + s u0, t = s).
    for (double s : {0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const TailSeq x = axpy(base, s, w->point);
      if (!domain.contains(x)) continue;
      double sup = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < all.size(); ++k) {
        sup = std::max(sup, evaluate(all[k], x) - (1.0 - s) * hx[k]);
      }
      if (sup < 0.0) return Witness{x, s, sup};
    }
    return Inconclusive{"linearized witness did not transfer to a shifted witness", w->margin, 0.0};
  }
  return out;
}

}  // namespace dinicert
