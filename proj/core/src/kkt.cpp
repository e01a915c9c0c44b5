#include "dinicert/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "dinicert/calculus.hpp"
#include "dinicert/property_h.hpp"

namespace dinicert {

KktConfig KktConfig::for_solver_output() {
  KktConfig c;
  c.feas_tol = 1e-6;
  c.slack_tol = 1e-6;
  c.stat_tol = 1e-5;
  c.act_tol = 1e-5;
  c.kink_tol = 1e-6;
  return c;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dplus(const FuncExpr& f, const TailSeq& x, const TailSeq& u, double kink_tol) {
  return dir_deriv_exact(f, x, u, kink_tol);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::size_t truncation_of(const ProblemSpec& p) {
  return p.family.empty() ? 0 : p.family.truncation();
}

/// Indices past M used to spot-check a family that is not exact at M.
std::vector<std::size_t> probes_after(std::size_t K) {
  std::vector<std::size_t> out{K + 1, 2 * K, 4 * K};
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove_if(out.begin(), out.end(), [K](std::size_t n) { return n <= K; }),
            out.end());
  return out;
}

/// Weighted function list standing in for the infinite Lagrangian. Weight
/// left after the explicit terms rides on f_inf; `band` bounds the error of
/// that substitution per unit sup-norm of displacement.
struct Lagrangian {
  std::vector<std::pair<double, FuncExpr>> terms;
  double band = 0.0;

  double value(const TailSeq& x) const {
    double s = 0.0;
    for (const auto& [w, f] : terms) s += w * evaluate(f, x);
    return s;
  }
  double derivative(const TailSeq& x, const TailSeq& u, double kink_tol) const {
    double s = 0.0;
    for (const auto& [w, f] : terms) s += w * dplus(f, x, u, kink_tol);
    return s;
  }
};

Lagrangian build_lagrangian(const ProblemSpec& p, const TailSeq& xhat,
                            const MultiplierCertificate& cert, const KktConfig& cfg,
                            double band_radius) {
  Lagrangian L;
  L.terms.emplace_back(cert.at(0), p.objective);
  const auto& fam = p.family;
  if (fam.empty()) return L;
  const std::size_t M = fam.truncation();
  for (std::size_t n = 1; n <= M; ++n) {
    const double a = cert.at(n);
    if (a != 0.0) L.terms.emplace_back(a, fam.truncated()[n - 1]);
  }
  if (cert.alpha_inf != 0.0) L.terms.emplace_back(cert.alpha_inf, *fam.limit());
  const double R = cert.tail_mass_after(M);
  if (R == 0.0) return L;
  if (fam.exact_at_truncation()) {
    L.terms.emplace_back(R, *fam.limit());
    return L;
  }
  const std::size_t K = M + cfg.explicit_tail;
  for (std::size_t n = M + 1; n <= K; ++n) {
    const double a = cert.at(n);
    if (a != 0.0) L.terms.emplace_back(a, fam.at(n));
  }
  const double rest = cert.tail_mass_after(K);
  if (rest == 0.0) return L;
  L.terms.emplace_back(rest, *fam.limit());
  double eps = 0.0;
  for (std::size_t n : {K + 1, K + 2, 2 * K + 1, 4 * K + 1}) {
    eps = std::max(eps, limit_seminorm(fam, n, xhat, band_radius, 256, cfg.seed));
  }
  L.band = rest * 2.0 * eps;
  return L;
}

std::size_t direction_dim(const ProblemSpec& p) { return p.dim(); }

ConditionResult result_for(Condition c) {
  ConditionResult r;
  r.condition = c;
  return r;
}

}  // namespace

CertificateReport verify_kkt_certificate(const ProblemSpec& problem, const TailSeq& xhat,
                                         const MultiplierCertificate& cert,
                                         const KktConfig& cfg) {
  CertificateReport rep;
  const auto& fam = problem.family;
  const std::size_t M = truncation_of(problem);

  {
    ConditionResult r = result_for(Condition::Domain);
    r.passed = problem.domain.contains(xhat);
    r.detail = r.passed ? "inside" : "point is not strictly inside the domain";
    rep.conditions.push_back(r);
  }

  {
    ConditionResult r = result_for(Condition::Nonnegativity);
    double worst = cert.alpha_inf;
    std::string where = "alpha_inf";
    for (std::size_t n = 0; n < cert.alphas.size(); ++n) {
      if (cert.alphas[n] < worst) {
        worst = cert.alphas[n];
        where = "alpha_" + std::to_string(n);
      }
    }
    if (cert.tail.inf_value() < worst) {
      worst = cert.tail.inf_value();
      where = "tail";
    }
    r.worst = worst;
    r.passed = worst >= -1e-12;
    r.detail = r.passed ? "all multipliers >= 0" : where + " = " + fmt(worst);
    rep.conditions.push_back(r);
  }

  bool summable = true;
  {
    ConditionResult r = result_for(Condition::Normalization);
    try {
      const double total = sum_certificate(cert);
      if (cert.mode == MultiplierCertificate::Mode::Simplex) {
        r.worst = std::abs(total - 1.0);
        r.detail = "total mass " + fmt(total);
      } else {
        r.worst = std::abs(cert.at(0) - 1.0);
        r.detail = "beta_0 = " + fmt(cert.at(0));
      }
      r.passed = r.worst <= cfg.norm_tol;
    } catch (const InvariantError& e) {
      summable = false;
      r.passed = false;
      r.worst = kInf;
      r.detail = e.what();
    }
    rep.conditions.push_back(r);
  }

  {
    ConditionResult r = result_for(Condition::ComplementarySlackness);
    double worst = 0.0;
    std::string where = "none";
    auto note = [&](double v, const std::string& w) {
      if (v > worst) {
        worst = v;
        where = w;
      }
    };
    if (!fam.empty()) {
      for (std::size_t n = 1; n <= M; ++n) {
        const double v = std::abs(cert.at(n) * evaluate(fam.truncated()[n - 1], xhat));
        rep.slackness.push_back(v);
        note(v, "n = " + std::to_string(n));
      }
      const double finf = evaluate(*fam.limit(), xhat);
      const double vinf = std::abs(cert.alpha_inf * finf);
      rep.slackness.push_back(vinf);
      note(vinf, "limit slot");
      if (summable) {
        if (fam.exact_at_truncation()) {
          note(cert.tail_mass_after(M) * std::abs(finf), "tail past M");
        } else {
          const std::size_t K = M + cfg.explicit_tail;
          for (std::size_t n = M + 1; n <= K; ++n) {
            const double a = cert.at(n);
            if (a != 0.0) note(std::abs(a * evaluate(fam.at(n), xhat)), "n = " + std::to_string(n));
          }
          note(cert.tail_mass_after(K) * std::abs(finf), "tail past M");
        }
      }
    }
    r.worst = worst;
    r.passed = worst <= cfg.slack_tol;
    r.detail = "max |alpha_n f_n(xhat)| = " + fmt(worst) + " at " + where;
    rep.conditions.push_back(r);
  }

  {
    ConditionResult r = result_for(Condition::Feasibility);
    double worst = -kInf;
    std::string where = "none";
    auto note = [&](double v, const std::string& w) {
      if (v > worst) {
        worst = v;
        where = w;
      }
    };
    if (!fam.empty()) {
      for (std::size_t n = 1; n <= M; ++n) {
        note(evaluate(fam.truncated()[n - 1], xhat), "n = " + std::to_string(n));
      }
      note(evaluate(*fam.limit(), xhat), "limit slot");
      if (!fam.exact_at_truncation()) {
        for (std::size_t n : probes_after(M)) note(evaluate(fam.at(n), xhat), "n = " + std::to_string(n));
      }
    }
    r.worst = fam.empty() ? 0.0 : worst;
    r.passed = r.worst <= cfg.feas_tol;
    r.detail = fam.empty() ? "no constraints" : "max f_n(xhat) = " + fmt(worst) + " at " + where;
    rep.conditions.push_back(r);
  }

  {
    ConditionResult r = result_for(Condition::Stationarity);
    if (!summable) {
      r.passed = false;
      r.worst = -kInf;
      r.detail = "skipped: multiplier tail is not summable";
    } else {
      const double radius = 1e-2 * problem.domain.search_radius();
      const Lagrangian L = build_lagrangian(problem, xhat, cert, cfg, radius);
      rep.tail_band = L.band;
      const auto dirs = sample_directions(direction_dim(problem), cfg.random_dirs, cfg.seed);
      double worst = kInf, worst_raw = kInf;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        const double s = L.derivative(xhat, dirs[j], cfg.kink_tol);
        const double res = s - L.band * dirs[j].sup_norm();
        rep.stationarity.push_back(res);
        worst_raw = std::min(worst_raw, s);
        if (res < worst) {
          worst = res;
          arg = j;
        }
      }
      r.worst = worst;
      r.passed = worst >= -cfg.stat_tol;
      r.band_limited = !r.passed && worst_raw >= -cfg.stat_tol;
      r.detail = "min weighted derivative " + fmt(worst) + " at direction " + std::to_string(arg) +
                 " of " + std::to_string(dirs.size()) + ", tail band " + fmt(L.band);
    }
    rep.conditions.push_back(r);
  }

  if (cfg.check_slater) {
    ConditionResult r = result_for(Condition::Slater);
    const auto sd = slater_direction(problem, xhat, cfg);
    r.worst = sd ? sd->margin : 0.0;
    r.passed = !sd || cert.at(0) > 0.0;
    r.detail = sd ? "Slater direction with margin " + fmt(sd->margin) +
                        (r.passed ? "; alpha_0 > 0" : "; but alpha_0 = 0")
                  : "no Slater direction found";
    rep.conditions.push_back(r);
  }

  if (cfg.check_gateaux && summable) {
    ConditionResult r = result_for(Condition::GateauxEquality);
    const Lagrangian L = build_lagrangian(problem, xhat, cert, cfg, 1e-2 * problem.domain.search_radius());
    const auto dirs = sample_directions(direction_dim(problem), cfg.random_dirs, cfg.seed);
    const std::vector<TailSeq> basis(dirs.begin(), dirs.begin() + static_cast<long>(2 * direction_dim(problem)));
    bool gateaux = true;
    for (const auto& [w, f] : L.terms) {
      if (w != 0.0 && !gateaux_linearity_check(f, xhat, basis)) {
        gateaux = false;
        break;
      }
    }
    if (!gateaux) {
      r.detail = "skipped: some weighted function is not Gateaux differentiable at xhat";
    } else {
      double worst = 0.0;
      for (const auto& u : dirs) {
        worst = std::max(worst, std::abs(L.derivative(xhat, u, cfg.kink_tol)) - L.band * u.sup_norm());
      }
      r.worst = worst;
      r.passed = worst <= cfg.stat_tol;
      r.detail = "max |weighted Gateaux derivative| = " + fmt(worst);
    }
    rep.conditions.push_back(r);
  }

  rep.verdict = Verdict::Certified;
  rep.reason = "all conditions hold";
  for (const auto& c : rep.conditions) {
    if (!c.passed && !c.band_limited) {
      rep.verdict = Verdict::Rejected;
      rep.failed = c.condition;
      rep.reason = to_string(c.condition) + ": " + c.detail;
      return rep;
    }
  }
  for (const auto& c : rep.conditions) {
    if (!c.passed) {
      rep.verdict = Verdict::Inconclusive;
      rep.failed = c.condition;
      rep.reason = to_string(c.condition) + " only within the tail band: " + c.detail;
      break;
    }
  }
  return rep;
}

double slater_margin(const ProblemSpec& problem, const TailSeq& xhat, const TailSeq& w,
                     double kink_tol) {
  const auto& fam = problem.family;
  if (fam.empty()) return -kInf;
  double m = -kInf;
  for (const auto& f : fam.truncated()) m = std::max(m, dplus(f, xhat, w, kink_tol));
  m = std::max(m, dplus(*fam.limit(), xhat, w, kink_tol));
  if (!fam.exact_at_truncation()) {
    for (std::size_t n : probes_after(fam.truncation())) m = std::max(m, dplus(fam.at(n), xhat, w, kink_tol));
  }
  return m;
}

namespace {

AlternativeSystem derivative_system(const std::vector<FuncExpr>& fs, const TailSeq& xhat,
                                    std::size_t dim, double kink_tol) {
  AlternativeSystem sys;
  sys.domain = Domain::box(Vector(dim, -1.0), Vector(dim, 1.0));
  sys.anchor = TailSeq::zeros(dim);
  for (const auto& f : fs) sys.funcs.push_back(ConvexFunction::directional(f, xhat, 0.0, kink_tol));
  return sys;
}

}  // namespace

std::optional<SlaterDirection> slater_direction(const ProblemSpec& problem, const TailSeq& xhat,
                                                const KktConfig& cfg) {
  const auto& fam = problem.family;
  if (fam.empty()) return std::nullopt;
  const std::size_t dim = direction_dim(problem);
  std::vector<FuncExpr> fs = fam.truncated();
  fs.push_back(*fam.limit());
  const AlternativeSystem sys = derivative_system(fs, xhat, dim, cfg.kink_tol);

  std::vector<Vector> starts;
  for (std::size_t i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector e(dim, 0.0);
      e[i] = s;
      starts.push_back(std::move(e));
    }
  }
  starts.emplace_back(dim, 1.0);
  starts.emplace_back(dim, -1.0);
  const SupMinimum m = minimize_sup(sys, cfg.descent, starts);

  double norm = 0.0;
  for (double v : m.head) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) return std::nullopt;
  Vector w = m.head;
  for (double& v : w) v /= norm;
  SlaterDirection out{TailSeq(w), 0.0};
  out.margin = slater_margin(problem, xhat, out.w, cfg.kink_tol);
  if (!(out.margin < -cfg.feas_tol)) return std::nullopt;
  return out;
}

KktSearch find_kkt_certificate(const ProblemSpec& problem, const TailSeq& xhat,
                               const KktConfig& cfg) {
  KktSearch out;
  const auto& fam = problem.family;
  const std::size_t M = truncation_of(problem);
  if (!problem.domain.contains(xhat)) {
    out.failure = "point is not strictly inside the domain";
    return out;
  }

  std::vector<FuncExpr> slot_f{problem.objective};
  std::vector<std::size_t> slot_n{0};
  if (!fam.empty()) {
    for (std::size_t n = 1; n <= M; ++n) {
      const double v = evaluate(fam.truncated()[n - 1], xhat);
      if (v > cfg.feas_tol) {
        out.failure = "infeasible: f_" + std::to_string(n) + "(xhat) = " + fmt(v);
        return out;
      }
      if (v >= -cfg.act_tol) {
        out.active.push_back(n);
        slot_f.push_back(fam.truncated()[n - 1]);
        slot_n.push_back(n);
      }
    }
    const double vinf = evaluate(*fam.limit(), xhat);
    if (vinf > cfg.feas_tol) {
      out.failure = "infeasible: f_inf(xhat) = " + fmt(vinf);
      return out;
    }
    if (vinf >= -cfg.act_tol && !fam.exact_at_truncation()) {
      out.limit_active = true;
      slot_f.push_back(*fam.limit());
      slot_n.push_back(std::numeric_limits<std::size_t>::max());
    }
  }

  const std::size_t dim = direction_dim(problem);
  const AlternativeSystem dsys = derivative_system(slot_f, xhat, dim, cfg.kink_tol);
  // Rows are scaled to unit max-norm: only the sign of each weighted sum
  // matters, and tiny coefficients would otherwise sit below the pivot tolerance.
  std::vector<Vector> H, raw;
  auto add_cut = [&](const TailSeq& u) {
    Vector row(slot_f.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = dsys.funcs[k].value(u);
      scale = std::max(scale, std::abs(row[k]));
    }
    if (scale == 0.0) return;
    raw.push_back(row);
    for (double& v : row) v /= scale;
    H.push_back(std::move(row));
  };
  for (const auto& u : sample_directions(dim, cfg.random_dirs, cfg.seed)) add_cut(u);
  if (H.empty()) {
    H.emplace_back(slot_f.size(), 0.0);
    raw.push_back(H.back());
  }
  // Worst weighted derivative over the cuts, in the problem's own units.
  auto unscaled_value = [&](const Vector& a) {
    double worst = kInf;
    for (const auto& row : raw) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * row[k];
      worst = std::min(worst, s);
    }
    return worst;
  };

  std::optional<Vector> alpha;
  DescentConfig dcfg = cfg.descent;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    const GameSolution game = solve_game(H);
    out.game_value = unscaled_value(game.alpha);
    if (game.value < -cfg.stat_tol && out.game_value < -cfg.stat_tol) {
      out.failure = "not first-order stationary: best weighted derivative over " +
                    std::to_string(H.size()) + " directions is " + fmt(game.value);
      out.cuts = H.size();
      return out;
    }
    AlternativeSystem wsys;
    wsys.domain = dsys.domain;
    wsys.anchor = dsys.anchor;
    ConvexFunction wf;
    const Vector a = game.alpha;
    wf.value = [&dsys, a](const TailSeq& u) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] != 0.0) s += a[k] * dsys.funcs[k].value(u);
      }
      return s;
    };
    wf.subgradient = [&dsys, a](const TailSeq& u, std::size_t d) {
      Vector g(d, 0.0);
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) continue;
        const Vector gk = dsys.funcs[k].subgradient(u, d);
        for (std::size_t i = 0; i < d; ++i) g[i] += a[k] * gk[i];
      }
      return g;
    };
    wsys.funcs.push_back(std::move(wf));
    dcfg.seed = cfg.descent.seed + static_cast<std::uint64_t>(round);
    const SupMinimum m = minimize_sup(wsys, dcfg);
    if (m.value >= -cfg.stat_tol) {
      alpha = game.alpha;
      break;
    }
    for (const auto& c : m.cuts) add_cut(dsys.lift(c));
  }
  out.cuts = H.size();
  if (!alpha) {
    out.failure = "no stationary multipliers after " + std::to_string(cfg.max_rounds) + " rounds";
    return out;
  }

  MultiplierCertificate cert;
  cert.mode = MultiplierCertificate::Mode::Simplex;
  cert.alphas.assign(M + 1, 0.0);
  cert.alpha_inf = 0.0;
  for (std::size_t k = 0; k < slot_n.size(); ++k) {
    if (slot_n[k] == std::numeric_limits<std::size_t>::max()) {
      cert.alpha_inf = (*alpha)[k];
    } else {
      cert.alphas[slot_n[k]] = (*alpha)[k];
    }
  }
  out.cert = cert;
  out.report = verify_kkt_certificate(problem, xhat, cert, cfg);
  if (!out.report.certified()) out.failure = "audit: " + out.report.reason;
  return out;
}

std::vector<InvexityViolation> invexity_check(const std::vector<FuncExpr>& funcs,
                                              const TailSeq& xhat, const KernelMap& mu,
                                              const std::vector<TailSeq>& samples, double tol) {
  std::vector<InvexityViolation> out;
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    const double fx = evaluate(funcs[i], xhat);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const TailSeq u = mu ? mu(samples[s]) : samples[s] - xhat;
      const double lhs = dini_upper(funcs[i], xhat, u).value;
      const double rhs = evaluate(funcs[i], samples[s]) - fx;
      if (lhs > rhs + tol) out.push_back({i, s, lhs, rhs});
    }
  }
  return out;
}

SufficiencyResult sufficiency_check_convex(const ProblemSpec& problem, const TailSeq& xhat,
                                           const MultiplierCertificate& cert,
                                           const KktConfig& cfg, int samples) {
  if (!problem.all_convex()) {
    throw InvariantError("sufficiency check needs a convex objective and convex constraints");
  }
  SufficiencyResult res;
  if (cert.alpha_inf < 0.0 || cert.tail.inf_value() < 0.0 ||
      std::any_of(cert.alphas.begin(), cert.alphas.end(), [](double a) { return a < 0.0; })) {
    res.reason = "negative multiplier: the Lagrangian is not convex";
    return res;
  }

  const Lagrangian L = build_lagrangian(problem, xhat, cert, cfg, 1e-2 * problem.domain.search_radius());
  res.min_stationarity = kInf;
  for (const auto& u : sample_directions(direction_dim(problem), cfg.random_dirs, cfg.seed)) {
    res.min_stationarity =
        std::min(res.min_stationarity, L.derivative(xhat, u, cfg.kink_tol) - L.band * u.sup_norm());
  }

  const Lagrangian G = build_lagrangian(problem, xhat, cert, cfg, problem.domain.search_radius());
  const double L0 = G.value(xhat);
  const Vector lo = problem.domain.search_lo();
  const Vector hi = problem.domain.search_hi();
  std::mt19937_64 rng(cfg.seed);
  res.min_gap = kInf;
  Vector h(lo.size());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    const TailSeq x = xhat.with_head(h);
    if (!problem.domain.contains(x)) continue;
    const double gap = G.value(x) - L0 + G.band * (x - xhat).sup_norm();
    res.min_gap = std::min(res.min_gap, gap);
  }
  const double gap_tol = cfg.stat_tol + 1e-12 * (1.0 + std::abs(L0));
  if (res.min_stationarity < -cfg.stat_tol) {
    res.reason = "Lagrangian has a descent direction: " + fmt(res.min_stationarity);
  } else if (res.min_gap < -gap_tol) {
    res.reason = "sampled point lowers the Lagrangian by " + fmt(-res.min_gap);
  } else {
    res.sufficient = true;
    res.reason = "xhat minimizes the Lagrangian on the sample";
  }
  return res;
}

namespace {

// When as many constraints are nearly active as there are searched
// coordinates, they pin the point and Newton on f_A(x) = 0 finishes the job.
std::optional<Vector> active_newton(const std::vector<FuncExpr>& cons, const Domain& dom,
                                    const Vector& head, double act) {
  const std::size_t dim = head.size();
  std::vector<std::size_t> A;
  for (std::size_t k = 0; k < cons.size(); ++k) {
    if (evaluate(cons[k], dom.lift(head)) > -act) A.push_back(k);
  }
  if (A.size() != dim) return std::nullopt;
  Vector h = head;
  Eigen::VectorXd F(static_cast<Eigen::Index>(dim));
  Eigen::MatrixXd J(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (int it = 0; it < 50; ++it) {
    const TailSeq x = dom.lift(h);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      F(r) = evaluate(cons[A[i]], x);
      const Vector g = subgradient(cons[A[i]], x, dim);
      for (std::size_t j = 0; j < dim; ++j) J(r, static_cast<Eigen::Index>(j)) = g[j];
    }
    if (!F.allFinite()) return std::nullopt;
    if (F.cwiseAbs().maxCoeff() <= 1e-15) break;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd dx = lu.solve(-F);
    double step = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      h[j] += dx(static_cast<Eigen::Index>(j));
      step = std::max(step, std::abs(dx(static_cast<Eigen::Index>(j))));
    }
    if (step <= 1e-16) break;
  }
  return h;
}

}  // namespace

TruncatedSolve solve_truncated(const ProblemSpec& problem, const SolveConfig& cfg) {
  const auto& fam = problem.family;
  std::vector<FuncExpr> cons;
  if (!fam.empty()) {
    cons = fam.truncated();
    if (!fam.exact_at_truncation()) cons.push_back(*fam.limit());
  }
  const FuncExpr& f0 = problem.objective;
  auto violation = [&](const TailSeq& x) {
    double v = 0.0;
    for (const auto& f : cons) v = std::max(v, evaluate(f, x));
    return v;
  };

  TruncatedSolve out;
  for (double rho : cfg.penalties) {
    AlternativeSystem sys;
    sys.domain = problem.domain;
    ConvexFunction pen;
    pen.value = [&, rho](const TailSeq& x) {
      double s = evaluate(f0, x);
      for (const auto& f : cons) s += rho * std::max(0.0, evaluate(f, x));
      return s;
    };
    pen.subgradient = [&, rho](const TailSeq& x, std::size_t dim) {
      Vector g = subgradient(f0, x, dim);
      for (const auto& f : cons) {
        if (evaluate(f, x) <= 0.0) continue;
        const Vector gf = subgradient(f, x, dim);
        for (std::size_t i = 0; i < dim; ++i) g[i] += rho * gf[i];
      }
      return g;
    };
    sys.funcs.push_back(std::move(pen));

    DescentConfig d = cfg.descent;
    d.restarts = cfg.starts;
    d.seed = cfg.seed;
    d.cut_stride = 0;
    SupMinimum m = minimize_sup(sys, d);
    for (int pass = 0; pass < 3; ++pass) {
      const SupMinimum r = refine_dilation(sys, m.head);
      if (!(r.value < m.value)) break;
      m = r;
    }
    if (const auto h = active_newton(cons, problem.domain, m.head, 1e-6)) {
      const TailSeq p = problem.domain.lift(*h);
      const double v = sys.funcs[0].value(p);
      if (problem.domain.contains(p) && violation(p) <= cfg.feas_tol &&
          v <= m.value + 1e-12 * (1.0 + std::abs(m.value))) {
        m.head = *h;
        m.point = p;
        m.value = v;
      }
    }
    SolveStep step{rho, m.value, evaluate(f0, m.point), violation(m.point)};
    out.history.push_back(step);
    if (step.max_violation <= cfg.feas_tol) {
      out.head = m.head;
      out.point = m.point;
      out.objective = step.objective;
      out.max_violation = step.max_violation;
      return out;
    }
  }
  throw std::runtime_error("no feasible point found; last violation " +
                           fmt(out.history.empty() ? 0.0 : out.history.back().max_violation));
}

TruncatedSolve solve_truncated(const ProblemSpec& problem, std::size_t M, const SolveConfig& cfg) {
  if (problem.family.empty()) return solve_truncated(problem, cfg);
  ProblemSpec p = problem;
  p.family = problem.family.with_truncation(M);
  return solve_truncated(p, cfg);
}

}  // namespace dinicert
