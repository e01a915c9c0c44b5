#include "dinicert/property_h.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dinicert {

namespace {

std::size_t dim_for(const FuncExpr& f, const TailSeq& x) {
  const std::size_t idx = f.max_index() ? *f.max_index() + 1 : 0;
  return std::max<std::size_t>({x.head_size(), idx, 1});
}

double ls_slope(const std::vector<DecayEntry>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& p : pts) {
    if (!(p.seminorm > 0.0)) continue;
    const double x = static_cast<double>(p.n);
    const double y = std::log(p.seminorm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = k * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (k * sxy - sx * sy) / den;
}

}  // namespace

double limit_seminorm(const ConstraintFamily& family, std::size_t n, const TailSeq& xhat,
                      double r, int samples, std::uint64_t seed) {
  if (family.empty()) return 0.0;
  const FuncExpr fn = family.at(n);
  const FuncExpr& finf = *family.limit();
  const std::size_t dim = std::max(dim_for(fn, xhat), dim_for(finf, xhat));
  auto diff = [&](const TailSeq& x) { return evaluate(fn, x) - evaluate(finf, x); };
  return lipschitz_seminorm(diff, xhat, r, dim, samples, seed);
}

PropertyHReport check_property_h(const ConstraintFamily& family, const TailSeq& xhat, double r,
                                 const std::vector<std::size_t>& schedule,
                                 const PropertyHConfig& cfg) {
  if (schedule.empty()) throw InvariantError("empty n-schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw InvariantError("n-schedule must be strictly increasing and start at n >= 1");
    }
  }
  PropertyHReport rep;
  if (family.empty()) {
    rep.verdict = Verdict::Certified;
    rep.reason = "empty family";
    return rep;
  }
  const FuncExpr& finf = *family.limit();
  for (std::size_t n : schedule) {
    rep.decay.push_back({n, limit_seminorm(family, n, xhat, r, cfg.samples, cfg.seed)});

    const FuncExpr fn = family.at(n);
    const std::size_t dim = dim_for(fn, xhat);
    const auto dirs = sample_directions(dim, cfg.random_dirs, cfg.seed);
    auto phi = [&](const TailSeq& u) { return dini_upper(fn, xhat, u).value; };
    auto v = sublinearity_check(phi, dirs, cfg.sublinear_tol);
    if (!v.empty()) rep.violations.emplace_back(n, std::move(v));
  }
  const std::size_t nmax = schedule.back();
  rep.limit_agreement = std::abs(evaluate(finf, xhat) - evaluate(family.at(nmax), xhat));
  rep.slope = ls_slope(rep.decay);

  const double last = rep.decay.back().seminorm;
  std::ostringstream why;
  if (!rep.violations.empty()) {
    rep.verdict = Verdict::Rejected;
    why << "D+f_n(xhat) not sublinear at n = " << rep.violations.front().first;
  } else if (!std::isfinite(last)) {
    rep.verdict = Verdict::Rejected;
    why << "seminorm not finite at n = " << nmax;
  } else if (last > cfg.decay_tol) {
    rep.verdict = Verdict::Rejected;
    why << "seminorm " << last << " at n = " << nmax << " exceeds " << cfg.decay_tol;
  } else if (last > 0.0 && !(rep.slope < 0.0)) {
    rep.verdict = std::isnan(rep.slope) ? Verdict::Inconclusive : Verdict::Rejected;
    why << "no decreasing trend (slope " << rep.slope << ")";
  } else if (rep.limit_agreement > cfg.limit_tol) {
    rep.verdict = Verdict::Rejected;
    why << "f_inf(xhat) differs from f_n(xhat) by " << rep.limit_agreement;
  } else {
    rep.verdict = Verdict::Certified;
    why << "seminorm " << last << " at n = " << nmax;
  }
  rep.reason = why.str();
  return rep;
}

DiniLimitReport verify_dini_limit(const ConstraintFamily& family, const TailSeq& xhat,
                                  const std::vector<TailSeq>& dirs,
                                  const std::vector<std::size_t>& ks, double r, double tol,
                                  const PropertyHConfig& cfg) {
  DiniLimitReport rep;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  if (family.empty()) {
    rep.worst_excess = 0.0;
    return rep;
  }
  const FuncExpr& finf = *family.limit();
  for (std::size_t k : ks) {
    const FuncExpr fk = family.at(k);
    const double eps = limit_seminorm(family, k, xhat, r, cfg.samples, cfg.seed);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const TailSeq& u = dirs[j];
      DiniLimitRow row;
      row.k = k;
      row.dir = j;
      row.lhs = dini_upper(finf, xhat, u).value;
      row.rhs = dini_upper(fk, xhat, u).value;
      row.residual = std::abs(row.lhs - row.rhs);
      row.bound = (eps + tol) * u.sup_norm();
      rep.worst_excess = std::max(rep.worst_excess, row.residual - row.bound);
      rep.rows.push_back(row);
    }
  }
  if (rep.rows.empty()) rep.worst_excess = 0.0;
  return rep;
}

SupSwapResult verify_sup_swap(const ConstraintFamily& family, const TailSeq& xhat,
                              const TailSeq& u, const StepSchedule& sched, double r, double tol,
                              const PropertyHConfig& cfg) {
  SupSwapResult res;
  if (family.empty() || u.sup_norm() == 0.0) return res;

  std::vector<FuncExpr> fs = family.truncated();
  fs.push_back(*family.limit());
  Vector base;
  bool convex = true;
  for (const auto& f : fs) {
    base.push_back(evaluate(f, xhat));
    convex = convex && f.is_convex();
  }
  auto sup_shifted = [&](const TailSeq& y) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fs.size(); ++k) m = std::max(m, evaluate(fs[k], y) - base[k]);
    return m;
  };
  const DiniEstimate est = dini_upper_numeric(sup_shifted, xhat, u, sched, convex);
  res.lhs = est.value;
  res.converged = est.converged;

  res.rhs = -std::numeric_limits<double>::infinity();
  for (const auto& f : fs) res.rhs = std::max(res.rhs, dini_upper(f, xhat, u, sched).value);

  const double eps = family.exact_at_truncation()
                         ? 0.0
                         : limit_seminorm(family, family.truncation(), xhat, r, cfg.samples, cfg.seed);
  res.residual = std::abs(res.lhs - res.rhs);
  res.bound = tol + eps * u.sup_norm();
  if (!res.converged) {
    res.verdict = Verdict::Inconclusive;
  } else {
    res.verdict = res.residual <= res.bound ? Verdict::Certified : Verdict::Rejected;
  }
  return res;
}

Interchange max_inf_interchange(const std::vector<Vector>& tables) {
  if (tables.empty()) throw InvariantError("no tables");
  const std::size_t len = tables.front().size();
  if (len == 0) throw InvariantError("empty grid");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].size() != len) throw InvariantError("tables are not on a shared grid");
    for (std::size_t j = 0; j < len; ++j) {
      if (!std::isfinite(tables[i][j])) throw InvariantError("non-finite table entry");
      if (j > 0 && tables[i][j] < tables[i][j - 1]) {
        throw InvariantError("table " + std::to_string(i) + " decreases at grid index " +
                             std::to_string(j));
      }
    }
  }
  Interchange out;
  out.max_of_infs = -std::numeric_limits<double>::infinity();
  for (const auto& t : tables) out.max_of_infs = std::max(out.max_of_infs, *std::min_element(t.begin(), t.end()));
  out.inf_of_maxes = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < len; ++j) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : tables) m = std::max(m, t[j]);
    out.inf_of_maxes = std::min(out.inf_of_maxes, m);
  }
  return out;
}

}  // namespace dinicert
