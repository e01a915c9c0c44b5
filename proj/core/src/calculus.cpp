#include "dinicert/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dinicert {

void StepSchedule::validate() const {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvariantError("step ratio must lie in (0, 1)");
  if (window < 4 || count < window) throw InvariantError("need count >= window >= 4");
  if (!(converge_tol > 0.0)) throw InvariantError("convergence tolerance must be positive");
}

std::string to_string(DiniMode m) {
  switch (m) {
    case DiniMode::NumericLimsup: return "numeric_limsup";
    case DiniMode::ExactSymbolic: return "exact_symbolic";
    case DiniMode::ConvexMonotone: return "convex_monotone";
  }
  return "unknown";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Richardson step for a quotient that is affine in t near 0.
double extrapolate(const std::pair<double, double>& a, const std::pair<double, double>& b) {
  const auto [t1, q1] = a;
  const auto [t2, q2] = b;
  return (q2 * t1 - q1 * t2) / (t1 - t2);
}

double pi_rule(double z, double s, double tol) {
  if (z > tol) return s;
  if (z < -tol) return -s;
  return std::abs(s);
}

struct ExactRules {
  const TailSeq& x;
  const TailSeq& u;
  double kink_tol;

  double operator()(const FuncExpr& f) const {
    const ExprNode& n = f.node();
    switch (n.op) {
      case Op::Const:
        return 0.0;
      case Op::Coord:
        return u.at(n.index);
      case Op::Affine:
        return linear_form(n.coeffs, n.coeff_tail, u);
      case Op::Square:
        return 2.0 * evaluate(n.children[0], x) * (*this)(n.children[0]);
      case Op::AbsVal:
        return pi_rule(evaluate(n.children[0], x), (*this)(n.children[0]), kink_tol);
      case Op::Sum: {
        double s = 0.0;
        for (const auto& c : n.children) s += (*this)(c);
        return s;
      }
      case Op::Scale:
        return n.value * (*this)(n.children[0]);
      case Op::Max: {
        Vector vals;
        vals.reserve(n.children.size());
        for (const auto& c : n.children) vals.push_back(evaluate(c, x));
        const double vmax = *std::max_element(vals.begin(), vals.end());
        const double tol = std::max(1e-12 * (1.0 + std::abs(vmax)), kink_tol);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vals.size(); ++i) {
          if (vals[i] >= vmax - tol) best = std::max(best, (*this)(n.children[i]));
        }
        return best;
      }
      case Op::NormOneBlock: {
        double s = 0.0;
        for (std::size_t i : n.indices) s += pi_rule(x.at(i), u.at(i), kink_tol);
        return s;
      }
      case Op::NormTwoSqBlock: {
        double s = 0.0;
        for (std::size_t i : n.indices) s += 2.0 * x.at(i) * u.at(i);
        return s;
      }
      case Op::LimsupAbs:
        return pi_rule(x.tail().limit(), u.tail().limit(), kink_tol);
      case Op::AtanSqOfAffine: {
        const double a = linear_form(n.coeffs, TailRule::zero(), x) + n.value;
        const double da = linear_form(n.coeffs, TailRule::zero(), u);
        return 2.0 * std::atan(a) / (1.0 + a * a) * da;
      }
    }
    throw EvaluationError("unknown node");
  }
};

void subgradient_into(const FuncExpr& f, const TailSeq& x, double w, Vector& g) {
  if (w == 0.0) return;
  const ExprNode& n = f.node();
  const std::size_t dim = g.size();
  switch (n.op) {
    case Op::Const:
    case Op::LimsupAbs:
      return;
    case Op::Coord:
      if (n.index < dim) g[n.index] += w;
      return;
    case Op::Affine: {
      const std::size_t K = n.coeffs.size();
      for (std::size_t i = 0; i < std::min(K, dim); ++i) g[i] += w * n.coeffs[i];
      for (std::size_t i = K; i < dim; ++i) g[i] += w * n.coeff_tail.at(i - K);
      return;
    }
    case Op::AtanSqOfAffine: {
      const double a = linear_form(n.coeffs, TailRule::zero(), x) + n.value;
      const double factor = 2.0 * std::atan(a) / (1.0 + a * a);
      for (std::size_t i = 0; i < std::min(n.coeffs.size(), dim); ++i) {
        g[i] += w * factor * n.coeffs[i];
      }
      return;
    }
    case Op::Square:
      subgradient_into(n.children[0], x, w * 2.0 * evaluate(n.children[0], x), g);
      return;
    case Op::AbsVal: {
      const double z = evaluate(n.children[0], x);
      subgradient_into(n.children[0], x, w * (z > 0.0 ? 1.0 : z < 0.0 ? -1.0 : 0.0), g);
      return;
    }
    case Op::Sum:
      for (const auto& c : n.children) subgradient_into(c, x, w, g);
      return;
    case Op::Scale:
      subgradient_into(n.children[0], x, w * n.value, g);
      return;
    case Op::Max: {
      std::size_t arg = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const double v = evaluate(n.children[i], x);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      subgradient_into(n.children[arg], x, w, g);
      return;
    }
    case Op::NormOneBlock:
      for (std::size_t i : n.indices) {
        if (i >= dim) continue;
        const double z = x.at(i);
        g[i] += w * (z > 0.0 ? 1.0 : z < 0.0 ? -1.0 : 0.0);
      }
      return;
    case Op::NormTwoSqBlock:
      for (std::size_t i : n.indices) {
        if (i < dim) g[i] += w * 2.0 * x.at(i);
      }
      return;
  }
}

struct DirSubgradient {
  const TailSeq& x;
  const TailSeq& u;
  double kink_tol;
  Vector& g;

  double sign(double z) const { return z > kink_tol ? 1.0 : z < -kink_tol ? -1.0 : 0.0; }

  void operator()(const FuncExpr& f, double w) const {
    if (w == 0.0) return;
    const ExprNode& n = f.node();
    const std::size_t dim = g.size();
    switch (n.op) {
      case Op::Const:
      case Op::LimsupAbs:
        return;
      case Op::Coord:
      case Op::Affine:
      case Op::AtanSqOfAffine:
      case Op::NormTwoSqBlock:
        // Smooth at x: the derivative is linear in u.
        subgradient_into(f, x, w, g);
        return;
      case Op::Square:
        (*this)(n.children[0], w * 2.0 * evaluate(n.children[0], x));
        return;
      case Op::AbsVal: {
        double s = sign(evaluate(n.children[0], x));
        if (s == 0.0) {
          const double d = ExactRules{x, u, kink_tol}(n.children[0]);
          s = d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0;
        }
        (*this)(n.children[0], w * s);
        return;
      }
      case Op::Sum:
        for (const auto& c : n.children) (*this)(c, w);
        return;
      case Op::Scale:
        (*this)(n.children[0], w * n.value);
        return;
      case Op::Max: {
        Vector vals;
        for (const auto& c : n.children) vals.push_back(evaluate(c, x));
        const double vmax = *std::max_element(vals.begin(), vals.end());
        const double tol = std::max(1e-12 * (1.0 + std::abs(vmax)), kink_tol);
        std::size_t arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vals.size(); ++i) {
          if (vals[i] < vmax - tol) continue;
          const double d = ExactRules{x, u, kink_tol}(n.children[i]);
          if (d > best) {
            best = d;
            arg = i;
          }
        }
        (*this)(n.children[arg], w);
        return;
      }
      case Op::NormOneBlock:
        for (std::size_t i : n.indices) {
          if (i >= dim) continue;
          double s = sign(x.at(i));
          if (s == 0.0) s = u.at(i) > 0.0 ? 1.0 : u.at(i) < 0.0 ? -1.0 : 0.0;
          g[i] += w * s;
        }
        return;
    }
  }
};

}  // namespace

DiniEstimate dini_upper_numeric(const Evaluable& f, const TailSeq& x, const TailSeq& u,
                                const StepSchedule& sched, bool convex, const Domain* domain) {
  sched.validate();
  DiniEstimate est;
  est.mode = convex ? DiniMode::ConvexMonotone : DiniMode::NumericLimsup;
  const double un = u.sup_norm();
  if (un == 0.0) {
    est.converged = true;
    return est;
  }
  const double t0 = sched.t0 > 0.0 ? sched.t0 : 1e-2 / un;
  if (domain && (!domain->contains(x) || !domain->contains(axpy(x, t0, u)))) {
    throw EvaluationError("difference quotient leaves the domain");
  }
  const double fx = f(x);
  if (!std::isfinite(fx)) throw EvaluationError("non-finite function value at x");

  std::vector<std::pair<double, double>> admissible;
  double t = t0;
  for (int j = 0; j < sched.count; ++j, t *= sched.ratio) {
    const double fy = f(axpy(x, t, u));
    const double q = (fy - fx) / t;
    if (!std::isfinite(q)) throw EvaluationError("non-finite difference quotient");
    est.quotients.emplace_back(t, q);
    const double noise = 4.0 * kEps * (1.0 + std::abs(fx) + std::abs(fy)) / t;
    if (noise <= 1e-9 * (1.0 + std::abs(q))) admissible.emplace_back(t, q);
  }
  const bool enough = admissible.size() >= 2;
  const auto& qs = enough ? admissible : est.quotients;
  const std::size_t k = qs.size();

  if (convex) {
    est.value = extrapolate(qs[k - 2], qs[k - 1]);
    if (k >= 3) {
      const double prev = extrapolate(qs[k - 3], qs[k - 2]);
      est.converged = enough && std::abs(est.value - prev) <= sched.converge_tol * (1.0 + std::abs(est.value));
    }
    return est;
  }

  // First-order correction of consecutive quotients; piecewise-linear pieces
  // are left unchanged and smooth pieces lose their O(t) bias.
  std::vector<double> r;
  for (std::size_t i = 1; i < k; ++i) r.push_back(extrapolate(qs[i - 1], qs[i]));
  if (r.empty()) r.push_back(qs[0].second);
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(sched.window), r.size());
  auto window_max = [&](std::size_t end) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = end - w; i < end; ++i) m = std::max(m, r[i]);
    return m;
  };
  est.value = window_max(r.size());
  est.converged = enough && r.size() > w && std::abs(est.value - window_max(r.size() - 1)) <= sched.converge_tol;
  return est;
}

DiniEstimate dini_upper_numeric(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                                const StepSchedule& sched, const Domain* domain) {
  return dini_upper_numeric([&f](const TailSeq& y) { return evaluate(f, y); }, x, u, sched,
                            f.is_convex(), domain);
}

double dir_deriv_exact(const FuncExpr& f, const TailSeq& x, const TailSeq& u, double kink_tol) {
  return ExactRules{x, u, kink_tol}(f);
}

DiniEstimate dini_upper(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                        const StepSchedule& sched) {
  DiniEstimate est;
  est.value = dir_deriv_exact(f, x, u);
  if (!std::isfinite(est.value)) return dini_upper_numeric(f, x, u, sched);
  est.mode = DiniMode::ExactSymbolic;
  est.converged = true;
  return est;
}

Vector dir_deriv_subgradient(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                             std::size_t dim, double kink_tol) {
  Vector g(dim, 0.0);
  DirSubgradient{x, u, kink_tol, g}(f, 1.0);
  return g;
}

Vector subgradient(const FuncExpr& f, const TailSeq& x, std::size_t dim) {
  Vector g(dim, 0.0);
  subgradient_into(f, x, 1.0, g);
  return g;
}

double lipschitz_seminorm(const Evaluable& f, const TailSeq& center, double r,
                          std::size_t dim, int samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw InvariantError("seminorm radius must be positive");
  if (dim == 0 || samples < 2) {
    throw InvariantError("seminorm sampling is degenerate: every pair coincides");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const TailSeq c = center.extended(dim);
  const Vector& c0 = c.head();

  auto random_unit = [&] {
    Vector s(dim);
    double m = 0.0;
    while (m == 0.0) {
      for (double& v : s) v = unif(rng);
      for (double v : s) m = std::max(m, std::abs(v));
    }
    for (double& v : s) v /= m;
    return s;
  };
  auto basis = [&](std::size_t k) {
    Vector s(dim, 0.0);
    s[k % dim] = (k / dim) % 2 == 0 ? 1.0 : -1.0;
    return s;
  };
  auto at = [&](const Vector& offset, double scale) {
    Vector h = c0;
    for (std::size_t i = 0; i < dim; ++i) h[i] += scale * offset[i];
    return c.with_head(h);
  };

  double best = 0.0;
  const double rho = 0.999 * r;
  const double eta = 1e-3 * r;
  const int half = samples / 2;
  for (int k = 0; k < half; ++k) {
    const Vector s = static_cast<std::size_t>(k) < 2 * dim ? basis(k) : random_unit();
    const double q = std::abs(f(at(s, rho)) - f(at(s, -rho))) / (2.0 * rho);
    best = std::max(best, q);
  }
  for (int k = 0; k < samples - half; ++k) {
    const Vector b = random_unit();
    const double lam = (rho - eta) * std::abs(unif(rng));
    const Vector v = static_cast<std::size_t>(k) < 2 * dim ? basis(k) : random_unit();
    Vector h = c0;
    for (std::size_t i = 0; i < dim; ++i) h[i] += lam * b[i];
    const TailSeq x = c.with_head(h);
    for (std::size_t i = 0; i < dim; ++i) h[i] += eta * v[i];
    const TailSeq y = c.with_head(h);
    best = std::max(best, std::abs(f(x) - f(y)) / eta);
  }
  return best;
}

double lipschitz_seminorm(const FuncExpr& f, const TailSeq& center, double r, int samples,
                          std::uint64_t seed) {
  std::size_t dim = std::max<std::size_t>(center.head_size(), 1);
  if (auto m = f.max_index()) dim = std::max(dim, *m + 1);
  return lipschitz_seminorm([&f](const TailSeq& y) { return evaluate(f, y); }, center, r, dim,
                            samples, seed);
}

std::vector<SublinearityViolation> sublinearity_check(const DirectionalMap& phi,
                                                      const std::vector<TailSeq>& dirs,
                                                      double tol) {
  std::vector<SublinearityViolation> out;
  Vector vals;
  vals.reserve(dirs.size());
  for (const auto& u : dirs) vals.push_back(phi(u));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (double lam : {0.5, 2.0, 10.0}) {
      const double gap = std::abs(phi(lam * dirs[i]) - lam * vals[i]);
      if (gap > tol * lam) {
        out.push_back({SublinearityViolation::Kind::Homogeneity, i, i, lam, gap});
      }
    }
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      double sum = 0.0;
      try {
        sum = phi(dirs[i] + dirs[j]);
      } catch (const InvariantError&) {
        continue;  // tails not addable in closed form
      }
      const double excess = sum - vals[i] - vals[j];
      if (excess > tol) {
        out.push_back({SublinearityViolation::Kind::Subadditivity, i, j, 0.0, excess});
      }
    }
  }
  return out;
}

bool gateaux_linearity_check(const FuncExpr& f, const TailSeq& x,
                             const std::vector<TailSeq>& dirs, double tol) {
  auto D = [&](const TailSeq& u) { return dini_upper(f, x, u).value; };
  Vector vals;
  vals.reserve(dirs.size());
  for (const auto& u : dirs) {
    const double v = D(u);
    if (std::abs(D((-1.0) * u) + v) > tol * (1.0 + std::abs(v))) return false;
    vals.push_back(v);
  }
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      TailSeq s;
      try {
        s = dirs[i] + dirs[j];
      } catch (const InvariantError&) {
        continue;
      }
      const double lin = vals[i] + vals[j];
      if (std::abs(D(s) - lin) > tol * (1.0 + std::abs(lin))) return false;
    }
  }
  return true;
}

std::vector<TailSeq> sample_directions(std::size_t dim, int random, std::uint64_t seed) {
  std::vector<TailSeq> dirs;
  dirs.reserve(2 * dim + static_cast<std::size_t>(std::max(random, 0)));
  for (std::size_t i = 0; i < dim; ++i) {
    dirs.push_back(TailSeq::basis(dim, i, 1.0));
    dirs.push_back(TailSeq::basis(dim, i, -1.0));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int k = 0; k < random && dim > 0; ++k) {
    Vector v(dim);
    double m = 0.0;
    while (m == 0.0) {
      for (double& e : v) e = unif(rng);
      for (double e : v) m = std::max(m, std::abs(e));
    }
    for (double& e : v) e /= m;
    dirs.emplace_back(std::move(v));
  }
  return dirs;
}

}  // namespace dinicert
