#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace oracle {

using dinicert::LinearProgram;

namespace {

// Visits every k-subset of {0..n-1}.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::optional<double> lp_by_vertices(const LinearProgram& lp, double tol) {
  const std::size_t n = lp.num_vars();
  // Constraint list: the LP rows, then x_j >= 0.
  std::vector<Vector> A;
  std::vector<double> b;
  for (const auto& r : lp.rows) {
    A.push_back(r.coeffs);
    b.push_back(r.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    A.push_back(e);
    b.push_back(0.0);
  }
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x(static_cast<Eigen::Index>(j)) < -tol) return false;
    }
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += lp.rows[i].coeffs[j] * x(static_cast<Eigen::Index>(j));
      const double slack = tol * (1.0 + std::abs(lp.rows[i].rhs));
      switch (lp.rows[i].sense) {
        case LinearProgram::Sense::Le: if (s > lp.rows[i].rhs + slack) return false; break;
        case LinearProgram::Sense::Ge: if (s < lp.rows[i].rhs - slack) return false; break;
        case LinearProgram::Sense::Eq: if (std::abs(s - lp.rows[i].rhs) > slack) return false; break;
      }
    }
    return true;
  };

  std::optional<double> best;
  const auto N = static_cast<Eigen::Index>(n);
  for_each_subset(A.size(), n, [&](const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd M(N, N);
    Eigen::VectorXd rhs(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) M(i, j) = A[rows[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)];
      rhs(i) = b[rows[static_cast<std::size_t>(i)]];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (!feasible(x)) return;
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += lp.objective[j] * x(static_cast<Eigen::Index>(j));
    if (!best || v > *best) best = v;
  });
  return best;
}

double game_value(const std::vector<Vector>& H) {
  // max v s.t. sum alpha = 1, alpha . H[j] >= v, alpha >= 0, v free; v is
  // split into v+ - v- and capped so the LP stays bounded.
  const std::size_t K = H[0].size();
  LinearProgram lp;
  lp.objective.assign(K + 2, 0.0);
  lp.objective[K] = 1.0;
  lp.objective[K + 1] = -1.0;
  Vector ones(K + 2, 0.0);
  std::fill(ones.begin(), ones.begin() + static_cast<long>(K), 1.0);
  lp.add_row(ones, LinearProgram::Sense::Eq, 1.0);
  for (const auto& h : H) {
    Vector r(K + 2, 0.0);
    std::copy(h.begin(), h.end(), r.begin());
    r[K] = -1.0;
    r[K + 1] = 1.0;
    lp.add_row(r, LinearProgram::Sense::Ge, 0.0);
  }
  Vector cap(K + 2, 0.0);
  cap[K] = 1.0;
  lp.add_row(cap, LinearProgram::Sense::Le, 1e3);
  cap[K] = 0.0;
  cap[K + 1] = 1.0;
  lp.add_row(cap, LinearProgram::Sense::Le, 1e3);
  return lp_by_vertices(lp).value();
}

double grid_min(const dinicert::AlternativeSystem& sys, const Vector& alpha, int points) {
  const Vector lo = sys.domain.search_lo();
  const Vector hi = sys.domain.search_hi();
  const std::size_t d = lo.size();
  std::vector<int> idx(d, 0);
  double best = std::numeric_limits<double>::infinity();
  Vector head(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      head[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (points - 1);
    }
    const TailSeq x = sys.lift(head);
    double s = 0.0;
    for (std::size_t k = 0; k < sys.slots(); ++k) {
      if (alpha[k] != 0.0) s += alpha[k] * sys.slot(k).value(x);
    }
    best = std::min(best, s);
    std::size_t i = 0;
    while (i < d && ++idx[i] == points) idx[i++] = 0;
    if (i == d) break;
  }
  return best;
}

double richardson_dini(const FuncExpr& f, const TailSeq& x, const TailSeq& u, double t) {
  const double fx = dinicert::evaluate(f, x);
  auto q = [&](double s) { return (dinicert::evaluate(f, x + s * u) - fx) / s; };
  return 2.0 * q(t / 2.0) - q(t);
}

Example2Truth example2_truth(std::size_t N) {
  Example2Truth t;
  t.xhat.assign(2 * N + 2, 0.0);
  t.beta.assign(N + 2, 0.0);
  t.beta[0] = 1.0;
  for (std::size_t n = 0; n <= N; ++n) {
    const double k = static_cast<double>(n) + 2.0;
    t.xhat[2 * n] = -1.0 / k;
    t.beta[n + 1] = (1.0 / k) * (1.0 + 2.0 / k);
  }
  return t;
}

Vector uniform_vector(std::mt19937_64& rng, std::size_t dim, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vector v(dim);
  for (double& x : v) x = U(rng);
  return v;
}

FuncExpr random_expr(std::mt19937_64& rng, std::size_t dim, int depth, bool convex_only) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 5);
  std::uniform_int_distribution<std::size_t> coord(0, dim - 1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto subset = [&] {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < dim; ++i) {
      if (U(rng) > 0.0) s.push_back(i);
    }
    if (s.empty()) s.push_back(coord(rng));
    return s;
  };
  int kind = pick(rng);
  if (convex_only && kind == 5) kind = 0;
  switch (kind) {
    case 0: return FuncExpr::affine(uniform_vector(rng, dim, -1.0, 1.0), U(rng));
    case 1: return FuncExpr::abs(FuncExpr::affine(uniform_vector(rng, dim, -1.0, 1.0), U(rng)));
    case 2: return FuncExpr::square(FuncExpr::affine(uniform_vector(rng, dim, -1.0, 1.0), U(rng)));
    case 3: return FuncExpr::norm_one(subset());
    case 4: return FuncExpr::norm_two_sq(subset());
    case 5: return FuncExpr::atan_sq_affine(uniform_vector(rng, dim, -1.0, 1.0), U(rng));
    case 6: {
      std::vector<FuncExpr> c;
      for (int i = 0; i < 2; ++i) c.push_back(random_expr(rng, dim, depth - 1, convex_only));
      return FuncExpr::sum(std::move(c));
    }
    case 7: {
      std::vector<FuncExpr> c;
      for (int i = 0; i < 2; ++i) c.push_back(random_expr(rng, dim, depth - 1, convex_only));
      return FuncExpr::max(std::move(c));
    }
    case 8: return FuncExpr::scale(0.5 + std::abs(U(rng)), random_expr(rng, dim, depth - 1, convex_only));
    default: return FuncExpr::sum({random_expr(rng, dim, depth - 1, convex_only), FuncExpr::limsup_abs()});
  }
}

}  // namespace oracle
