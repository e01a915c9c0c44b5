#include "dinicert/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dinicert {

std::string to_string(LpResult::Status s) {
  switch (s) {
    case LpResult::Status::Optimal: return "optimal";
    case LpResult::Status::Infeasible: return "infeasible";
    case LpResult::Status::Unbounded: return "unbounded";
    case LpResult::Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& obj(std::size_t j) { return at(m_, j); }
  double& rhs(std::size_t i) { return at(i, n_); }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t j = 0; j <= n_; ++j) at(pr, j) /= p;
    at(pr, pc) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(pr, j);
      at(i, pc) = 0.0;
      if (i < m_ && at(i, n_) < 0.0 && at(i, n_) > -1e-11) at(i, n_) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Objective row holds z_j - c_j for a maximization with costs c.
  void load_costs(const Vector& c) {
    for (std::size_t j = 0; j <= n_; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < m_; ++i) z += c[basis_[i]] * at(i, j);
      obj(j) = z - (j < n_ ? c[j] : 0.0);
    }
  }

  // `allowed` limits the entering columns (phase 2 skips artificials).
  enum class Outcome { Optimal, Unbounded, Limit };
  Outcome run(std::size_t allowed, double tol, int& pivots, int max_pivots) {
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (obj(j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return Outcome::Optimal;
      if (pivots >= max_pivots) return Outcome::Limit;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a > tol) best = std::min(best, std::max(rhs(i), 0.0) / a);
      }
      if (!std::isfinite(best)) return Outcome::Unbounded;
      // Bland tie-break only among ratios equal up to rounding.
      const double window = best + 1e-12 * (1.0 + best);
      std::size_t leave = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= tol || std::max(rhs(i), 0.0) / a > window) continue;
        if (leave == m_ || basis_[i] < basis_[leave]) leave = i;
      }
      pivot(leave, enter);
      ++pivots;
    }
  }

 private:
  std::size_t m_, n_;
  Vector t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol, int max_pivots) {
  using Sense = LinearProgram::Sense;
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.rows.size();
  for (const auto& r : lp.rows) {
    if (r.coeffs.size() != n) throw InvariantError("LP row length does not match variables");
  }

  std::vector<Sense> sense(m);
  Vector b(m);
  Vector sign(m, 1.0);
  std::size_t ns = 0, na = 0;
  double bmax = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    sense[i] = lp.rows[i].sense;
    b[i] = lp.rows[i].rhs;
    // A >= row with zero right-hand side is a <= row after negation, which
    // needs no artificial variable.
    if (b[i] < 0.0 || (b[i] == 0.0 && sense[i] == Sense::Ge)) {
      sign[i] = -1.0;
      b[i] = -b[i];
      if (sense[i] == Sense::Le) {
        sense[i] = Sense::Ge;
      } else if (sense[i] == Sense::Ge) {
        sense[i] = Sense::Le;
      }
    }
    bmax = std::max(bmax, b[i]);
    if (sense[i] != Sense::Eq) ++ns;
    if (sense[i] != Sense::Le) ++na;
  }

  const std::size_t N = n + ns + na;
  Tableau T(m, N);
  std::size_t slack = n, art = n + ns;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T.at(i, j) = sign[i] * lp.rows[i].coeffs[j];
    T.rhs(i) = b[i];
    if (sense[i] == Sense::Le) {
      T.at(i, slack) = 1.0;
      T.basis()[i] = slack++;
    } else {
      if (sense[i] == Sense::Ge) T.at(i, slack++) = -1.0;
      T.at(i, art) = 1.0;
      T.basis()[i] = art++;
    }
  }

  LpResult res;
  const std::size_t first_art = n + ns;
  if (na > 0) {
    Vector c1(N, 0.0);
    for (std::size_t j = first_art; j < N; ++j) c1[j] = -1.0;
    T.load_costs(c1);
    if (T.run(N, tol, res.pivots, max_pivots) == Tableau::Outcome::Limit) return res;
    if (T.obj(N) < -tol * 10.0 * bmax) {
      res.status = LpResult::Status::Infeasible;
      return res;
    }
    // Artificials left at level zero leave the basis where possible;
    // rows with no other nonzero entry are redundant and stay inert.
    for (std::size_t i = 0; i < m; ++i) {
      if (T.basis()[i] < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(T.at(i, j)) > tol) {
          T.pivot(i, j);
          ++res.pivots;
          break;
        }
      }
    }
  }

  Vector c(N, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), c.begin());
  T.load_costs(c);
  const auto outcome = T.run(first_art, tol, res.pivots, max_pivots);
  if (outcome == Tableau::Outcome::Limit) return res;
  if (outcome == Tableau::Outcome::Unbounded) {
    res.status = LpResult::Status::Unbounded;
    return res;
  }
  res.status = LpResult::Status::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (T.basis()[i] < n) res.x[T.basis()[i]] = std::max(0.0, T.rhs(i));
  }
  for (std::size_t j = 0; j < n; ++j) res.value += lp.objective[j] * res.x[j];
  return res;
}

}  // namespace dinicert
