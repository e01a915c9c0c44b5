#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dinicert/expr.hpp"
#include "dinicert/lp.hpp"
#include "dinicert/problem.hpp"

namespace dinicert {

/// A function on the search box with one subgradient oracle. The engine
/// varies the first `dim` entries of a point and keeps the tail fixed.
struct ConvexFunction {
  std::function<double(const TailSeq&)> value;
  std::function<Vector(const TailSeq&, std::size_t dim)> subgradient;
  bool convex = true;

  static ConvexFunction from_expr(FuncExpr f);
  /// u -> d+f(xhat)(u) + shift.
  static ConvexFunction directional(FuncExpr f, TailSeq xhat, double shift = 0.0,
                                    double kink_tol = 0.0);
  /// x -> f(x) + shift.
  ConvexFunction shifted(double shift) const;
};

/// h_0..h_M plus an optional limit slot h_inf, all on one domain.
struct AlternativeSystem {
  std::vector<ConvexFunction> funcs;
  std::optional<ConvexFunction> limit;
  Domain domain;
  /// Tail used for search points; the domain center when unset.
  std::optional<TailSeq> anchor;

  std::size_t slots() const { return funcs.size() + (limit ? 1 : 0); }
  const ConvexFunction& slot(std::size_t k) const {
    return k < funcs.size() ? funcs[k] : *limit;
  }
  TailSeq lift(std::span<const double> head) const;

  /// h_0 = objective, h_n = f_n (n <= M), h_inf = f_inf.
  static AlternativeSystem from_problem(const ProblemSpec& p);
  /// g_k(u) = d+h_k(xhat)(u) + h_k(xhat) on the box [-1, 1]^dim.
  static AlternativeSystem linearized(const std::vector<FuncExpr>& funcs,
                                      const std::optional<FuncExpr>& limit,
                                      const TailSeq& xhat, std::size_t dim,
                                      double kink_tol = 0.0);
};

struct DescentConfig {
  int restarts = 8;
  int iterations = 300;
  int polish = 900;
  /// Initial step; 0 means half the search radius.
  double eta0 = 0.0;
  std::uint64_t seed = 1;
  /// Every stride-th iterate is kept as a cut.
  int cut_stride = 50;
};

struct SupMinimum {
  Vector head;
  TailSeq point;
  double value = 0.0;
  std::vector<Vector> cuts;
  int start = 0;
};

/// Projected subgradient descent on max_k h_k over the search box. Starts:
/// the box center, `extra_starts`, then seeded uniform points. The step is
/// eta0/sqrt(k), followed by a geometrically decaying polish phase.
SupMinimum minimize_sup(const AlternativeSystem& sys, const DescentConfig& cfg,
                        const std::vector<Vector>& extra_starts = {});

/// Shor's r-algorithm on max_k h_k from `start`: subgradient steps in a
/// metric dilated along successive subgradient differences, with an adaptive
/// step and iterates clamped to the search box. Returns the best iterate.
SupMinimum refine_dilation(const AlternativeSystem& sys, const Vector& start,
                           int iterations = 20000, double step = 0.0);

struct AlternativeConfig {
  double tol = 1e-6;
  DescentConfig descent;
  int max_rounds = 40;
  /// Grid points per axis of the audit for dim <= 3; random samples otherwise.
  int audit_grid = 21;
  int audit_samples = 4096;
};

/// Value matrix H[j][k] = h_k(u_j). Returns simplex weights alpha with
/// sum_k alpha_k H[j][k] >= 0 for every j, or nothing when infeasible.
std::optional<Vector> find_multipliers(const std::vector<Vector>& values, double lp_tol = 1e-9);
std::optional<MultiplierCertificate> find_multipliers(const AlternativeSystem& sys,
                                                      const std::vector<TailSeq>& cuts,
                                                      double lp_tol = 1e-9);

/// max_{alpha in simplex} min_j sum_k alpha_k H[j][k] and its maximizer.
struct GameSolution {
  Vector alpha;
  double value = 0.0;
  /// Optimal mixture over cuts (weights lambda_j) from the dual program.
  Vector lambda;
};
GameSolution solve_game(const std::vector<Vector>& values, double lp_tol = 1e-9);

/// Exactly one of: a point with sup_k h_k < -tol, or simplex multipliers whose
/// weighted sum stays >= -tol on the domain. Inconclusive at the round cap.
/// Throws InvariantError for non-convex input.
AlternativeOutcome solve_alternative(const AlternativeSystem& sys, const AlternativeConfig& cfg = {});

/// Searches (x, t) with sup_k h_k(x) - (1 - t) h_k(xhat) < 0 over a t-grid;
/// otherwise solves the linearized system at xhat.
AlternativeOutcome homotopy_alternative(const std::vector<FuncExpr>& funcs,
                                        const std::optional<FuncExpr>& limit,
                                        const TailSeq& xhat, const Domain& domain,
                                        const AlternativeConfig& cfg = {});

/// Smallest weighted sum sum_k alpha_k h_k over the audit sample.
struct AuditResult {
  double min_value = 0.0;
  TailSeq argmin;
};
AuditResult audit_weighted_sum(const AlternativeSystem& sys, const Vector& alpha,
                               int grid, int samples, std::uint64_t seed);

}  // namespace dinicert
