#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dinicert/alternative.hpp"
#include "dinicert/expr.hpp"
#include "dinicert/lp.hpp"
#include "dinicert/problem.hpp"

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the routine it is meant to check.
namespace oracle {

using dinicert::FuncExpr;
using dinicert::TailSeq;
using dinicert::Vector;

/// Best objective over all basic feasible solutions, or nothing when no
/// vertex is feasible. Only meant for bounded LPs with a handful of variables.
std::optional<double> lp_by_vertices(const dinicert::LinearProgram& lp, double tol = 1e-9);

/// Game value max_alpha min_j alpha . H[j] by vertex enumeration.
double game_value(const std::vector<Vector>& H);

/// min over a points^d grid of the open search box of sum_k alpha_k h_k.
double grid_min(const dinicert::AlternativeSystem& sys, const Vector& alpha, int points);

/// One-sided quotient with Richardson extrapolation at a small step.
double richardson_dini(const FuncExpr& f, const TailSeq& x, const TailSeq& u, double t = 1e-6);

/// Closed-form optimum and multipliers of the (2N+2)-dimensional example.
struct Example2Truth {
  Vector xhat;
  Vector beta;  // beta[0] = 1, beta[n + 1] for constraint n + 1
};
Example2Truth example2_truth(std::size_t N);

/// Random AST over coordinates 0..dim-1. `convex_only` drops the
/// non-convex leaf.
FuncExpr random_expr(std::mt19937_64& rng, std::size_t dim, int depth, bool convex_only);

Vector uniform_vector(std::mt19937_64& rng, std::size_t dim, double lo, double hi);

}  // namespace oracle
