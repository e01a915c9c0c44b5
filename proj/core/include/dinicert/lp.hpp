#pragma once

#include <string>
#include <vector>

#include "dinicert/tail_seq.hpp"

namespace dinicert {

/// maximize objective . x  subject to rows, x >= 0.
struct LinearProgram {
  enum class Sense { Le, Ge, Eq };
  struct Row {
    Vector coeffs;
    Sense sense = Sense::Le;
    double rhs = 0.0;
  };

  Vector objective;
  std::vector<Row> rows;

  std::size_t num_vars() const { return objective.size(); }
  void add_row(Vector coeffs, Sense sense, double rhs) {
    rows.push_back({std::move(coeffs), sense, rhs});
  }
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
  Status status = Status::IterationLimit;
  Vector x;
  double value = 0.0;
  int pivots = 0;
};

std::string to_string(LpResult::Status s);

/// Dense two-phase tableau simplex with Bland's rule (no cycling).
/// `tol` guards pivots and the phase-1 feasibility test.
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9, int max_pivots = 100000);

}  // namespace dinicert
