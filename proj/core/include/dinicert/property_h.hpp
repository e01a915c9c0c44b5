#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dinicert/calculus.hpp"
#include "dinicert/family.hpp"
#include "dinicert/problem.hpp"

namespace dinicert {

struct PropertyHConfig {
  int samples = 512;
  std::uint64_t seed = 1;
  /// Largest accepted seminorm at the last scheduled n.
  double decay_tol = 1e-3;
  double limit_tol = 1e-6;
  int random_dirs = 16;
  double sublinear_tol = 1e-9;
};

struct DecayEntry {
  std::size_t n = 0;
  double seminorm = 0.0;
};

struct PropertyHReport {
  std::vector<DecayEntry> decay;
  /// |f_inf(xhat) - f_nmax(xhat)|.
  double limit_agreement = 0.0;
  std::vector<std::pair<std::size_t, std::vector<SublinearityViolation>>> violations;
  /// Least-squares slope of log(seminorm) against n over the positive entries.
  double slope = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

/// Seminorm decay of f_n - f_inf on the ball B(xhat, r) for each scheduled n,
/// plus sampled sublinearity of u -> D+f_n(xhat)(u).
PropertyHReport check_property_h(const ConstraintFamily& family, const TailSeq& xhat, double r,
                                 const std::vector<std::size_t>& schedule,
                                 const PropertyHConfig& cfg = {});

/// Measured |f_n - f_inf| seminorm around xhat.
double limit_seminorm(const ConstraintFamily& family, std::size_t n, const TailSeq& xhat,
                      double r, int samples = 512, std::uint64_t seed = 1);

struct DiniLimitRow {
  std::size_t k = 0;
  std::size_t dir = 0;
  double lhs = 0.0;  // D+f_inf(xhat)(u)
  double rhs = 0.0;  // D+f_k(xhat)(u)
  double residual = 0.0;
  double bound = 0.0;  // (eps_k + tol) |u|
};

struct DiniLimitReport {
  std::vector<DiniLimitRow> rows;
  /// max(residual - bound); <= 0 means every row is inside its bound.
  double worst_excess = 0.0;
  bool passed() const { return worst_excess <= 0.0; }
};

DiniLimitReport verify_dini_limit(const ConstraintFamily& family, const TailSeq& xhat,
                                  const std::vector<TailSeq>& dirs,
                                  const std::vector<std::size_t>& ks, double r,
                                  double tol = 1e-9, const PropertyHConfig& cfg = {});

struct SupSwapResult {
  double lhs = 0.0;  // discretized limsup of sup_k quotients
  double rhs = 0.0;  // sup_k D+f_k(xhat)(u)
  double residual = 0.0;
  double bound = 0.0;  // tol + eps_M |u|
  bool converged = true;
  Verdict verdict = Verdict::Certified;
};

/// The sup over k runs over f_1..f_M and f_inf; eps_M covers the rest.
SupSwapResult verify_sup_swap(const ConstraintFamily& family, const TailSeq& xhat,
                              const TailSeq& u, const StepSchedule& sched = {}, double r = 0.5,
                              double tol = 1e-6, const PropertyHConfig& cfg = {});

struct Interchange {
  double max_of_infs = 0.0;
  double inf_of_maxes = 0.0;
};

/// tables[i][j] = h_i(s_j) on a shared ascending grid. Each row must be
/// finite and non-decreasing in s; throws InvariantError otherwise.
Interchange max_inf_interchange(const std::vector<Vector>& tables);

}  // namespace dinicert
