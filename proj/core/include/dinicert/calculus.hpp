#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dinicert/expr.hpp"
#include "dinicert/problem.hpp"
#include "dinicert/tail_seq.hpp"

namespace dinicert {


using Evaluable = std::function<double(const TailSeq&)>;

/// Step sizes t_j = t0 * ratio^j, j < count. t0 <= 0 means 1e-2 / |u|_inf.
struct StepSchedule {
  double t0 = 0.0;
  double ratio = 0.5;
  int count = 30;
  int window = 8;
  double converge_tol = 1e-7;
  void validate() const;
};

enum class DiniMode { NumericLimsup, ExactSymbolic, ConvexMonotone };

std::string to_string(DiniMode m);

struct DiniEstimate {
  double value = 0.0;
  std::vector<std::pair<double, double>> quotients;  // (t, quotient), t decreasing
  DiniMode mode = DiniMode::NumericLimsup;
  bool converged = false;
};

/// Discretized limsup of (f(x + t u) - f(x)) / t. Quotients dominated by
/// rounding error are skipped. With `convex` set the quotients are monotone
/// and the limit is extrapolated from the two smallest admissible steps.
/// When `domain` is given every evaluated point must lie inside it.
DiniEstimate dini_upper_numeric(const Evaluable& f, const TailSeq& x, const TailSeq& u,
                                const StepSchedule& sched = {}, bool convex = false,
                                const Domain* domain = nullptr);
DiniEstimate dini_upper_numeric(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                                const StepSchedule& sched = {}, const Domain* domain = nullptr);

/// Exact one-sided derivative d+f(x)(u) from the AST rules. `kink_tol`
/// widens the kink and active-set tests, which is what a point known only
/// to solver accuracy needs; 0 gives the exact rule.
double dir_deriv_exact(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                       double kink_tol = 0.0);

/// Exact rule, or the numeric estimate when the rule is not finite.
DiniEstimate dini_upper(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                        const StepSchedule& sched = {});

/// One subgradient with respect to the first `dim` entries (tail held fixed).
/// Exact for the gradient of smooth pieces; kinks pick a valid element.
Vector subgradient(const FuncExpr& f, const TailSeq& x, std::size_t dim);

/// One subgradient of the sublinear map u -> d+f(x)(u) at u, over the first
/// `dim` entries. Uses the same kink and active-set rules as dir_deriv_exact.
Vector dir_deriv_subgradient(const FuncExpr& f, const TailSeq& x, const TailSeq& u,
                             std::size_t dim, double kink_tol = 0.0);

/// Sampled lower bound of sup |f(x) - f(y)| / |x - y|_inf over the ball of
/// radius r around `center`, varying the first `dim` entries.
double lipschitz_seminorm(const Evaluable& f, const TailSeq& center, double r,
                          std::size_t dim, int samples = 512, std::uint64_t seed = 1);
double lipschitz_seminorm(const FuncExpr& f, const TailSeq& center, double r,
                          int samples = 512, std::uint64_t seed = 1);

struct SublinearityViolation {
  enum class Kind { Subadditivity, Homogeneity };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;  // second direction for subadditivity
  double lambda = 0.0;
  double amount = 0.0;
};

using DirectionalMap = std::function<double(const TailSeq&)>;

std::vector<SublinearityViolation> sublinearity_check(const DirectionalMap& phi,
                                                      const std::vector<TailSeq>& dirs,
                                                      double tol = 1e-9);

/// True iff u -> D+f(x)(u) is odd and additive on the sampled directions.
bool gateaux_linearity_check(const FuncExpr& f, const TailSeq& x,
                             const std::vector<TailSeq>& dirs, double tol = 1e-6);

/// +-e_i for i < dim followed by `random` seeded sup-normalized directions.
std::vector<TailSeq> sample_directions(std::size_t dim, int random, std::uint64_t seed);

}  // namespace dinicert
