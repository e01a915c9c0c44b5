#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dinicert/alternative.hpp"
#include "dinicert/problem.hpp"

namespace dinicert {

struct KktConfig {
  double feas_tol = 1e-9;
  double slack_tol = 1e-9;
  double stat_tol = 1e-9;
  double norm_tol = 1e-9;
  /// |f_n(xhat)| <= act_tol marks constraint n active.
  double act_tol = 1e-7;
  /// Passed to the exact derivative rules (see dir_deriv_exact).
  double kink_tol = 0.0;
  int random_dirs = 128;
  std::uint64_t seed = 1;
  /// Tail multipliers summed term by term past M before the band takes over.
  std::size_t explicit_tail = 64;
  bool check_slater = false;
  bool check_gateaux = false;
  int max_rounds = 40;
  DescentConfig descent{};

  /// Tolerances for points that are only known to solver accuracy.
  static KktConfig for_solver_output();
};

/// Checks, in order: domain, nonnegativity, normalization, complementary
/// slackness, feasibility, stationarity, then the optional Slater and
/// Gateaux conditions. The first hard failure decides a Rejected verdict.
CertificateReport verify_kkt_certificate(const ProblemSpec& problem, const TailSeq& xhat,
                                         const MultiplierCertificate& cert,
                                         const KktConfig& cfg = {});

/// max of D+f_n(xhat)(w) over n <= M, the limit slot, and a few probes past M.
double slater_margin(const ProblemSpec& problem, const TailSeq& xhat, const TailSeq& w,
                     double kink_tol = 0.0);

struct SlaterDirection {
  TailSeq w;  // sup-normalized
  double margin = 0.0;
};

std::optional<SlaterDirection> slater_direction(const ProblemSpec& problem, const TailSeq& xhat,
                                                const KktConfig& cfg = {});

struct KktSearch {
  std::optional<MultiplierCertificate> cert;  // Simplex mode
  CertificateReport report;
  double game_value = 0.0;  // worst weighted derivative over the cuts
  std::size_t cuts = 0;
  /// Active constraint indices n >= 1; the limit slot is reported separately.
  std::vector<std::size_t> active;
  bool limit_active = false;
  std::string failure;

  bool found() const { return cert.has_value() && report.certified(); }
};

/// Cutting-plane LP over derivative values d+f_k(xhat)(u_j) with inactive
/// multipliers fixed at zero. The result is audited by verify_kkt_certificate.
KktSearch find_kkt_certificate(const ProblemSpec& problem, const TailSeq& xhat,
                               const KktConfig& cfg = {});

struct InvexityViolation {
  std::size_t function = 0;  // index into the input list
  std::size_t sample = 0;
  double lhs = 0.0;  // D+f(xhat)(mu(x))
  double rhs = 0.0;  // f(x) - f(xhat)
};

using KernelMap = std::function<TailSeq(const TailSeq& x)>;

/// Violations of D+f(xhat)(mu(x)) <= f(x) - f(xhat) + tol. An empty `mu`
/// means mu(x) = x - xhat.
std::vector<InvexityViolation> invexity_check(const std::vector<FuncExpr>& funcs,
                                              const TailSeq& xhat, const KernelMap& mu,
                                              const std::vector<TailSeq>& samples,
                                              double tol = 1e-9);

struct SufficiencyResult {
  bool sufficient = false;
  /// Smallest weighted directional derivative over the direction sample.
  double min_stationarity = 0.0;
  /// Smallest L(x) - L(xhat) + band |x - xhat| over the audit sample.
  double min_gap = 0.0;
  std::string reason;
};

/// Global minimality of xhat for the Lagrangian f_0 + sum beta_n f_n +
/// beta_inf f_inf. Throws InvariantError when some function is not convex.
SufficiencyResult sufficiency_check_convex(const ProblemSpec& problem, const TailSeq& xhat,
                                           const MultiplierCertificate& cert,
                                           const KktConfig& cfg = {}, int samples = 2000);

struct SolveConfig {
  int starts = 32;
  std::vector<double> penalties{10.0, 100.0, 1000.0};
  DescentConfig descent{};
  double feas_tol = 1e-6;
  std::uint64_t seed = 1;
};

struct SolveStep {
  double rho = 0.0;
  double penalized = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;
};

struct TruncatedSolve {
  Vector head;
  TailSeq point;
  double objective = 0.0;
  double max_violation = 0.0;
  std::vector<SolveStep> history;
};

/// Exact-penalty descent on f_0 + rho sum_{n <= M} max(f_n, 0), rho raised
/// until the best point is feasible. Throws std::runtime_error otherwise.
TruncatedSolve solve_truncated(const ProblemSpec& problem, const SolveConfig& cfg = {});
TruncatedSolve solve_truncated(const ProblemSpec& problem, std::size_t M,
                               const SolveConfig& cfg = {});

}  // namespace dinicert
