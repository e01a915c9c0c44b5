#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dinicert/expr.hpp"
#include "dinicert/family.hpp"
#include "dinicert/tail_seq.hpp"

namespace dinicert {

/// Open feasible region. Searches run on the head coordinates of the closed
/// box obtained by pulling the boundary in by `margin()`; entries past the
/// head stay at the anchor's tail.
class Domain {
 public:
  enum class Kind { Ball, Box };

  Domain() = default;
  /// Open sup-norm ball. `dim` widens the searched head beyond the center's.
  static Domain ball(TailSeq center, double radius, std::optional<std::size_t> dim = {});
  static Domain box(Vector lo, Vector hi);

  Kind kind() const { return kind_; }
  const TailSeq& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  double margin() const { return margin_; }
  std::size_t dim() const { return dim_; }

  /// Lower/upper corners of the shrunken search box in head coordinates.
  Vector search_lo() const;
  Vector search_hi() const;
  /// Point whose tail is used for every head-coordinate search point.
  TailSeq anchor() const;
  TailSeq lift(std::span<const double> head) const { return anchor().with_head(head); }

  /// Strict interior membership.
  bool contains(const TailSeq& x) const;
  /// Clamp into the shrunken search box.
  Vector project(std::span<const double> head) const;
  /// Half-width of the search box along each coordinate (the sampling radius).
  double search_radius() const;

 private:
  Kind kind_ = Kind::Ball;
  TailSeq center_;
  double radius_ = 1.0;
  Vector lo_, hi_;
  double margin_ = 1e-3;
  std::size_t dim_ = 0;
};

/// min f_0 subject to f_n <= 0 for n >= 1 (and f_inf <= 0) over the domain.
struct ProblemSpec {
  Domain domain;
  FuncExpr objective = FuncExpr::constant(0.0);
  ConstraintFamily family;

  std::size_t dim() const { return domain.dim(); }
  /// Throws InvariantError when some function cannot be evaluated on the
  /// search box (bad index, non-finite value at the anchor).
  void validate() const;
  bool all_convex() const { return objective.is_convex() && family.all_convex(); }
};

/// Multipliers (alpha_inf, alpha_0, alpha_1, ...). alphas[0] weights the
/// objective; `tail` gives alpha_n for n >= alphas.size().
struct MultiplierCertificate {
  enum class Mode { Simplex, BetaNormalized };

  double alpha_inf = 0.0;
  Vector alphas{1.0};
  TailRule tail;
  Mode mode = Mode::BetaNormalized;

  double at(std::size_t n) const;
  /// Multiplier mass carried by indices > M (closed form).
  double tail_mass_after(std::size_t M) const;
  friend bool operator==(const MultiplierCertificate&, const MultiplierCertificate&) = default;
};

std::string to_string(MultiplierCertificate::Mode mode);

/// alpha_inf + sum of all alpha_n; throws InvariantError on a divergent tail.
double sum_certificate(const MultiplierCertificate& cert);
/// Divide by alpha_0. Throws when alpha_0 == 0 (no KKT normalization exists).
MultiplierCertificate to_beta(const MultiplierCertificate& cert);
MultiplierCertificate to_simplex(const MultiplierCertificate& cert);

enum class Condition {
  Domain,
  Feasibility,
  Nonnegativity,
  Normalization,
  ComplementarySlackness,
  Stationarity,
  Slater,
  GateauxEquality,
};

std::string to_string(Condition c);

enum class Verdict { Certified, Rejected, Inconclusive };

std::string to_string(Verdict v);

struct ConditionResult {
  Condition condition = Condition::Domain;
  bool passed = true;
  /// Worst residual: max violation for equalities, min value for inequalities.
  double worst = 0.0;
  std::string detail;
  /// True when the failure is only due to an uncertainty band.
  bool band_limited = false;
};

struct CertificateReport {
  std::vector<ConditionResult> conditions;
  /// |alpha_n f_n(xhat)| for n = 1..M followed by the inf slot.
  Vector slackness;
  /// Weighted directional derivative sum per direction (band already removed).
  Vector stationarity;
  /// Half-width of the tail uncertainty band, per unit sup-norm of direction.
  double tail_band = 0.0;
  Verdict verdict = Verdict::Certified;
  std::string reason;
  std::optional<Condition> failed;

  const ConditionResult* find(Condition c) const;
  bool certified() const { return verdict == Verdict::Certified; }
};

struct Witness {
  TailSeq point;
  double t = 0.0;
  double margin = 0.0;  // sup_n h_n at the witness, < 0
};

struct Multipliers {
  MultiplierCertificate cert;
  double min_weighted = 0.0;  // over the final cut set
  double audit_min = 0.0;     // over the audit sample
  std::size_t cuts = 0;
};

struct Inconclusive {
  std::string diagnostics;
  double best_value = 0.0;
  double game_value = 0.0;
};

using AlternativeOutcome = std::variant<Witness, Multipliers, Inconclusive>;

}  // namespace dinicert
