#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "dinicert/expr.hpp"

namespace dinicert {

/// Coefficient expression in the family index n. The grammar is closed:
/// literals, polynomials in n, 2^(a n + b), 1/(n + k), sums and products.
class Coef {
 public:
  enum class Kind { Literal, Poly, Pow2, Recip, Add, Mul };

  Coef() = default;
  Coef(double v);  // NOLINT(google-explicit-constructor): literals read naturally
  static Coef poly(Vector coeffs);
  static Coef pow2(double a, double b = 0.0);
  static Coef recip(double k);
  static Coef add(std::vector<Coef> terms);
  static Coef mul(std::vector<Coef> factors);

  Kind kind() const { return kind_; }
  double eval(long n) const;
  bool depends_on_n() const;

  double literal() const { return literal_; }
  const Vector& params() const { return params_; }
  const std::vector<Coef>& operands() const { return operands_; }

 private:
  Kind kind_ = Kind::Literal;
  double literal_ = 0.0;
  Vector params_;
  std::vector<Coef> operands_;
};

/// Coordinate index a*n + b.
struct IndexExpr {
  long a = 0;
  long b = 0;
  std::size_t eval(long n) const;
  friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
};

/// A FuncExpr whose numbers and indices may depend on the family index n.
/// Affine-type nodes store sparse (index, coefficient) terms.
class ExprTemplate {
 public:
  struct Term {
    IndexExpr index;
    Coef coeff;
  };

  static ExprTemplate constant(Coef v);
  static ExprTemplate coord(IndexExpr i);
  static ExprTemplate affine(std::vector<Term> terms, Coef offset = 0.0,
                             TailRule coeff_tail = TailRule::zero());
  static ExprTemplate square(ExprTemplate child);
  static ExprTemplate abs(ExprTemplate child);
  static ExprTemplate sum(std::vector<ExprTemplate> children);
  static ExprTemplate scale(Coef factor, ExprTemplate child);
  static ExprTemplate max(std::vector<ExprTemplate> children);
  static ExprTemplate norm_one(std::vector<IndexExpr> indices);
  static ExprTemplate norm_two_sq(std::vector<IndexExpr> indices);
  static ExprTemplate limsup_abs();
  static ExprTemplate atan_sq_affine(std::vector<Term> terms, Coef offset = 0.0);

  /// Lifts a concrete expression (dense affine coefficients become terms).
  static ExprTemplate from_expr(const FuncExpr& f);

  FuncExpr instantiate(long n) const;
  bool depends_on_n() const;

  Op op() const { return op_; }
  const Coef& value() const { return value_; }
  const IndexExpr& index() const { return index_; }
  const std::vector<Term>& terms() const { return terms_; }
  const TailRule& coeff_tail() const { return coeff_tail_; }
  const std::vector<IndexExpr>& indices() const { return indices_; }
  const std::vector<ExprTemplate>& children() const { return children_; }

 private:
  Op op_ = Op::Const;
  Coef value_;
  IndexExpr index_;
  std::vector<Term> terms_;
  TailRule coeff_tail_;
  std::vector<IndexExpr> indices_;
  std::vector<ExprTemplate> children_;
};

/// The constraint sequence n -> f_n (n >= 1) with its limit f_inf.
///
/// Either generated from a template (optionally stationary from n0 on) or an
/// explicit finite list f_1..f_m embedded as a stationary sequence
/// (f_n = f_m for n >= m, limit f_m). The empty family has no limit slot.
class ConstraintFamily {
 public:
  ConstraintFamily() = default;

  static ConstraintFamily from_template(ExprTemplate generator, FuncExpr limit,
                                        std::size_t truncation,
                                        std::optional<std::size_t> stationary_from = {});
  static ConstraintFamily from_list(std::vector<FuncExpr> functions);

  /// f_n for n >= 1 (any n, not only n <= M).
  FuncExpr at(std::size_t n) const;
  /// f_1..f_M, cached.
  const std::vector<FuncExpr>& truncated() const { return cached_; }
  const std::optional<FuncExpr>& limit() const { return limit_; }
  std::size_t truncation() const { return truncation_; }
  std::optional<std::size_t> stationary_from() const { return stationary_from_; }
  bool empty() const { return !limit_.has_value(); }
  /// True when f_n = f_inf for every n > M, so nothing is lost by truncating.
  bool exact_at_truncation() const;
  bool all_convex() const;

  const std::optional<ExprTemplate>& generator() const { return generator_; }
  const std::vector<FuncExpr>& explicit_list() const { return explicit_; }

  ConstraintFamily with_truncation(std::size_t M) const;

 private:
  void rebuild_cache();

  std::optional<ExprTemplate> generator_;
  std::vector<FuncExpr> explicit_;
  std::optional<FuncExpr> limit_;
  std::size_t truncation_ = 0;
  std::optional<std::size_t> stationary_from_;
  std::vector<FuncExpr> cached_;
};

}  // namespace dinicert
