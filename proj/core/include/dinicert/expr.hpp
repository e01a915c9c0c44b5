#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dinicert/tail_seq.hpp"

namespace dinicert {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Op {
  Const,
  Coord,
  Affine,
  Square,
  AbsVal,
  Sum,
  Scale,
  Max,
  NormOneBlock,
  NormTwoSqBlock,
  LimsupAbs,
  AtanSqOfAffine,
};

std::string to_string(Op op);

struct ExprNode;

/// Immutable symbolic function of a sequence-space point. Nodes are shared,
/// so copies are cheap and safe to use from several threads.
class FuncExpr {
 public:
  static FuncExpr constant(double v);
  static FuncExpr coord(std::size_t i);
  /// sum_i coeffs[i] x_i + sum_{k>=0} coeff_tail(k) x_{coeffs.size()+k} + offset.
  /// The coefficient tail must be summable (Zero or Geometric).
  static FuncExpr affine(Vector coeffs, double offset = 0.0,
                         TailRule coeff_tail = TailRule::zero());
  static FuncExpr square(FuncExpr child);
  static FuncExpr abs(FuncExpr child);
  static FuncExpr sum(std::vector<FuncExpr> children);
  static FuncExpr scale(double factor, FuncExpr child);
  static FuncExpr max(std::vector<FuncExpr> children);
  static FuncExpr norm_one(std::vector<std::size_t> indices);
  static FuncExpr norm_two_sq(std::vector<std::size_t> indices);
  /// p(x) = limsup_n |x_n|; depends only on the tail.
  static FuncExpr limsup_abs();
  /// atan(c.x + offset)^2 (smooth, flagged non-convex).
  static FuncExpr atan_sq_affine(Vector coeffs, double offset = 0.0);

  const ExprNode& node() const { return *node_; }
  Op op() const;
  bool is_convex() const;
  /// Largest head coordinate referenced, if any. An affine coefficient tail
  /// or LimsupAbs reads the whole tail and does not count here.
  std::optional<std::size_t> max_index() const;
  /// True when the function reads entries beyond any finite head.
  bool reads_tail() const;

 private:
  explicit FuncExpr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;  // Const value, Scale factor, affine offset
  std::size_t index = 0;
  Vector coeffs;
  TailRule coeff_tail;
  std::vector<std::size_t> indices;
  std::vector<FuncExpr> children;
  bool convex = true;
  std::optional<std::size_t> max_index;
  bool reads_tail = false;
};

FuncExpr operator+(const FuncExpr& a, const FuncExpr& b);

/// Exact value at a sequence-space point.
double evaluate(const FuncExpr& f, const TailSeq& x);
/// Value at a point of R^d; throws EvaluationError when f references a
/// coordinate >= x.size().
double evaluate(const FuncExpr& f, std::span<const double> x);

/// c.x over the full sequence, including the coefficient tail.
double linear_form(std::span<const double> coeffs, const TailRule& coeff_tail,
                   const TailSeq& x);

}  // namespace dinicert
