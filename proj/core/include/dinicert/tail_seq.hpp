#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dinicert {

using Vector = std::vector<double>;

/// Raised when a value violates a domain-type invariant (NaN entries,
/// divergent tails, incompatible tail ratios, ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form description of the entries of a sequence past its head.
///
/// The k-th tail entry (k = 0 is the first entry after the head) equals
/// `constant + scale * ratio^k`. The three public kinds are special cases:
/// Zero (everything 0), Constant(c) and Geometric(a, q). A shifted geometric
/// rule (both parts nonzero) only arises from adding a constant tail to a
/// geometric one, which keeps sums of points and directions representable.
class TailRule {
 public:
  enum class Kind { Zero, Constant, Geometric, ShiftedGeometric };

  TailRule() = default;

  static TailRule zero() { return {}; }
  static TailRule constant(double c);
  /// Requires |q| < 1.
  static TailRule geometric(double a, double q);
  static TailRule shifted_geometric(double c, double a, double q);

  Kind kind() const;
  double constant_part() const { return constant_; }
  double scale() const { return scale_; }
  double ratio() const { return ratio_; }

  double at(std::size_t k) const;
  /// lim_k of the tail entries.
  double limit() const { return constant_; }
  /// sup_k |tail(k)|, exact.
  double sup_abs() const;
  /// Smallest tail entry, exact (used for sign checks on multiplier tails).
  double inf_value() const;
  /// sum_{k>=0} tail(k); throws InvariantError when the constant part is
  /// nonzero (the series diverges).
  double series_sum() const;
  /// Rule describing entries starting `k` positions later.
  TailRule advanced(std::size_t k) const;
  TailRule scaled(double s) const;

  friend TailRule operator+(const TailRule& lhs, const TailRule& rhs);
  friend bool operator==(const TailRule&, const TailRule&) = default;

 private:
  TailRule(double c, double a, double q) : constant_(c), scale_(a), ratio_(q) {}
  double constant_ = 0.0;
  double scale_ = 0.0;
  double ratio_ = 0.0;
};

std::string to_string(TailRule::Kind kind);

/// A point of sequence space: a finite head followed by a closed-form tail.
/// Points of R^d are heads of length d with a Zero tail.
class TailSeq {
 public:
  TailSeq() = default;
  explicit TailSeq(Vector head, TailRule tail = TailRule::zero());

  static TailSeq zeros(std::size_t dim) { return TailSeq(Vector(dim, 0.0)); }
  static TailSeq basis(std::size_t dim, std::size_t i, double value = 1.0);

  const Vector& head() const { return head_; }
  const TailRule& tail() const { return tail_; }
  std::size_t head_size() const { return head_.size(); }

  /// Entry x_n for any n >= 0.
  double at(std::size_t n) const;
  double operator[](std::size_t n) const { return at(n); }

  double sup_norm() const;
  double limsup_abs() const;

  /// Same sequence with the head materialized up to length n (n >= head_size).
  TailSeq extended(std::size_t n) const;
  /// Replaces the first head entries by `values` (growing the head if needed).
  TailSeq with_head(std::span<const double> values) const;

  /// Throws InvariantError if two Geometric tails with different ratios meet.
  friend TailSeq operator+(const TailSeq& lhs, const TailSeq& rhs);
  friend TailSeq operator-(const TailSeq& lhs, const TailSeq& rhs);
  friend TailSeq operator*(double s, const TailSeq& x);
  friend bool operator==(const TailSeq&, const TailSeq&) = default;

 private:
  Vector head_;
  TailRule tail_;
};

/// x + t*u, the basic move of every difference quotient.
TailSeq axpy(const TailSeq& x, double t, const TailSeq& u);

}  // namespace dinicert
