#include "dinicert/tail_seq.hpp"

#include <algorithm>
#include <cmath>

namespace dinicert {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvariantError(std::string(what) + " must be finite");
  }
}

}  // namespace

TailRule TailRule::constant(double c) {
  require_finite(c, "tail constant");
  return TailRule(c, 0.0, 0.0);
}

TailRule TailRule::geometric(double a, double q) {
  return shifted_geometric(0.0, a, q);
}

TailRule TailRule::shifted_geometric(double c, double a, double q) {
  require_finite(c, "tail constant");
  require_finite(a, "tail scale");
  require_finite(q, "tail ratio");
  if (!(std::abs(q) < 1.0)) {
    throw InvariantError("geometric tail ratio must satisfy |q| < 1, got " +
                         std::to_string(q));
  }
  if (a == 0.0) return TailRule(c, 0.0, 0.0);
  return TailRule(c, a, q);
}

TailRule::Kind TailRule::kind() const {
  if (scale_ == 0.0) return constant_ == 0.0 ? Kind::Zero : Kind::Constant;
  return constant_ == 0.0 ? Kind::Geometric : Kind::ShiftedGeometric;
}

double TailRule::at(std::size_t k) const {
  if (scale_ == 0.0) return constant_;
  return constant_ + scale_ * std::pow(ratio_, static_cast<double>(k));
}

double TailRule::sup_abs() const {
  if (scale_ == 0.0) return std::abs(constant_);
  // Nonnegative ratio: monotone from c+a towards c. Negative ratio: the two
  // extreme entries are the first two, later ones contract towards c.
  double s = std::max(std::abs(constant_ + scale_), std::abs(constant_));
  if (ratio_ < 0.0) s = std::max(s, std::abs(constant_ + scale_ * ratio_));
  return s;
}

double TailRule::inf_value() const {
  if (scale_ == 0.0) return constant_;
  double lo = std::min(constant_ + scale_, constant_);
  if (ratio_ < 0.0) lo = std::min(lo, constant_ + scale_ * ratio_);
  return lo;
}

double TailRule::series_sum() const {
  if (constant_ != 0.0) {
    throw InvariantError("tail with nonzero constant part is not summable");
  }
  if (scale_ == 0.0) return 0.0;
  return scale_ / (1.0 - ratio_);
}

TailRule TailRule::advanced(std::size_t k) const {
  if (scale_ == 0.0) return *this;
  return TailRule(constant_, scale_ * std::pow(ratio_, static_cast<double>(k)),
                  ratio_);
}

TailRule TailRule::scaled(double s) const {
  require_finite(s, "tail scale factor");
  if (scale_ == 0.0 || s == 0.0) return TailRule(constant_ * s, 0.0, 0.0);
  return TailRule(constant_ * s, scale_ * s, ratio_);
}

TailRule operator+(const TailRule& lhs, const TailRule& rhs) {
  const double c = lhs.constant_ + rhs.constant_;
  if (lhs.scale_ == 0.0) return TailRule(c, rhs.scale_, rhs.ratio_);
  if (rhs.scale_ == 0.0) return TailRule(c, lhs.scale_, lhs.ratio_);
  if (lhs.ratio_ != rhs.ratio_) {
    throw InvariantError("cannot add geometric tails with different ratios");
  }
  const double a = lhs.scale_ + rhs.scale_;
  if (a == 0.0) return TailRule(c, 0.0, 0.0);
  return TailRule(c, a, lhs.ratio_);
}

std::string to_string(TailRule::Kind kind) {
  switch (kind) {
    case TailRule::Kind::Zero: return "zero";
    case TailRule::Kind::Constant: return "constant";
    case TailRule::Kind::Geometric: return "geometric";
    case TailRule::Kind::ShiftedGeometric: return "shifted_geometric";
  }
  return "unknown";
}

TailSeq::TailSeq(Vector head, TailRule tail)
    : head_(std::move(head)), tail_(tail) {
  for (double v : head_) require_finite(v, "sequence entry");
}

TailSeq TailSeq::basis(std::size_t dim, std::size_t i, double value) {
  Vector h(std::max(dim, i + 1), 0.0);
  h[i] = value;
  return TailSeq(std::move(h));
}

double TailSeq::at(std::size_t n) const {
  if (n < head_.size()) return head_[n];
  return tail_.at(n - head_.size());
}

double TailSeq::sup_norm() const {
  double s = tail_.sup_abs();
  for (double v : head_) s = std::max(s, std::abs(v));
  return s;
}

double TailSeq::limsup_abs() const { return std::abs(tail_.limit()); }

TailSeq TailSeq::extended(std::size_t n) const {
  if (n <= head_.size()) return *this;
  Vector h = head_;
  h.reserve(n);
  for (std::size_t k = 0; h.size() < n; ++k) h.push_back(tail_.at(k));
  TailSeq out;
  out.head_ = std::move(h);
  out.tail_ = tail_.advanced(n - head_.size());
  return out;
}

TailSeq TailSeq::with_head(std::span<const double> values) const {
  TailSeq out = extended(values.size());
  std::copy(values.begin(), values.end(), out.head_.begin());
  for (double v : values) require_finite(v, "sequence entry");
  return out;
}

TailSeq operator+(const TailSeq& lhs, const TailSeq& rhs) {
  const std::size_t n = std::max(lhs.head_size(), rhs.head_size());
  TailSeq a = lhs.extended(n);
  TailSeq b = rhs.extended(n);
  for (std::size_t i = 0; i < n; ++i) a.head_[i] += b.head_[i];
  a.tail_ = a.tail_ + b.tail_;
  return a;
}

TailSeq operator*(double s, const TailSeq& x) {
  TailSeq out = x;
  for (double& v : out.head_) v *= s;
  out.tail_ = x.tail_.scaled(s);
  return out;
}

TailSeq operator-(const TailSeq& lhs, const TailSeq& rhs) {
  return lhs + (-1.0) * rhs;
}

TailSeq axpy(const TailSeq& x, double t, const TailSeq& u) {
  return x + t * u;
}

}  // namespace dinicert
