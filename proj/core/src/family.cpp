#include "dinicert/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dinicert {

Coef::Coef(double v) : kind_(Kind::Literal), literal_(v) {
  if (!std::isfinite(v)) throw InvariantError("coefficient literal must be finite");
}

Coef Coef::poly(Vector coeffs) {
  Coef c;
  c.kind_ = Kind::Poly;
  c.params_ = std::move(coeffs);
  return c;
}

Coef Coef::pow2(double a, double b) {
  Coef c;
  c.kind_ = Kind::Pow2;
  c.params_ = {a, b};
  return c;
}

Coef Coef::recip(double k) {
  Coef c;
  c.kind_ = Kind::Recip;
  c.params_ = {k};
  return c;
}

Coef Coef::add(std::vector<Coef> terms) {
  Coef c;
  c.kind_ = Kind::Add;
  c.operands_ = std::move(terms);
  return c;
}

Coef Coef::mul(std::vector<Coef> factors) {
  Coef c;
  c.kind_ = Kind::Mul;
  c.operands_ = std::move(factors);
  return c;
}

double Coef::eval(long n) const {
  const double x = static_cast<double>(n);
  switch (kind_) {
    case Kind::Literal:
      return literal_;
    case Kind::Poly: {
      double s = 0.0;
      for (std::size_t k = params_.size(); k-- > 0;) s = s * x + params_[k];
      return s;
    }
    case Kind::Pow2:
      return std::exp2(params_[0] * x + params_[1]);
    case Kind::Recip: {
      const double d = x + params_[0];
      if (d == 0.0) throw EvaluationError("1/(n+k) evaluated at n = -k");
      return 1.0 / d;
    }
    case Kind::Add: {
      double s = 0.0;
      for (const auto& c : operands_) s += c.eval(n);
      return s;
    }
    case Kind::Mul: {
      double p = 1.0;
      for (const auto& c : operands_) p *= c.eval(n);
      return p;
    }
  }
  return 0.0;
}

bool Coef::depends_on_n() const {
  switch (kind_) {
    case Kind::Literal:
      return false;
    case Kind::Poly:
      return std::any_of(params_.begin() + std::min<std::size_t>(1, params_.size()),
                         params_.end(), [](double v) { return v != 0.0; });
    case Kind::Pow2:
      return params_[0] != 0.0;
    case Kind::Recip:
      return true;
    case Kind::Add:
    case Kind::Mul:
      return std::any_of(operands_.begin(), operands_.end(),
                         [](const Coef& c) { return c.depends_on_n(); });
  }
  return false;
}

std::size_t IndexExpr::eval(long n) const {
  const long v = a * n + b;
  if (v < 0) {
    throw EvaluationError("index expression " + std::to_string(a) + "*n+" +
                          std::to_string(b) + " is negative at n=" + std::to_string(n));
  }
  return static_cast<std::size_t>(v);
}

ExprTemplate ExprTemplate::constant(Coef v) {
  ExprTemplate t;
  t.op_ = Op::Const;
  t.value_ = std::move(v);
  return t;
}

ExprTemplate ExprTemplate::coord(IndexExpr i) {
  ExprTemplate t;
  t.op_ = Op::Coord;
  t.index_ = i;
  return t;
}

ExprTemplate ExprTemplate::affine(std::vector<Term> terms, Coef offset,
                                  TailRule coeff_tail) {
  ExprTemplate t;
  t.op_ = Op::Affine;
  t.terms_ = std::move(terms);
  t.value_ = std::move(offset);
  t.coeff_tail_ = coeff_tail;
  return t;
}

ExprTemplate ExprTemplate::square(ExprTemplate child) {
  ExprTemplate t;
  t.op_ = Op::Square;
  t.children_.push_back(std::move(child));
  return t;
}

ExprTemplate ExprTemplate::abs(ExprTemplate child) {
  ExprTemplate t;
  t.op_ = Op::AbsVal;
  t.children_.push_back(std::move(child));
  return t;
}

ExprTemplate ExprTemplate::sum(std::vector<ExprTemplate> children) {
  ExprTemplate t;
  t.op_ = Op::Sum;
  t.children_ = std::move(children);
  return t;
}

ExprTemplate ExprTemplate::scale(Coef factor, ExprTemplate child) {
  ExprTemplate t;
  t.op_ = Op::Scale;
  t.value_ = std::move(factor);
  t.children_.push_back(std::move(child));
  return t;
}

ExprTemplate ExprTemplate::max(std::vector<ExprTemplate> children) {
  ExprTemplate t;
  t.op_ = Op::Max;
  t.children_ = std::move(children);
  return t;
}

ExprTemplate ExprTemplate::norm_one(std::vector<IndexExpr> indices) {
  ExprTemplate t;
  t.op_ = Op::NormOneBlock;
  t.indices_ = std::move(indices);
  return t;
}

ExprTemplate ExprTemplate::norm_two_sq(std::vector<IndexExpr> indices) {
  ExprTemplate t;
  t.op_ = Op::NormTwoSqBlock;
  t.indices_ = std::move(indices);
  return t;
}

ExprTemplate ExprTemplate::limsup_abs() {
  ExprTemplate t;
  t.op_ = Op::LimsupAbs;
  return t;
}

ExprTemplate ExprTemplate::atan_sq_affine(std::vector<Term> terms, Coef offset) {
  ExprTemplate t;
  t.op_ = Op::AtanSqOfAffine;
  t.terms_ = std::move(terms);
  t.value_ = std::move(offset);
  return t;
}

ExprTemplate ExprTemplate::from_expr(const FuncExpr& f) {
  const ExprNode& n = f.node();
  auto dense_terms = [&n] {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < n.coeffs.size(); ++i) {
      terms.push_back({IndexExpr{0, static_cast<long>(i)}, Coef(n.coeffs[i])});
    }
    return terms;
  };
  auto lift_children = [&n] {
    std::vector<ExprTemplate> out;
    for (const auto& c : n.children) out.push_back(from_expr(c));
    return out;
  };
  auto lift_indices = [&n] {
    std::vector<IndexExpr> out;
    for (std::size_t i : n.indices) out.push_back({0, static_cast<long>(i)});
    return out;
  };
  switch (n.op) {
    case Op::Const: return constant(n.value);
    case Op::Coord: return coord({0, static_cast<long>(n.index)});
    case Op::Affine: return affine(dense_terms(), n.value, n.coeff_tail);
    case Op::Square: return square(from_expr(n.children[0]));
    case Op::AbsVal: return abs(from_expr(n.children[0]));
    case Op::Sum: return sum(lift_children());
    case Op::Scale: return scale(n.value, from_expr(n.children[0]));
    case Op::Max: return max(lift_children());
    case Op::NormOneBlock: return norm_one(lift_indices());
    case Op::NormTwoSqBlock: return norm_two_sq(lift_indices());
    case Op::LimsupAbs: return limsup_abs();
    case Op::AtanSqOfAffine: return atan_sq_affine(dense_terms(), n.value);
  }
  throw InvariantError("unknown node");
}

namespace {

Vector dense_coeffs(const std::vector<ExprTemplate::Term>& terms, long n) {
  std::map<std::size_t, double> acc;
  for (const auto& t : terms) acc[t.index.eval(n)] += t.coeff.eval(n);
  Vector out;
  if (!acc.empty()) out.assign(acc.rbegin()->first + 1, 0.0);
  for (const auto& [i, c] : acc) out[i] = c;
  return out;
}

}  // namespace

FuncExpr ExprTemplate::instantiate(long n) const {
  auto inst_children = [&] {
    std::vector<FuncExpr> out;
    out.reserve(children_.size());
    for (const auto& c : children_) out.push_back(c.instantiate(n));
    return out;
  };
  auto inst_indices = [&] {
    std::vector<std::size_t> out;
    for (const auto& i : indices_) out.push_back(i.eval(n));
    return out;
  };
  switch (op_) {
    case Op::Const: return FuncExpr::constant(value_.eval(n));
    case Op::Coord: return FuncExpr::coord(index_.eval(n));
    case Op::Affine:
      return FuncExpr::affine(dense_coeffs(terms_, n), value_.eval(n), coeff_tail_);
    case Op::Square: return FuncExpr::square(children_[0].instantiate(n));
    case Op::AbsVal: return FuncExpr::abs(children_[0].instantiate(n));
    case Op::Sum: return FuncExpr::sum(inst_children());
    case Op::Scale: return FuncExpr::scale(value_.eval(n), children_[0].instantiate(n));
    case Op::Max: return FuncExpr::max(inst_children());
    case Op::NormOneBlock: return FuncExpr::norm_one(inst_indices());
    case Op::NormTwoSqBlock: return FuncExpr::norm_two_sq(inst_indices());
    case Op::LimsupAbs: return FuncExpr::limsup_abs();
    case Op::AtanSqOfAffine:
      return FuncExpr::atan_sq_affine(dense_coeffs(terms_, n), value_.eval(n));
  }
  throw InvariantError("unknown node");
}

bool ExprTemplate::depends_on_n() const {
  if (value_.depends_on_n()) return true;
  if (index_.a != 0) return true;
  for (const auto& t : terms_) {
    if (t.index.a != 0 || t.coeff.depends_on_n()) return true;
  }
  for (const auto& i : indices_) {
    if (i.a != 0) return true;
  }
  return std::any_of(children_.begin(), children_.end(),
                     [](const ExprTemplate& c) { return c.depends_on_n(); });
}

ConstraintFamily ConstraintFamily::from_template(ExprTemplate generator, FuncExpr limit,
                                                 std::size_t truncation,
                                                 std::optional<std::size_t> stationary_from) {
  if (truncation == 0) throw InvariantError("truncation M must be positive");
  if (stationary_from && *stationary_from == 0) {
    throw InvariantError("stationary_from must be >= 1");
  }
  ConstraintFamily fam;
  fam.generator_ = std::move(generator);
  fam.limit_ = std::move(limit);
  fam.truncation_ = truncation;
  fam.stationary_from_ = stationary_from;
  fam.rebuild_cache();
  return fam;
}

ConstraintFamily ConstraintFamily::from_list(std::vector<FuncExpr> functions) {
  ConstraintFamily fam;
  if (functions.empty()) return fam;
  fam.truncation_ = functions.size();
  fam.stationary_from_ = functions.size();
  fam.limit_ = functions.back();
  fam.explicit_ = std::move(functions);
  fam.rebuild_cache();
  return fam;
}

FuncExpr ConstraintFamily::at(std::size_t n) const {
  if (n == 0) throw InvariantError("constraint indices start at 1");
  if (empty()) throw InvariantError("empty constraint family");
  if (n <= cached_.size()) return cached_[n - 1];
  if (!explicit_.empty()) return explicit_[std::min(n, explicit_.size()) - 1];
  const std::size_t k = stationary_from_ ? std::min(n, *stationary_from_) : n;
  return generator_->instantiate(static_cast<long>(k));
}

bool ConstraintFamily::exact_at_truncation() const {
  if (empty()) return true;
  return stationary_from_ && *stationary_from_ <= truncation_;
}

bool ConstraintFamily::all_convex() const {
  if (empty()) return true;
  return limit_->is_convex() &&
         std::all_of(cached_.begin(), cached_.end(),
                     [](const FuncExpr& f) { return f.is_convex(); });
}

ConstraintFamily ConstraintFamily::with_truncation(std::size_t M) const {
  if (empty()) return *this;
  if (!explicit_.empty()) {
    // A finite family has nothing beyond its last member.
    if (M < explicit_.size()) {
      throw InvariantError("cannot truncate an explicit family below its length");
    }
    return *this;
  }
  return from_template(*generator_, *limit_, M, stationary_from_);
}

void ConstraintFamily::rebuild_cache() {
  cached_.clear();
  if (!explicit_.empty()) {
    cached_ = explicit_;
    return;
  }
  cached_.reserve(truncation_);
  for (std::size_t n = 1; n <= truncation_; ++n) {
    const std::size_t k = stationary_from_ ? std::min(n, *stationary_from_) : n;
    cached_.push_back(generator_->instantiate(static_cast<long>(k)));
  }
}

}  // namespace dinicert
