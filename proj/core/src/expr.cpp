#include "dinicert/expr.hpp"

#include <algorithm>
#include <cmath>

namespace dinicert {

namespace {

std::optional<std::size_t> merge_max(std::optional<std::size_t> a,
                                     std::optional<std::size_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

std::optional<std::size_t> coeff_max_index(const Vector& coeffs) {
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (coeffs[i] != 0.0) return i;
  }
  return std::nullopt;
}

// Nonnegative by construction; squares of these stay convex.
bool is_nonnegative_convex(const FuncExpr& f) {
  switch (f.op()) {
    case Op::AbsVal:
    case Op::NormOneBlock:
    case Op::NormTwoSqBlock:
    case Op::LimsupAbs:
    case Op::Square:
      return f.is_convex();
    default:
      return false;
  }
}

bool is_affine_like(const FuncExpr& f) {
  return f.op() == Op::Const || f.op() == Op::Coord || f.op() == Op::Affine;
}

void check_coeff_tail(const TailRule& t) {
  if (t.constant_part() != 0.0) {
    throw InvariantError("affine coefficient tail must be summable");
  }
}

void check_finite_vec(const Vector& v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) throw InvariantError(std::string(what) + " must be finite");
  }
}

double checked(double v, Op op) {
  if (std::isnan(v)) {
    throw EvaluationError("NaN produced while evaluating " + to_string(op));
  }
  return v;
}

}  // namespace

std::string to_string(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Coord: return "coord";
    case Op::Affine: return "affine";
    case Op::Square: return "square";
    case Op::AbsVal: return "abs";
    case Op::Sum: return "sum";
    case Op::Scale: return "scale";
    case Op::Max: return "max";
    case Op::NormOneBlock: return "norm1";
    case Op::NormTwoSqBlock: return "norm2sq";
    case Op::LimsupAbs: return "limsup_abs";
    case Op::AtanSqOfAffine: return "atan_sq_affine";
  }
  return "unknown";
}

Op FuncExpr::op() const { return node_->op; }
bool FuncExpr::is_convex() const { return node_->convex; }
std::optional<std::size_t> FuncExpr::max_index() const { return node_->max_index; }
bool FuncExpr::reads_tail() const { return node_->reads_tail; }

FuncExpr FuncExpr::constant(double v) {
  if (!std::isfinite(v)) throw InvariantError("constant must be finite");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = v;
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::coord(std::size_t i) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Coord;
  n->index = i;
  n->max_index = i;
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::affine(Vector coeffs, double offset, TailRule coeff_tail) {
  check_finite_vec(coeffs, "affine coefficient");
  check_coeff_tail(coeff_tail);
  if (!std::isfinite(offset)) throw InvariantError("affine offset must be finite");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Affine;
  n->max_index = coeff_max_index(coeffs);
  n->reads_tail = coeff_tail.kind() != TailRule::Kind::Zero;
  n->coeffs = std::move(coeffs);
  n->value = offset;
  n->coeff_tail = coeff_tail;
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::square(FuncExpr child) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Square;
  n->convex = is_affine_like(child) || is_nonnegative_convex(child);
  n->max_index = child.max_index();
  n->reads_tail = child.reads_tail();
  n->children.push_back(std::move(child));
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::abs(FuncExpr child) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::AbsVal;
  n->convex = is_affine_like(child) || is_nonnegative_convex(child);
  n->max_index = child.max_index();
  n->reads_tail = child.reads_tail();
  n->children.push_back(std::move(child));
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::sum(std::vector<FuncExpr> children) {
  if (children.empty()) return constant(0.0);
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Sum;
  for (const auto& c : children) {
    n->convex = n->convex && c.is_convex();
    n->max_index = merge_max(n->max_index, c.max_index());
    n->reads_tail = n->reads_tail || c.reads_tail();
  }
  n->children = std::move(children);
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::scale(double factor, FuncExpr child) {
  if (!std::isfinite(factor)) throw InvariantError("scale factor must be finite");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Scale;
  n->value = factor;
  n->convex = factor == 0.0 || (factor > 0.0 && child.is_convex()) ||
              is_affine_like(child);
  n->max_index = child.max_index();
  n->reads_tail = child.reads_tail();
  n->children.push_back(std::move(child));
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::max(std::vector<FuncExpr> children) {
  if (children.empty()) throw InvariantError("max needs at least one child");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Max;
  for (const auto& c : children) {
    n->convex = n->convex && c.is_convex();
    n->max_index = merge_max(n->max_index, c.max_index());
    n->reads_tail = n->reads_tail || c.reads_tail();
  }
  n->children = std::move(children);
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::norm_one(std::vector<std::size_t> indices) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::NormOneBlock;
  if (!indices.empty()) n->max_index = *std::max_element(indices.begin(), indices.end());
  n->indices = std::move(indices);
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::norm_two_sq(std::vector<std::size_t> indices) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::NormTwoSqBlock;
  if (!indices.empty()) n->max_index = *std::max_element(indices.begin(), indices.end());
  n->indices = std::move(indices);
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::limsup_abs() {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::LimsupAbs;
  n->reads_tail = true;
  return FuncExpr(std::move(n));
}

FuncExpr FuncExpr::atan_sq_affine(Vector coeffs, double offset) {
  check_finite_vec(coeffs, "affine coefficient");
  if (!std::isfinite(offset)) throw InvariantError("affine offset must be finite");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::AtanSqOfAffine;
  n->convex = false;
  n->max_index = coeff_max_index(coeffs);
  n->coeffs = std::move(coeffs);
  n->value = offset;
  return FuncExpr(std::move(n));
}

FuncExpr operator+(const FuncExpr& a, const FuncExpr& b) {
  return FuncExpr::sum({a, b});
}

namespace {

// Read-only view of a point of R^d as a sequence with a Zero tail.
struct DenseView {
  std::span<const double> v;
  double at(std::size_t n) const { return n < v.size() ? v[n] : 0.0; }
  std::size_t head_size() const { return v.size(); }
  double head_at(std::size_t n) const { return v[n]; }
  TailRule tail() const { return TailRule::zero(); }
  double limsup_abs() const { return 0.0; }
};

struct SeqView {
  const TailSeq& x;
  double at(std::size_t n) const { return x.at(n); }
  std::size_t head_size() const { return x.head_size(); }
  double head_at(std::size_t n) const { return x.head()[n]; }
  TailRule tail() const { return x.tail(); }
  double limsup_abs() const { return x.limsup_abs(); }
};

template <class X>
double linear_form_impl(std::span<const double> coeffs, const TailRule& coeff_tail,
                        const X& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] != 0.0) s += coeffs[i] * x.at(i);
  }
  if (coeff_tail.kind() == TailRule::Kind::Zero) return s;

  // Coefficient tail c_n = a1 q1^(n-K) for n >= K; it is summable, so only
  // the product with the bounded entries of x has to be summed.
  const std::size_t K = coeffs.size();
  const std::size_t H = x.head_size();
  const double a1 = coeff_tail.scale();
  const double q1 = coeff_tail.ratio();
  for (std::size_t n = K; n < H; ++n) {
    s += coeff_tail.at(n - K) * x.head_at(n);
  }
  const std::size_t start = std::max(K, H);
  const TailRule xt = x.tail().advanced(start - H);
  const double lead = a1 * std::pow(q1, static_cast<double>(start - K));
  s += lead * xt.constant_part() / (1.0 - q1);
  if (xt.scale() != 0.0) s += lead * xt.scale() / (1.0 - q1 * xt.ratio());
  return s;
}

template <class X>
double eval_impl(const FuncExpr& f, const X& x) {
  const ExprNode& n = f.node();
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Coord:
      return x.at(n.index);
    case Op::Affine:
      return checked(linear_form_impl(n.coeffs, n.coeff_tail, x) + n.value, n.op);
    case Op::Square: {
      const double v = eval_impl(n.children[0], x);
      return v * v;
    }
    case Op::AbsVal:
      return std::abs(eval_impl(n.children[0], x));
    case Op::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += eval_impl(c, x);
      return checked(s, n.op);
    }
    case Op::Scale:
      return checked(n.value * eval_impl(n.children[0], x), n.op);
    case Op::Max: {
      double m = eval_impl(n.children[0], x);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        m = std::max(m, eval_impl(n.children[i], x));
      }
      return m;
    }
    case Op::NormOneBlock: {
      double s = 0.0;
      for (std::size_t i : n.indices) s += std::abs(x.at(i));
      return s;
    }
    case Op::NormTwoSqBlock: {
      double s = 0.0;
      for (std::size_t i : n.indices) {
        const double v = x.at(i);
        s += v * v;
      }
      return s;
    }
    case Op::LimsupAbs:
      return x.limsup_abs();
    case Op::AtanSqOfAffine: {
      const double a = linear_form_impl(n.coeffs, TailRule::zero(), x) + n.value;
      const double t = std::atan(a);
      return checked(t * t, n.op);
    }
  }
  throw EvaluationError("unknown node");
}

}  // namespace

double linear_form(std::span<const double> coeffs, const TailRule& coeff_tail,
                   const TailSeq& x) {
  return linear_form_impl(coeffs, coeff_tail, SeqView{x});
}

double evaluate(const FuncExpr& f, const TailSeq& x) { return eval_impl(f, SeqView{x}); }

double evaluate(const FuncExpr& f, std::span<const double> x) {
  if (auto m = f.max_index(); m && *m >= x.size()) {
    throw EvaluationError("coordinate index " + std::to_string(*m) +
                          " out of range for dimension " + std::to_string(x.size()));
  }
  return eval_impl(f, DenseView{x});
}

}  // namespace dinicert
