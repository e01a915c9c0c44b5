#include "dinicert/io.hpp"

#include <cmath>
#include <type_traits>

namespace dinicert {

namespace {

std::string child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string child(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(child(path, key), "missing required field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "number must be finite");
  return v;
}

double number_or(const Json& j, const std::string& key, double fallback,
                 const std::string& path) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, child(path, key));
}

long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<long>();
}

std::size_t count(const Json& j, const std::string& path) {
  const long v = integer(j, path);
  if (v < 0) throw ParseError(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

Vector vector_of(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], child(path, i)));
  return v;
}

const std::string& string_of(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get_ref<const std::string&>();
}

// Wraps InvariantError from the domain constructors with the field path.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvariantError& e) {
    throw ParseError(path, std::string("validation failed: ") + e.what());
  }
}

Op op_from_tag(const std::string& tag, const std::string& path) {
  static const Op all[] = {Op::Const,  Op::Coord, Op::Affine,       Op::Square,
                           Op::AbsVal, Op::Sum,   Op::Scale,        Op::Max,
                           Op::NormOneBlock, Op::NormTwoSqBlock, Op::LimsupAbs,
                           Op::AtanSqOfAffine};
  for (Op op : all) {
    if (to_string(op) == tag) return op;
  }
  throw ParseError(path, "unknown node tag '" + tag + "'");
}

Json parse_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("", e.what());
  }
}

}  // namespace

Json to_json(const TailRule& t) {
  Json j;
  j["kind"] = to_string(t.kind());
  switch (t.kind()) {
    case TailRule::Kind::Zero:
      break;
    case TailRule::Kind::Constant:
      j["c"] = t.constant_part();
      break;
    case TailRule::Kind::Geometric:
      j["a"] = t.scale();
      j["q"] = t.ratio();
      break;
    case TailRule::Kind::ShiftedGeometric:
      j["c"] = t.constant_part();
      j["a"] = t.scale();
      j["q"] = t.ratio();
      break;
  }
  return j;
}

TailRule tail_rule_from_json(const Json& j, const std::string& path) {
  const std::string& kind = string_of(field(j, "kind", path), child(path, "kind"));
  return guarded(path, [&] {
    if (kind == "zero") return TailRule::zero();
    if (kind == "constant") return TailRule::constant(number(field(j, "c", path), child(path, "c")));
    if (kind == "geometric") {
      return TailRule::geometric(number(field(j, "a", path), child(path, "a")),
                                 number(field(j, "q", path), child(path, "q")));
    }
    if (kind == "shifted_geometric") {
      return TailRule::shifted_geometric(number(field(j, "c", path), child(path, "c")),
                                         number(field(j, "a", path), child(path, "a")),
                                         number(field(j, "q", path), child(path, "q")));
    }
    throw ParseError(child(path, "kind"), "unknown tail kind '" + kind + "'");
  });
}

Json to_json(const TailSeq& x) {
  return Json{{"head", x.head()}, {"tail", to_json(x.tail())}};
}

TailSeq tail_seq_from_json(const Json& j, const std::string& path) {
  if (j.is_array()) return TailSeq(vector_of(j, path));
  Vector head = vector_of(field(j, "head", path), child(path, "head"));
  TailRule tail;
  if (auto it = j.find("tail"); it != j.end()) tail = tail_rule_from_json(*it, child(path, "tail"));
  return TailSeq(std::move(head), tail);
}

Json to_json(const FuncExpr& f) {
  const ExprNode& n = f.node();
  Json j;
  j["op"] = to_string(n.op);
  switch (n.op) {
    case Op::Const:
      j["value"] = n.value;
      break;
    case Op::Coord:
      j["index"] = n.index;
      break;
    case Op::Affine:
      j["coeffs"] = n.coeffs;
      j["offset"] = n.value;
      if (n.coeff_tail.kind() != TailRule::Kind::Zero) j["coeff_tail"] = to_json(n.coeff_tail);
      break;
    case Op::AtanSqOfAffine:
      j["coeffs"] = n.coeffs;
      j["offset"] = n.value;
      break;
    case Op::Square:
    case Op::AbsVal:
      j["child"] = to_json(n.children[0]);
      break;
    case Op::Scale:
      j["factor"] = n.value;
      j["child"] = to_json(n.children[0]);
      break;
    case Op::Sum:
    case Op::Max: {
      Json arr = Json::array();
      for (const auto& c : n.children) arr.push_back(to_json(c));
      j["children"] = std::move(arr);
      break;
    }
    case Op::NormOneBlock:
    case Op::NormTwoSqBlock:
      j["indices"] = n.indices;
      break;
    case Op::LimsupAbs:
      break;
  }
  return j;
}

FuncExpr expr_from_json(const Json& j, const std::string& path) {
  const Op op = op_from_tag(string_of(field(j, "op", path), child(path, "op")), child(path, "op"));
  auto children = [&] {
    const Json& arr = field(j, "children", path);
    if (!arr.is_array()) throw ParseError(child(path, "children"), "expected an array");
    std::vector<FuncExpr> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(expr_from_json(arr[i], child(child(path, "children"), i)));
    }
    return out;
  };
  auto indices = [&] {
    const Json& arr = field(j, "indices", path);
    if (!arr.is_array()) throw ParseError(child(path, "indices"), "expected an array");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(count(arr[i], child(child(path, "indices"), i)));
    }
    return out;
  };
  auto sub = [&] { return expr_from_json(field(j, "child", path), child(path, "child")); };
  return guarded(path, [&]() -> FuncExpr {
    switch (op) {
      case Op::Const: return FuncExpr::constant(number(field(j, "value", path), child(path, "value")));
      case Op::Coord: return FuncExpr::coord(count(field(j, "index", path), child(path, "index")));
      case Op::Affine: {
        TailRule tail;
        if (auto it = j.find("coeff_tail"); it != j.end()) {
          tail = tail_rule_from_json(*it, child(path, "coeff_tail"));
        }
        return FuncExpr::affine(vector_of(field(j, "coeffs", path), child(path, "coeffs")),
                                number_or(j, "offset", 0.0, path), tail);
      }
      case Op::AtanSqOfAffine:
        return FuncExpr::atan_sq_affine(vector_of(field(j, "coeffs", path), child(path, "coeffs")),
                                        number_or(j, "offset", 0.0, path));
      case Op::Square: return FuncExpr::square(sub());
      case Op::AbsVal: return FuncExpr::abs(sub());
      case Op::Scale:
        return FuncExpr::scale(number(field(j, "factor", path), child(path, "factor")), sub());
      case Op::Sum: return FuncExpr::sum(children());
      case Op::Max: return FuncExpr::max(children());
      case Op::NormOneBlock: return FuncExpr::norm_one(indices());
      case Op::NormTwoSqBlock: return FuncExpr::norm_two_sq(indices());
      case Op::LimsupAbs: return FuncExpr::limsup_abs();
    }
    throw ParseError(path, "unhandled node");
  });
}

Json to_json(const Coef& c) {
  switch (c.kind()) {
    case Coef::Kind::Literal: return c.literal();
    case Coef::Kind::Poly: return Json{{"poly", c.params()}};
    case Coef::Kind::Pow2: return Json{{"pow2", c.params()}};
    case Coef::Kind::Recip: return Json{{"recip", c.params()[0]}};
    case Coef::Kind::Add:
    case Coef::Kind::Mul: {
      Json arr = Json::array();
      for (const auto& o : c.operands()) arr.push_back(to_json(o));
      return Json{{c.kind() == Coef::Kind::Add ? "add" : "mul", std::move(arr)}};
    }
  }
  return nullptr;
}

Coef coef_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return Coef(number(j, path));
  if (!j.is_object() || j.size() != 1) {
    throw ParseError(path, "coefficient must be a number or a single-key object");
  }
  const auto& [key, val] = *j.items().begin();
  const std::string sub = child(path, key);
  if (key == "poly") return Coef::poly(vector_of(val, sub));
  if (key == "pow2") {
    Vector p = vector_of(val, sub);
    if (p.empty() || p.size() > 2) throw ParseError(sub, "pow2 takes [a] or [a, b]");
    return Coef::pow2(p[0], p.size() == 2 ? p[1] : 0.0);
  }
  if (key == "recip") return Coef::recip(number(val, sub));
  if (key == "add" || key == "mul") {
    if (!val.is_array()) throw ParseError(sub, "expected an array");
    std::vector<Coef> ops;
    for (std::size_t i = 0; i < val.size(); ++i) ops.push_back(coef_from_json(val[i], child(sub, i)));
    return key == "add" ? Coef::add(std::move(ops)) : Coef::mul(std::move(ops));
  }
  throw ParseError(path, "unknown coefficient form '" + key + "'");
}

Json to_json(const IndexExpr& i) {
  if (i.a == 0) return i.b;
  return Json{{"a", i.a}, {"b", i.b}};
}

IndexExpr index_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return IndexExpr{0, integer(j, path)};
  if (!j.is_object()) throw ParseError(path, "index must be an integer or {a, b}");
  IndexExpr e;
  if (auto it = j.find("a"); it != j.end()) e.a = integer(*it, child(path, "a"));
  if (auto it = j.find("b"); it != j.end()) e.b = integer(*it, child(path, "b"));
  return e;
}

Json to_json(const ExprTemplate& t) {
  Json j;
  j["op"] = to_string(t.op());
  auto terms = [&] {
    Json arr = Json::array();
    for (const auto& term : t.terms()) {
      arr.push_back(Json{{"index", to_json(term.index)}, {"coeff", to_json(term.coeff)}});
    }
    return arr;
  };
  auto kids = [&] {
    Json arr = Json::array();
    for (const auto& c : t.children()) arr.push_back(to_json(c));
    return arr;
  };
  switch (t.op()) {
    case Op::Const:
      j["value"] = to_json(t.value());
      break;
    case Op::Coord:
      j["index"] = to_json(t.index());
      break;
    case Op::Affine:
      j["terms"] = terms();
      j["offset"] = to_json(t.value());
      if (t.coeff_tail().kind() != TailRule::Kind::Zero) j["coeff_tail"] = to_json(t.coeff_tail());
      break;
    case Op::AtanSqOfAffine:
      j["terms"] = terms();
      j["offset"] = to_json(t.value());
      break;
    case Op::Square:
    case Op::AbsVal:
      j["child"] = to_json(t.children()[0]);
      break;
    case Op::Scale:
      j["factor"] = to_json(t.value());
      j["child"] = to_json(t.children()[0]);
      break;
    case Op::Sum:
    case Op::Max:
      j["children"] = kids();
      break;
    case Op::NormOneBlock:
    case Op::NormTwoSqBlock: {
      Json arr = Json::array();
      for (const auto& i : t.indices()) arr.push_back(to_json(i));
      j["indices"] = std::move(arr);
      break;
    }
    case Op::LimsupAbs:
      break;
  }
  return j;
}

ExprTemplate template_from_json(const Json& j, const std::string& path) {
  const Op op = op_from_tag(string_of(field(j, "op", path), child(path, "op")), child(path, "op"));
  auto kids = [&] {
    const Json& arr = field(j, "children", path);
    if (!arr.is_array()) throw ParseError(child(path, "children"), "expected an array");
    std::vector<ExprTemplate> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(template_from_json(arr[i], child(child(path, "children"), i)));
    }
    return out;
  };
  auto idx = [&] {
    const Json& arr = field(j, "indices", path);
    if (!arr.is_array()) throw ParseError(child(path, "indices"), "expected an array");
    std::vector<IndexExpr> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(index_from_json(arr[i], child(child(path, "indices"), i)));
    }
    return out;
  };
  auto terms = [&] {
    std::vector<ExprTemplate::Term> out;
    if (auto it = j.find("terms"); it != j.end()) {
      const std::string tp = child(path, "terms");
      if (!it->is_array()) throw ParseError(tp, "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string ip = child(tp, i);
        out.push_back({index_from_json(field((*it)[i], "index", ip), child(ip, "index")),
                       coef_from_json(field((*it)[i], "coeff", ip), child(ip, "coeff"))});
      }
    } else {
      const Json& arr = field(j, "coeffs", path);
      const std::string cp = child(path, "coeffs");
      if (!arr.is_array()) throw ParseError(cp, "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back({IndexExpr{0, static_cast<long>(i)}, coef_from_json(arr[i], child(cp, i))});
      }
    }
    return out;
  };
  auto offset = [&] {
    auto it = j.find("offset");
    return it == j.end() ? Coef(0.0) : coef_from_json(*it, child(path, "offset"));
  };
  auto sub = [&] { return template_from_json(field(j, "child", path), child(path, "child")); };
  return guarded(path, [&]() -> ExprTemplate {
    switch (op) {
      case Op::Const: return ExprTemplate::constant(coef_from_json(field(j, "value", path), child(path, "value")));
      case Op::Coord: return ExprTemplate::coord(index_from_json(field(j, "index", path), child(path, "index")));
      case Op::Affine: {
        TailRule tail;
        if (auto it = j.find("coeff_tail"); it != j.end()) {
          tail = tail_rule_from_json(*it, child(path, "coeff_tail"));
          if (tail.constant_part() != 0.0) {
            throw ParseError(child(path, "coeff_tail"), "coefficient tail must be summable");
          }
        }
        return ExprTemplate::affine(terms(), offset(), tail);
      }
      case Op::AtanSqOfAffine: return ExprTemplate::atan_sq_affine(terms(), offset());
      case Op::Square: return ExprTemplate::square(sub());
      case Op::AbsVal: return ExprTemplate::abs(sub());
      case Op::Scale:
        return ExprTemplate::scale(coef_from_json(field(j, "factor", path), child(path, "factor")), sub());
      case Op::Sum: return ExprTemplate::sum(kids());
      case Op::Max: return ExprTemplate::max(kids());
      case Op::NormOneBlock: return ExprTemplate::norm_one(idx());
      case Op::NormTwoSqBlock: return ExprTemplate::norm_two_sq(idx());
      case Op::LimsupAbs: return ExprTemplate::limsup_abs();
    }
    throw ParseError(path, "unhandled node");
  });
}

Json to_json(const ConstraintFamily& fam) {
  if (fam.empty()) return nullptr;
  if (!fam.explicit_list().empty()) {
    Json arr = Json::array();
    for (const auto& f : fam.explicit_list()) arr.push_back(to_json(f));
    return Json{{"explicit", std::move(arr)}};
  }
  Json j{{"template", to_json(*fam.generator())},
         {"limit", to_json(*fam.limit())},
         {"M", fam.truncation()}};
  if (fam.stationary_from()) j["stationary_from"] = *fam.stationary_from();
  return j;
}

ConstraintFamily family_from_json(const Json& j, const std::string& path) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw ParseError(path, "expected an object or null");
  if (auto it = j.find("explicit"); it != j.end()) {
    const std::string ep = child(path, "explicit");
    if (!it->is_array()) throw ParseError(ep, "expected an array");
    std::vector<FuncExpr> fs;
    for (std::size_t i = 0; i < it->size(); ++i) fs.push_back(expr_from_json((*it)[i], child(ep, i)));
    return ConstraintFamily::from_list(std::move(fs));
  }
  ExprTemplate gen = template_from_json(field(j, "template", path), child(path, "template"));
  FuncExpr limit = expr_from_json(field(j, "limit", path), child(path, "limit"));
  const std::size_t M = count(field(j, "M", path), child(path, "M"));
  std::optional<std::size_t> n0;
  if (auto it = j.find("stationary_from"); it != j.end() && !it->is_null()) {
    n0 = count(*it, child(path, "stationary_from"));
  }
  return guarded(path, [&] {
    try {
      return ConstraintFamily::from_template(std::move(gen), std::move(limit), M, n0);
    } catch (const EvaluationError& e) {
      throw ParseError(child(path, "template"), std::string("not instantiable: ") + e.what());
    }
  });
}

Json to_json(const Domain& d) {
  if (d.kind() == Domain::Kind::Box) return Json{{"kind", "box"}, {"lo", d.lo()}, {"hi", d.hi()}};
  return Json{{"kind", "ball"}, {"center", to_json(d.center())}, {"radius", d.radius()}, {"dim", d.dim()}};
}

Domain domain_from_json(const Json& j, const std::string& path) {
  const std::string& kind = string_of(field(j, "kind", path), child(path, "kind"));
  if (kind == "ball") {
    TailSeq center;
    if (auto it = j.find("center"); it != j.end()) center = tail_seq_from_json(*it, child(path, "center"));
    std::optional<std::size_t> dim;
    if (auto it = j.find("dim"); it != j.end()) dim = count(*it, child(path, "dim"));
    const double r = number(field(j, "radius", path), child(path, "radius"));
    return guarded(path, [&] { return Domain::ball(center, r, dim); });
  }
  if (kind == "box") {
    Vector lo = vector_of(field(j, "lo", path), child(path, "lo"));
    Vector hi = vector_of(field(j, "hi", path), child(path, "hi"));
    return guarded(path, [&] { return Domain::box(lo, hi); });
  }
  throw ParseError(child(path, "kind"), "unknown domain kind '" + kind + "'");
}

Json to_json(const ProblemSpec& p) {
  return Json{{"domain", to_json(p.domain)},
              {"objective", to_json(p.objective)},
              {"family", to_json(p.family)}};
}

ProblemSpec problem_from_json(const Json& j, const std::string& path) {
  ProblemSpec p;
  p.domain = domain_from_json(field(j, "domain", path), child(path, "domain"));
  p.objective = expr_from_json(field(j, "objective", path), child(path, "objective"));
  if (auto it = j.find("family"); it != j.end()) p.family = family_from_json(*it, child(path, "family"));
  guarded(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

Json to_json(const MultiplierCertificate& c) {
  return Json{{"alpha_inf", c.alpha_inf},
              {"alphas", c.alphas},
              {"tail", to_json(c.tail)},
              {"mode", to_string(c.mode)}};
}

MultiplierCertificate certificate_from_json(const Json& j, const std::string& path) {
  MultiplierCertificate c;
  c.alpha_inf = number_or(j, "alpha_inf", 0.0, path);
  c.alphas = vector_of(field(j, "alphas", path), child(path, "alphas"));
  if (c.alphas.empty()) throw ParseError(child(path, "alphas"), "needs at least alpha_0");
  if (auto it = j.find("tail"); it != j.end()) c.tail = tail_rule_from_json(*it, child(path, "tail"));
  const std::string& mode = string_of(field(j, "mode", path), child(path, "mode"));
  if (mode == "simplex") {
    c.mode = MultiplierCertificate::Mode::Simplex;
  } else if (mode == "beta") {
    c.mode = MultiplierCertificate::Mode::BetaNormalized;
  } else {
    throw ParseError(child(path, "mode"), "mode must be 'simplex' or 'beta'");
  }
  return c;
}

Json to_json(const CertificateReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    conds.push_back(Json{{"condition", to_string(c.condition)},
                         {"passed", c.passed},
                         {"worst", c.worst},
                         {"band_limited", c.band_limited},
                         {"detail", c.detail}});
  }
  Json j{{"verdict", to_string(r.verdict)},
         {"reason", r.reason},
         {"conditions", std::move(conds)},
         {"slackness", r.slackness},
         {"stationarity", r.stationarity},
         {"tail_band", r.tail_band}};
  j["failed"] = r.failed ? Json(to_string(*r.failed)) : Json(nullptr);
  return j;
}

Json to_json(const AlternativeOutcome& o) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Witness>) {
          return Json{{"branch", "witness"}, {"point", to_json(v.point)}, {"t", v.t}, {"margin", v.margin}};
        } else if constexpr (std::is_same_v<T, Multipliers>) {
          return Json{{"branch", "multipliers"},
                      {"certificate", to_json(v.cert)},
                      {"min_weighted", v.min_weighted},
                      {"audit_min", v.audit_min},
                      {"cuts", v.cuts}};
        } else {
          return Json{{"branch", "inconclusive"},
                      {"diagnostics", v.diagnostics},
                      {"best_value", v.best_value},
                      {"game_value", v.game_value}};
        }
      },
      o);
}

ProblemSpec parse_problem(std::string_view text) { return problem_from_json(parse_text(text)); }

std::string serialize_problem(const ProblemSpec& p, int indent) { return to_json(p).dump(indent); }

MultiplierCertificate parse_certificate(std::string_view text) {
  return certificate_from_json(parse_text(text));
}

TailSeq parse_point(std::string_view text) { return tail_seq_from_json(parse_text(text)); }

}  // namespace dinicert
