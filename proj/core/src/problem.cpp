#include "dinicert/problem.hpp"

#include <algorithm>
#include <cmath>

namespace dinicert {

namespace {

// sup_n |a_n - b_n|, exact when the tails combine, otherwise by
// materializing entries until both geometric parts are negligible.
double sup_distance(const TailSeq& a, const TailSeq& b) {
  try {
    return (a - b).sup_norm();
  } catch (const InvariantError&) {
    const std::size_t L = std::max(a.head_size(), b.head_size()) + 4096;
    double s = std::abs(a.tail().limit() - b.tail().limit());
    for (std::size_t n = 0; n < L; ++n) s = std::max(s, std::abs(a.at(n) - b.at(n)));
    return s;
  }
}

}  // namespace

Domain Domain::ball(TailSeq center, double radius, std::optional<std::size_t> dim) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvariantError("ball radius must be positive and finite");
  }
  Domain d;
  d.kind_ = Kind::Ball;
  d.dim_ = std::max(center.head_size(), dim.value_or(0));
  if (d.dim_ == 0) throw InvariantError("domain dimension must be positive");
  d.center_ = center.extended(d.dim_);
  d.radius_ = radius;
  d.margin_ = 1e-3 * radius;
  return d;
}

Domain Domain::box(Vector lo, Vector hi) {
  if (lo.empty() || lo.size() != hi.size()) {
    throw InvariantError("box bounds must be nonempty and of equal length");
  }
  double min_half = INFINITY;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw InvariantError("box needs finite lo < hi in every coordinate");
    }
    min_half = std::min(min_half, 0.5 * (hi[i] - lo[i]));
  }
  Domain d;
  d.kind_ = Kind::Box;
  d.dim_ = lo.size();
  Vector mid(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
  d.center_ = TailSeq(std::move(mid));
  d.radius_ = min_half;
  d.margin_ = 1e-3 * min_half;
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

Vector Domain::search_lo() const {
  Vector v(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    v[i] = kind_ == Kind::Ball ? center_.at(i) - (radius_ - margin_) : lo_[i] + margin_;
  }
  return v;
}

Vector Domain::search_hi() const {
  Vector v(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    v[i] = kind_ == Kind::Ball ? center_.at(i) + (radius_ - margin_) : hi_[i] - margin_;
  }
  return v;
}

TailSeq Domain::anchor() const { return center_; }

double Domain::search_radius() const { return radius_ - margin_; }

bool Domain::contains(const TailSeq& x) const {
  if (kind_ == Kind::Ball) return sup_distance(x, center_) < radius_;
  const TailSeq y = x.extended(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!(lo_[i] < y.at(i) && y.at(i) < hi_[i])) return false;
  }
  for (std::size_t i = dim_; i < y.head_size(); ++i) {
    if (y.head()[i] != 0.0) return false;
  }
  return y.tail().sup_abs() == 0.0;
}

Vector Domain::project(std::span<const double> head) const {
  const Vector lo = search_lo();
  const Vector hi = search_hi();
  Vector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double v = i < head.size() ? head[i] : center_.at(i);
    out[i] = std::clamp(v, lo[i], hi[i]);
  }
  return out;
}

void ProblemSpec::validate() const {
  if (dim() == 0) throw InvariantError("problem dimension must be positive");
  auto check = [&](const FuncExpr& f, const std::string& name) {
    if (auto m = f.max_index(); m && *m >= dim()) {
      throw InvariantError(name + " references coordinate " + std::to_string(*m) +
                           " beyond dimension " + std::to_string(dim()));
    }
    double v = 0.0;
    try {
      v = evaluate(f, domain.anchor());
    } catch (const EvaluationError& e) {
      throw InvariantError(name + " is not evaluable: " + e.what());
    }
    if (!std::isfinite(v)) throw InvariantError(name + " is not finite at the anchor");
  };
  check(objective, "objective");
  const auto& fs = family.truncated();
  for (std::size_t n = 0; n < fs.size(); ++n) check(fs[n], "f_" + std::to_string(n + 1));
  if (family.limit()) check(*family.limit(), "f_inf");
}

double MultiplierCertificate::at(std::size_t n) const {
  if (n < alphas.size()) return alphas[n];
  return tail.at(n - alphas.size());
}

double MultiplierCertificate::tail_mass_after(std::size_t M) const {
  double s = 0.0;
  for (std::size_t n = M + 1; n < alphas.size(); ++n) s += alphas[n];
  const std::size_t start = std::max(M + 1, alphas.size());
  return s + tail.advanced(start - alphas.size()).series_sum();
}

std::string to_string(MultiplierCertificate::Mode mode) {
  return mode == MultiplierCertificate::Mode::Simplex ? "simplex" : "beta";
}

double sum_certificate(const MultiplierCertificate& cert) {
  double s = cert.alpha_inf;
  for (double a : cert.alphas) s += a;
  return s + cert.tail.series_sum();
}

MultiplierCertificate to_beta(const MultiplierCertificate& cert) {
  if (cert.alphas.empty() || !(cert.alphas[0] > 0.0)) {
    throw InvariantError("objective multiplier is zero; no beta normalization");
  }
  const double a0 = cert.alphas[0];
  MultiplierCertificate out = cert;
  out.alpha_inf /= a0;
  for (double& a : out.alphas) a /= a0;
  out.alphas[0] = 1.0;
  out.tail = cert.tail.scaled(1.0 / a0);
  out.mode = MultiplierCertificate::Mode::BetaNormalized;
  return out;
}

MultiplierCertificate to_simplex(const MultiplierCertificate& cert) {
  const double s = sum_certificate(cert);
  if (!(s > 0.0)) throw InvariantError("certificate has no positive mass");
  MultiplierCertificate out = cert;
  out.alpha_inf /= s;
  for (double& a : out.alphas) a /= s;
  out.tail = cert.tail.scaled(1.0 / s);
  out.mode = MultiplierCertificate::Mode::Simplex;
  return out;
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Domain: return "domain";
    case Condition::Feasibility: return "feasibility";
    case Condition::Nonnegativity: return "nonnegativity";
    case Condition::Normalization: return "normalization";
    case Condition::ComplementarySlackness: return "complementary_slackness";
    case Condition::Stationarity: return "stationarity";
    case Condition::Slater: return "slater";
    case Condition::GateauxEquality: return "gateaux_equality";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Rejected: return "rejected";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

const ConditionResult* CertificateReport::find(Condition c) const {
  for (const auto& r : conditions) {
    if (r.condition == c) return &r;
  }
  return nullptr;
}

}  // namespace dinicert
