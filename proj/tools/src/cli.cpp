#include "dinicert/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dinicert/alternative.hpp"
#include "dinicert/calculus.hpp"
#include "dinicert/io.hpp"
#include "dinicert/kkt.hpp"
#include "dinicert/problems.hpp"
#include "dinicert/property_h.hpp"

namespace dinicert::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string builtin, problem, point, cert, report;
  long M = -1, N = -1;
  double tol = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 1;
  std::string dir, fn = "1", save, target;
  bool table = false, solver_tol = false, slater = false, gateaux = false;
  double radius = 0.5;
  std::vector<std::size_t> schedule;
  int starts = 32;
};

struct Report {
  Json config = Json::object();
  Json residuals = Json::object();
  Json timings = Json::object();
  Json details = Json::object();
  std::string verdict;
};

bool has_tol(const Options& o) { return !std::isnan(o.tol); }
double tol_or(const Options& o, double def) { return has_tol(o) ? o.tol : def; }

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  return fmt::format("{:.12g}", v);
}

std::string head_str(const Vector& v, std::size_t max = 8) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size() && i < max; ++i) s += (i ? ", " : "") + num(v[i]);
  if (v.size() > max) s += ", ...";
  return s + ")";
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Certified: return kCertified;
    case Verdict::Rejected: return kRejected;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kInternal;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Content errors in an input file count as file errors.
template <class F>
auto parse_file(const std::string& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw FileError(path + ": " + e.what());
  } catch (const InvariantError& e) {
    throw FileError(path + ": " + e.what());
  }
}

Instance load_instance(const Options& o) {
  if (o.builtin.empty() == o.problem.empty()) {
    throw UsageError("give exactly one of --builtin and --problem");
  }
  if (!o.problem.empty()) {
    Instance inst;
    inst.name = o.problem;
    inst.spec = parse_file(o.problem, [](const std::string& t) { return parse_problem(t); });
    return inst;
  }
  std::string name = o.builtin;
  const std::string kind = name.substr(0, name.find(':'));
  const bool has_params = name.find(':') != std::string::npos;
  if (kind == "example1" && o.M >= 0) {
    if (has_params) throw UsageError("--M conflicts with parameters in --builtin");
    if (o.M < 2) throw UsageError("example1 needs --M >= 2");
    name += ":M=" + std::to_string(o.M);
  }
  if (kind == "example2" && o.N >= 0) {
    if (has_params) throw UsageError("--N conflicts with parameters in --builtin");
    name += ":N=" + std::to_string(o.N);
  }
  if (kind == "example1" && name.find("M=") != std::string::npos) {
    const long m = std::stol(name.substr(name.find("M=") + 2));
    if (m < 2) throw UsageError("example1 needs M >= 2");
  }
  try {
    return builtin(name);
  } catch (const InvariantError& e) {
    throw UsageError(e.what());
  }
}

TailSeq resolve_point(const Options& o, const Instance& inst) {
  if (o.point.empty() || o.point == "xhat") {
    if (!inst.xhat) {
      throw UsageError(o.point.empty() ? "--point is required for this problem"
                                       : "no known optimum; pass --point FILE");
    }
    return *inst.xhat;
  }
  return parse_file(o.point, [](const std::string& t) { return parse_point(t); });
}

MultiplierCertificate resolve_cert(const Options& o, const Instance& inst) {
  if (o.cert.empty() || o.cert == "ground-truth") {
    if (!inst.cert) {
      throw UsageError(o.cert.empty() ? "--cert is required for this problem"
                                      : "no ground-truth certificate; pass --cert FILE");
    }
    return *inst.cert;
  }
  return parse_file(o.cert, [](const std::string& t) { return parse_certificate(t); });
}

FuncExpr pick_function(const ProblemSpec& p, const std::string& fn) {
  if (fn == "0" || fn == "objective") return p.objective;
  if (p.family.empty()) throw UsageError("problem has no constraints; use --fn 0");
  if (fn == "inf") return *p.family.limit();
  std::size_t used = 0;
  long n = -1;
  try {
    n = std::stol(fn, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != fn.size() || n < 1) throw UsageError("--fn expects 0, a positive index, or inf");
  return p.family.at(static_cast<std::size_t>(n));
}

TailSeq parse_direction(const std::string& spec, std::size_t dim, std::uint64_t seed) {
  const bool neg = !spec.empty() && spec[0] == '-';
  const std::string body = neg ? spec.substr(1) : spec;
  const double sign = neg ? -1.0 : 1.0;
  if (body.size() > 1 && body[0] == 'e' &&
      std::all_of(body.begin() + 1, body.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const std::size_t i = std::stoul(body.substr(1));
    return TailSeq::basis(std::max(dim, i + 1), i, sign);
  }
  if (body == "ones") return TailSeq(Vector(dim, sign));
  if (spec == "random") return sample_directions(dim, 1, seed).back();
  return parse_file(spec, [](const std::string& t) { return parse_point(t); });
}

Json base_config(const Options& o) {
  Json c{{"seed", o.seed}};
  if (!o.builtin.empty()) c["builtin"] = o.builtin;
  if (!o.problem.empty()) c["problem"] = o.problem;
  if (!o.point.empty()) c["point"] = o.point;
  if (!o.cert.empty()) c["cert"] = o.cert;
  if (o.M >= 0) c["M"] = o.M;
  if (o.N >= 0) c["N"] = o.N;
  c["tol"] = has_tol(o) ? Json(o.tol) : Json(nullptr);
  return c;
}

KktConfig kkt_config(const Options& o) {
  KktConfig cfg = o.solver_tol ? KktConfig::for_solver_output() : KktConfig{};
  if (has_tol(o)) cfg.feas_tol = cfg.slack_tol = cfg.stat_tol = cfg.norm_tol = o.tol;
  cfg.seed = o.seed;
  cfg.descent.seed = o.seed;
  cfg.check_slater = o.slater;
  cfg.check_gateaux = o.gateaux;
  return cfg;
}

void print_conditions(std::ostream& out, const CertificateReport& rep) {
  for (const auto& c : rep.conditions) {
    out << fmt::format("{:<24} {:<4} {:>14}  {}\n", to_string(c.condition),
                       c.passed ? "ok" : (c.band_limited ? "band" : "FAIL"), num(c.worst), c.detail);
  }
}

double min_of(const Vector& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}
double max_of(const Vector& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

void fill_certificate_residuals(Report& rep, const CertificateReport& cr) {
  const double smin = min_of(cr.stationarity);
  rep.residuals["max_slackness"] = max_of(cr.slackness);
  rep.residuals["min_stationarity"] = smin;
  rep.residuals["stationarity_residual"] = std::max(0.0, -smin);
  rep.residuals["tail_band"] = cr.tail_band;
  Json worst = Json::object();
  for (const auto& c : cr.conditions) worst[to_string(c.condition)] = c.worst;
  rep.residuals["conditions"] = worst;
  rep.residuals["failed"] = cr.failed ? Json(to_string(*cr.failed)) : Json(nullptr);
}

// ---------------------------------------------------------------------------

int cmd_dini(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  const TailSeq x = resolve_point(o, inst);
  const FuncExpr f = pick_function(inst.spec, o.fn);
  const std::size_t dim = std::max(inst.spec.dim(), x.head_size());
  const std::string dir = o.dir.empty() ? "e0" : o.dir;
  const TailSeq u = parse_direction(dir, dim, o.seed);

  StepSchedule sched;
  if (has_tol(o)) sched.converge_tol = o.tol;
  const DiniEstimate est = dini_upper(f, x, u, sched);
  const DiniEstimate numeric = dini_upper_numeric(f, x, u, sched);

  out << num(est.value) << '\n';
  out << "function   f_" << o.fn << '\n';
  out << "direction  " << dir << '\n';
  out << "mode       " << to_string(est.mode) << '\n';
  out << "numeric    " << num(numeric.value) << (numeric.converged ? "" : " (not converged)") << '\n';
  if (o.table) {
    out << fmt::format("{:>22} {:>22}\n", "t", "quotient");
    for (const auto& [t, q] : numeric.quotients) out << fmt::format("{:>22.15g} {:>22.15g}\n", t, q);
  }

  rep.config["fn"] = o.fn;
  rep.config["dir"] = dir;
  rep.residuals["value"] = est.value;
  rep.residuals["numeric"] = numeric.value;
  rep.residuals["gap"] = std::abs(est.value - numeric.value);
  Json q = Json::array();
  for (const auto& [t, v] : numeric.quotients) q.push_back({t, v});
  rep.details["quotients"] = q;
  rep.details["mode"] = to_string(est.mode);

  const bool ok = est.mode != DiniMode::NumericLimsup || est.converged;
  rep.verdict = ok ? "computed" : "inconclusive";
  return ok ? kCertified : kInconclusive;
}

std::vector<std::size_t> default_schedule(const ConstraintFamily& fam) {
  const std::size_t M = std::max<std::size_t>(fam.truncation(), 1);
  std::vector<std::size_t> s;
  for (std::size_t n = 2; n < M; n *= 2) s.push_back(n);
  s.push_back(M);
  return s;
}

int cmd_property_h(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  const TailSeq x = resolve_point(o, inst);
  const auto& fam = inst.spec.family;
  PropertyHConfig cfg;
  cfg.seed = o.seed;
  if (has_tol(o)) cfg.decay_tol = o.tol;
  const std::vector<std::size_t> sched =
      o.schedule.empty() && !fam.empty() ? default_schedule(fam) : o.schedule;
  if (sched.empty() && !fam.empty()) throw UsageError("empty --schedule");
  const PropertyHReport r =
      fam.empty() ? PropertyHReport{{}, 0.0, {}, 0.0, Verdict::Certified, "empty family"}
                  : check_property_h(fam, x, o.radius, sched, cfg);

  out << fmt::format("{:>6} {:>20}\n", "n", "seminorm");
  Json table = Json::array();
  for (const auto& d : r.decay) {
    out << fmt::format("{:>6} {:>20}\n", d.n, num(d.seminorm));
    table.push_back({{"n", d.n}, {"seminorm", d.seminorm}});
  }
  out << "limit agreement  " << num(r.limit_agreement) << '\n';
  out << "slope            " << num(r.slope) << '\n';
  out << "verdict          " << to_string(r.verdict) << " (" << r.reason << ")\n";

  rep.config["radius"] = o.radius;
  rep.config["schedule"] = sched;
  rep.residuals["decay"] = table;
  rep.residuals["limit_agreement"] = r.limit_agreement;
  rep.residuals["slope"] = r.slope;
  rep.residuals["sublinearity_violations"] = r.violations.size();
  rep.details["reason"] = r.reason;
  rep.verdict = to_string(r.verdict);
  return exit_for(r.verdict);
}

int cmd_alternative(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  if (!inst.spec.all_convex()) throw UsageError("alternative needs a convex problem");
  AlternativeConfig cfg;
  cfg.tol = tol_or(o, 1e-6);
  cfg.descent.seed = o.seed;

  AlternativeOutcome res;
  if (!o.point.empty()) {
    const TailSeq x = resolve_point(o, inst);
    std::vector<FuncExpr> funcs{inst.spec.objective};
    for (const auto& f : inst.spec.family.truncated()) funcs.push_back(f);
    res = homotopy_alternative(funcs, inst.spec.family.limit(), x, inst.spec.domain, cfg);
  } else {
    res = solve_alternative(AlternativeSystem::from_problem(inst.spec), cfg);
  }

  int code = kInconclusive;
  if (const auto* w = std::get_if<Witness>(&res)) {
    out << "branch   witness\n";
    out << "point    " << head_str(w->point.head()) << '\n';
    out << "margin   " << num(w->margin) << '\n';
    if (!o.point.empty()) out << "t        " << num(w->t) << '\n';
    rep.residuals["margin"] = w->margin;
    rep.verdict = "witness";
    code = kWitness;
  } else if (const auto* m = std::get_if<Multipliers>(&res)) {
    out << "branch   multipliers\n";
    out << "alpha    " << head_str(m->cert.alphas) << '\n';
    out << "alpha_inf " << num(m->cert.alpha_inf) << '\n';
    out << "min over cuts   " << num(m->min_weighted) << '\n';
    out << "audit minimum   " << num(m->audit_min) << '\n';
    rep.residuals["min_weighted"] = m->min_weighted;
    rep.residuals["audit_min"] = m->audit_min;
    rep.verdict = "multipliers";
    code = kMultipliers;
  } else {
    const auto& in = std::get<Inconclusive>(res);
    out << "branch   inconclusive\n";
    out << "game value  " << num(in.game_value) << '\n';
    out << "best value  " << num(in.best_value) << '\n';
    out << in.diagnostics << '\n';
    rep.residuals["game_value"] = in.game_value;
    rep.residuals["best_value"] = in.best_value;
    rep.verdict = "inconclusive";
  }
  rep.details = to_json(res);
  return code;
}

int cmd_verify(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  const TailSeq x = resolve_point(o, inst);
  const MultiplierCertificate cert = resolve_cert(o, inst);
  const KktConfig cfg = kkt_config(o);
  const CertificateReport cr = verify_kkt_certificate(inst.spec, x, cert, cfg);

  print_conditions(out, cr);
  out << "verdict " << to_string(cr.verdict);
  if (cr.failed) out << " (failed: " << to_string(*cr.failed) << ")";
  out << '\n';
  if (!cr.reason.empty()) out << cr.reason << '\n';

  fill_certificate_residuals(rep, cr);
  rep.details = to_json(cr);
  rep.verdict = to_string(cr.verdict);
  return exit_for(cr.verdict);
}

int cmd_find(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  const TailSeq x = resolve_point(o, inst);
  const KktConfig cfg = kkt_config(o);
  const KktSearch s = find_kkt_certificate(inst.spec, x, cfg);

  out << "active     " << s.active.size() << (s.limit_active ? " + limit" : "") << '\n';
  out << "cuts       " << s.cuts << '\n';
  out << "game value " << num(s.game_value) << '\n';
  if (s.cert) {
    out << "alpha      " << head_str(s.cert->alphas) << '\n';
    out << "alpha_inf  " << num(s.cert->alpha_inf) << '\n';
    if (!s.cert->alphas.empty() && s.cert->alphas[0] > 0.0) {
      const MultiplierCertificate beta = to_beta(*s.cert);
      out << "beta       " << head_str(beta.alphas) << '\n';
      out << "beta_inf   " << num(beta.alpha_inf) << '\n';
    }
    print_conditions(out, s.report);
    rep.details["certificate"] = to_json(*s.cert);
    fill_certificate_residuals(rep, s.report);
    if (!o.save.empty()) {
      std::ofstream f(o.save);
      if (!f) throw FileError("cannot write " + o.save);
      f << to_json(*s.cert).dump(2) << '\n';
    }
  }
  if (!s.failure.empty()) out << s.failure << '\n';
  rep.residuals["game_value"] = s.game_value;
  rep.details["failure"] = s.failure;

  int code = kRejected;
  if (s.cert) {
    code = exit_for(s.report.verdict);
  } else if (s.failure.find("rounds") != std::string::npos) {
    code = kInconclusive;
  }
  rep.verdict = code == kCertified ? "certified" : code == kRejected ? "rejected" : "inconclusive";
  out << "verdict " << rep.verdict << '\n';
  return code;
}

int cmd_slater(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  const TailSeq x = resolve_point(o, inst);
  const double tol = tol_or(o, 1e-9);
  KktConfig cfg = kkt_config(o);
  cfg.feas_tol = tol;

  if (inst.spec.family.empty()) {
    out << "no constraints\nverdict certified\n";
    rep.verdict = "certified";
    return kCertified;
  }
  std::optional<TailSeq> w;
  double margin = 0.0;
  if (!o.dir.empty()) {
    w = parse_direction(o.dir, std::max(inst.spec.dim(), x.head_size()), o.seed);
    margin = slater_margin(inst.spec, x, *w, cfg.kink_tol);
  } else if (const auto sd = slater_direction(inst.spec, x, cfg)) {
    w = sd->w;
    margin = sd->margin;
  }
  int code = kInconclusive;
  if (w) {
    out << "direction  " << head_str(w->head()) << '\n';
    out << "margin     " << num(margin) << '\n';
    rep.residuals["margin"] = margin;
    rep.details["direction"] = to_json(*w);
    code = margin < -tol ? kCertified : (o.dir.empty() ? kInconclusive : kRejected);
  } else {
    out << "no direction with negative margin found\n";
  }
  rep.verdict = code == kCertified ? "certified" : code == kRejected ? "rejected" : "inconclusive";
  out << "verdict " << rep.verdict << '\n';
  return code;
}

int cmd_solve(const Options& o, std::ostream& out, Report& rep) {
  const Instance inst = load_instance(o);
  SolveConfig sc;
  sc.starts = o.starts;
  sc.seed = o.seed;
  sc.descent.seed = o.seed;
  sc.feas_tol = tol_or(o, 1e-6);
  const bool own_m = o.M >= 0 && o.builtin.rfind("example1", 0) != 0;

  TruncatedSolve r;
  try {
    r = own_m ? solve_truncated(inst.spec, static_cast<std::size_t>(o.M), sc)
              : solve_truncated(inst.spec, sc);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e)) throw;
    out << e.what() << "\nverdict inconclusive\n";
    rep.verdict = "inconclusive";
    return kInconclusive;
  }

  out << fmt::format("{:>10} {:>20} {:>20} {:>14}\n", "rho", "penalized", "objective", "violation");
  Json hist = Json::array();
  for (const auto& h : r.history) {
    out << fmt::format("{:>10} {:>20} {:>20} {:>14}\n", num(h.rho), num(h.penalized), num(h.objective),
                       num(h.max_violation));
    hist.push_back({{"rho", h.rho}, {"penalized", h.penalized}, {"objective", h.objective},
                    {"max_violation", h.max_violation}});
  }
  out << "objective  " << num(r.objective) << '\n';
  out << "violation  " << num(r.max_violation) << '\n';
  out << "point      " << head_str(r.head) << '\n';
  rep.residuals["objective"] = r.objective;
  rep.residuals["max_violation"] = r.max_violation;
  rep.details["point"] = to_json(r.point);
  rep.details["history"] = hist;
  if (inst.xhat) {
    double err = 0.0;
    for (std::size_t i = 0; i < r.head.size(); ++i) err = std::max(err, std::abs(r.head[i] - inst.xhat->at(i)));
    out << "max error vs known optimum  " << num(err) << '\n';
    rep.residuals["max_coordinate_error"] = err;
  }
  const bool ok = r.max_violation <= sc.feas_tol;
  rep.verdict = ok ? "certified" : "inconclusive";
  out << "verdict " << rep.verdict << '\n';
  return ok ? kCertified : kInconclusive;
}

int cmd_reproduce(const Options& o, std::ostream& out, Report& rep) {
  Instance inst;
  if (o.target == "example1") {
    if (o.N >= 0) throw UsageError("--N applies to example2");
    if (o.M >= 0 && o.M < 2) throw UsageError("example1 needs --M >= 2");
    inst = example1(o.M >= 0 ? static_cast<std::size_t>(o.M) : 16);
  } else if (o.target == "example2") {
    if (o.M >= 0) throw UsageError("--M applies to example1");
    inst = example2(o.N >= 0 ? static_cast<std::size_t>(o.N) : 5);
  } else {
    throw UsageError("reproduce expects example1 or example2");
  }
  const ProblemSpec& P = inst.spec;
  const TailSeq& xhat = *inst.xhat;
  const MultiplierCertificate& cert = *inst.cert;
  const double sol_tol = tol_or(o, 1e-4);
  KktConfig kcfg;
  kcfg.seed = o.seed;
  kcfg.descent.seed = o.seed;

  bool all = true;
  Json steps = Json::array();
  auto step = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = Clock::now();
    const auto [ok, detail] = body();
    rep.timings[name + "_s"] = seconds_since(t0);
    out << fmt::format("{} {:<14} {}\n", ok ? "PASS" : "FAIL", name, detail);
    steps.push_back({{"step", name}, {"passed", ok}, {"detail", detail}});
    all = all && ok;
  };

  step("property_h", [&] {
    PropertyHConfig pc;
    pc.seed = o.seed;
    const auto r = check_property_h(P.family, xhat, 0.5, default_schedule(P.family), pc);
    rep.residuals["property_h_last_seminorm"] = r.decay.back().seminorm;
    return std::pair{r.verdict == Verdict::Certified,
                     "seminorm " + num(r.decay.back().seminorm) + " at n = " +
                         std::to_string(r.decay.back().n)};
  });
  step("slater", [&] {
    const double m = slater_margin(P, xhat, *inst.slater_hint);
    rep.residuals["slater_margin"] = m;
    return std::pair{m < 0.0, "margin " + num(m)};
  });
  CertificateReport cr;
  step("verify", [&] {
    cr = verify_kkt_certificate(P, xhat, cert, kcfg);
    fill_certificate_residuals(rep, cr);
    return std::pair{cr.certified(), to_string(cr.verdict) + ", stationarity residual " +
                                         num(std::max(0.0, -min_of(cr.stationarity)))};
  });
  step("sufficiency", [&] {
    const auto s = sufficiency_check_convex(P, xhat, cert, kcfg);
    rep.residuals["sufficiency_min_gap"] = s.min_gap;
    return std::pair{s.sufficient, "min gap " + num(s.min_gap)};
  });
  step("solve", [&] {
    SolveConfig sc;
    sc.starts = o.starts;
    sc.seed = o.seed;
    sc.descent.seed = o.seed;
    const auto r = solve_truncated(P, sc);
    double err = 0.0;
    for (std::size_t i = 0; i < r.head.size(); ++i) err = std::max(err, std::abs(r.head[i] - xhat.at(i)));
    rep.residuals["solve_max_error"] = err;
    return std::pair{err <= sol_tol, "max coordinate error " + fmt::format("{:.3g}", err)};
  });
  step("find", [&] {
    const auto s = find_kkt_certificate(P, xhat, kcfg);
    if (!s.found()) return std::pair{false, s.failure};
    const MultiplierCertificate beta = to_beta(*s.cert);
    double err = 0.0;
    const std::size_t M = P.family.truncation();
    for (std::size_t n = 1; n <= M; ++n) err = std::max(err, std::abs(beta.at(n) - cert.at(n)));
    rep.residuals["find_beta_error"] = err;
    return std::pair{err <= 1e-6, "beta error " + fmt::format("{:.3g}", err)};
  });

  rep.config["target"] = o.target;
  rep.config["starts"] = o.starts;
  rep.details["steps"] = steps;
  rep.verdict = all ? "certified" : "rejected";
  out << "verdict " << rep.verdict << '\n';
  return all ? kCertified : kRejected;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dini-derivative optimality certificates", "dinicert"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--builtin", o.builtin, "example1[:M=16], example2[:N=0], random:seed=S,d=D,m=K");
    s->add_option("--problem", o.problem, "problem file (JSON)");
    s->add_option("--M", o.M, "truncation level (example1 size; solve truncation)");
    s->add_option("--N", o.N, "example2 size");
    s->add_option("--tol", o.tol, "tolerance; the default depends on the command");
    s->add_option("--seed", o.seed, "seed for sampled directions and starts")->capture_default_str();
    s->add_option("--report", o.report, "write the JSON report here");
  };
  auto point = [&](CLI::App* s) { s->add_option("--point", o.point, "point file or 'xhat'"); };
  auto cert = [&](CLI::App* s) { s->add_option("--cert", o.cert, "certificate file or 'ground-truth'"); };
  auto kkt = [&](CLI::App* s) {
    s->add_flag("--solver-tol", o.solver_tol, "tolerances for points known to solver accuracy");
    s->add_flag("--check-slater", o.slater, "also check the Slater normalization");
    s->add_flag("--check-gateaux", o.gateaux, "also check the Gateaux equality");
  };

  auto* dini = app.add_subcommand("dini", "directional derivative of one function");
  common(dini);
  point(dini);
  dini->add_option("--dir", o.dir, "e<i>, -e<i>, ones, random, or a point file (default e0)");
  dini->add_option("--fn", o.fn, "0 (objective), n >= 1, or inf")->capture_default_str();
  dini->add_flag("--table", o.table, "print the difference-quotient table");

  auto* ph = app.add_subcommand("property-h", "seminorm decay table of f_n - f_inf");
  common(ph);
  point(ph);
  ph->add_option("--radius", o.radius, "ball radius")->capture_default_str();
  ph->add_option("--schedule", o.schedule, "values of n (default 2, 4, ..., M)")->delimiter(',');

  auto* alt = app.add_subcommand("alternative", "witness or multipliers for the system h_n < 0");
  common(alt);
  point(alt);

  auto* ver = app.add_subcommand("verify-certificate", "check a multiplier certificate");
  common(ver);
  point(ver);
  cert(ver);
  kkt(ver);

  auto* fnd = app.add_subcommand("find-certificate", "search multipliers at a point");
  common(fnd);
  point(fnd);
  kkt(fnd);
  fnd->add_option("--save", o.save, "write the certificate here");

  auto* sl = app.add_subcommand("slater", "Slater direction and margin");
  common(sl);
  point(sl);
  sl->add_option("--dir", o.dir, "test this direction instead of searching");

  auto* sv = app.add_subcommand("solve", "exact-penalty solve of the truncated problem");
  common(sv);
  sv->add_option("--starts", o.starts, "random starts")->capture_default_str();

  auto* rp = app.add_subcommand("reproduce", "full pipeline on a built-in example");
  common(rp);
  rp->add_option("target", o.target, "example1 or example2")->required();
  rp->add_option("--starts", o.starts, "random starts for the solve step")->capture_default_str();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  const std::vector<std::pair<CLI::App*, std::function<int(std::ostream&, Report&)>>> table{
      {dini, [&](std::ostream& os, Report& r) { return cmd_dini(o, os, r); }},
      {ph, [&](std::ostream& os, Report& r) { return cmd_property_h(o, os, r); }},
      {alt, [&](std::ostream& os, Report& r) { return cmd_alternative(o, os, r); }},
      {ver, [&](std::ostream& os, Report& r) { return cmd_verify(o, os, r); }},
      {fnd, [&](std::ostream& os, Report& r) { return cmd_find(o, os, r); }},
      {sl, [&](std::ostream& os, Report& r) { return cmd_slater(o, os, r); }},
      {sv, [&](std::ostream& os, Report& r) { return cmd_solve(o, os, r); }},
      {rp, [&](std::ostream& os, Report& r) { return cmd_reproduce(o, os, r); }},
  };

  for (const auto& [sub, fn] : table) {
    if (!sub->parsed()) continue;
    const std::string command = sub->get_name();
    try {
      Report rep;
      rep.config = base_config(o);
      const auto t0 = Clock::now();
      const int code = fn(out, rep);
      rep.timings["total_s"] = seconds_since(t0);
      if (!o.report.empty()) {
        const Json j{{"command", command},       {"config", rep.config},
                     {"verdict", rep.verdict},   {"residuals", rep.residuals},
                     {"timings", rep.timings},   {"details", rep.details}};
        std::ofstream f(o.report);
        if (!f) throw FileError("cannot write " + o.report);
        f << j.dump(2) << '\n';
      }
      return code;
    } catch (const UsageError& e) {
      err << command << ": " << e.what() << '\n';
      return kUsage;
    } catch (const FileError& e) {
      err << command << ": " << e.what() << '\n';
      return kFileError;
    } catch (const InvariantError& e) {
      err << command << ": invariant violated: " << e.what() << '\n';
      return kInternal;
    } catch (const std::invalid_argument& e) {
      err << command << ": " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      err << command << ": internal error: " << e.what() << '\n';
      return kInternal;
    }
  }
  return kUsage;
}

}  // namespace dinicert::cli
