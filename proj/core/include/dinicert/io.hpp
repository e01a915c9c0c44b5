#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dinicert/family.hpp"
#include "dinicert/problem.hpp"

namespace dinicert {

/// Schema violation. `path()` is a JSON pointer to the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

using Json = nlohmann::json;

Json to_json(const TailRule& t);
Json to_json(const TailSeq& x);
Json to_json(const FuncExpr& f);
Json to_json(const Coef& c);
Json to_json(const IndexExpr& i);
Json to_json(const ExprTemplate& t);
Json to_json(const ConstraintFamily& fam);
Json to_json(const Domain& d);
Json to_json(const ProblemSpec& p);
Json to_json(const MultiplierCertificate& c);
Json to_json(const CertificateReport& r);
Json to_json(const AlternativeOutcome& o);

// The `path` argument prefixes diagnostics; callers normally leave it empty.
TailRule tail_rule_from_json(const Json& j, const std::string& path = "");
TailSeq tail_seq_from_json(const Json& j, const std::string& path = "");
FuncExpr expr_from_json(const Json& j, const std::string& path = "");
Coef coef_from_json(const Json& j, const std::string& path = "");
IndexExpr index_from_json(const Json& j, const std::string& path = "");
ExprTemplate template_from_json(const Json& j, const std::string& path = "");
ConstraintFamily family_from_json(const Json& j, const std::string& path = "");
Domain domain_from_json(const Json& j, const std::string& path = "");
ProblemSpec problem_from_json(const Json& j, const std::string& path = "");
MultiplierCertificate certificate_from_json(const Json& j, const std::string& path = "");

/// Parses problem-file text. Syntax errors carry the line and column.
ProblemSpec parse_problem(std::string_view text);
std::string serialize_problem(const ProblemSpec& p, int indent = 2);

MultiplierCertificate parse_certificate(std::string_view text);
TailSeq parse_point(std::string_view text);

}  // namespace dinicert
