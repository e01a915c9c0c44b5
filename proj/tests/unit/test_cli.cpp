#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dinicert/cli.hpp"
#include "dinicert/io.hpp"
#include "dinicert/problems.hpp"

using dinicert::cli::run;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("dinicert_cli_" + std::to_string(::getpid()) + "_" + name);
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Cli, DiniPrintsMinusOne) {
  const auto r = call({"dini", "--builtin", "example1:M=16", "--point", "xhat", "--dir", "e0", "--fn", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "-1");
}

TEST(Cli, ReproduceExample2) {
  const fs::path rep = temp_file("r2.json");
  const auto r = call({"reproduce", "example2", "--N", "5", "--report", rep.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto j = read_json(rep);
  EXPECT_EQ(j["command"], "reproduce");
  EXPECT_EQ(j["verdict"], "certified");
  EXPECT_LE(j["residuals"]["stationarity_residual"].get<double>(), 1e-9);
  for (const char* key : {"command", "config", "verdict", "residuals", "timings"}) EXPECT_TRUE(j.contains(key)) << key;
  fs::remove(rep);
}

TEST(Cli, PerturbedCertificateIsRejected) {
  auto cert = *dinicert::example2(2).cert;
  cert.alphas[1] += 1e-2;
  const fs::path cf = temp_file("cert.json"), rep = temp_file("v.json");
  std::ofstream(cf) << dinicert::to_json(cert).dump();
  const auto r = call({"verify-certificate", "--builtin", "example2:N=2", "--point", "xhat", "--cert",
                       cf.string(), "--report", rep.string()});
  EXPECT_EQ(r.code, 1) << r.out << r.err;
  const auto j = read_json(rep);
  EXPECT_EQ(j["verdict"], "rejected");
  EXPECT_EQ(j["residuals"]["failed"], "stationarity");
  fs::remove(cf);
  fs::remove(rep);
}

TEST(Cli, ProblemFileRoundTrip) {
  const fs::path pf = temp_file("p.json"), xf = temp_file("x.json");
  const auto inst = dinicert::example2(1);
  std::ofstream(pf) << dinicert::serialize_problem(inst.spec);
  std::ofstream(xf) << dinicert::to_json(*inst.xhat).dump();
  EXPECT_EQ(call({"find-certificate", "--problem", pf.string(), "--point", xf.string()}).code, 0);
  EXPECT_EQ(call({"slater", "--problem", pf.string(), "--point", xf.string()}).code, 0);
  // A problem file has no ground truth to fall back on.
  EXPECT_EQ(call({"verify-certificate", "--problem", pf.string(), "--point", xf.string()}).code, 64);
  fs::remove(pf);
  fs::remove(xf);
}

TEST(Cli, AlternativeExitCodes) {
  const auto r = call({"alternative", "--builtin", "random:seed=3,d=2,m=2"});
  EXPECT_TRUE(r.code == 0 || r.code == 3) << r.out;
  const auto e = call({"alternative", "--builtin", "example2:N=1", "--point", "xhat"});
  EXPECT_EQ(e.code, 3) << e.out;
}

TEST(Cli, OtherCommands) {
  EXPECT_EQ(call({"property-h", "--builtin", "example1:M=8"}).code, 1);  // decay not yet below 1e-3
  EXPECT_EQ(call({"property-h", "--builtin", "example1:M=16"}).code, 0);
  EXPECT_EQ(call({"slater", "--builtin", "example1", "--dir", "e0"}).code, 0);
  EXPECT_EQ(call({"slater", "--builtin", "example1", "--dir", "-e0"}).code, 1);
  EXPECT_EQ(call({"solve", "--builtin", "example2:N=2", "--starts", "4"}).code, 0);
  EXPECT_EQ(call({"verify-certificate", "--builtin", "example2:N=2", "--check-slater"}).code, 0);
}

TEST(Cli, UsageAndFileErrors) {
  EXPECT_EQ(call({}).code, 64);
  EXPECT_EQ(call({"frobnicate"}).code, 64);
  EXPECT_EQ(call({"dini", "--builtin", "example9"}).code, 64);
  EXPECT_EQ(call({"dini", "--builtin", "example1", "--fn", "x"}).code, 64);
  EXPECT_EQ(call({"dini", "--builtin", "example1", "--M", "1"}).code, 64);
  EXPECT_EQ(call({"dini"}).code, 64);
  EXPECT_EQ(call({"reproduce", "example7"}).code, 64);
  EXPECT_EQ(call({"verify-certificate", "--problem", "/nonexistent/p.json"}).code, 66);

  const fs::path bad = temp_file("bad.json");
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(call({"solve", "--problem", bad.string()}).code, 66);
  fs::remove(bad);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(Cli, DeterministicStdout) {
  const std::vector<std::string> args{"find-certificate", "--builtin", "example1:M=8", "--seed", "7"};
  const auto a = call(args), b = call(args);
  EXPECT_EQ(a.out, b.out);
  const std::vector<std::string> solve{"solve", "--builtin", "random:seed=5,d=2,m=2", "--seed", "3"};
  EXPECT_EQ(call(solve).out, call(solve).out);
}
