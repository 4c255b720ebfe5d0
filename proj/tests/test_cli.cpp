#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gmix_cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gmix::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

double result(const json& j, const std::string& name) {
  for (const auto& r : j["results"])
    if (r["name"] == name) return r["value"].get<double>();
  ADD_FAILURE() << "no result " << name;
  return NAN;
}

}  // namespace

TEST(Cli, ConstantsForLaplace) {
  const auto r = run({"constants", "--family", "exp-power", "--p", "1", "--moment", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "constants");
  EXPECT_EQ(j["seed"], 0);
  EXPECT_EQ(j["params"]["p"], "1");
  EXPECT_EQ(j["params"]["family"], "exp-power");
  EXPECT_NEAR(result(j, "c_p"), 0.5, 1e-15);
  EXPECT_NEAR(result(j, "A_r"), std::sqrt(2.0) * std::pow(std::numbers::pi, -1.0 / 6.0), 1e-9);
  EXPECT_NEAR(result(j, "B_r"), std::cbrt(6.0) / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(result(j, "gamma_r"), std::cbrt(2.0 * std::sqrt(2.0 / std::numbers::pi)), 1e-12);
}

TEST(Cli, UsageErrorsExitOne) {
  auto r = run({"constants", "--family", "cauchy"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown family"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"moment", "--bogus", "3"}).code, 1);
  EXPECT_EQ(run({"section-volume", "--q", "abc"}).code, 1);
  EXPECT_EQ(run({"section-volume", "--q", "3"}).code, 1);
  EXPECT_EQ(run({"verify", "strip-counterexample", "--hold-sigma", "5", "--fail-sigma", "3"}).code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, StripCounterexampleFails) {
  const auto r = run({"verify", "strip-counterexample", "--p", "4", "--delta", "0.01"});
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "fails");
  EXPECT_EQ(j["command"], "verify strip-counterexample");
  EXPECT_EQ(j["params"]["delta"], "0.01");
  EXPECT_EQ(j["margin"], "-inf");
}

TEST(Cli, StripAtTwoHolds) {
  EXPECT_EQ(run({"verify", "strip-counterexample", "--p", "2", "--delta", "0.01"}).code, 0);
}

TEST(Cli, CsvHasOneRowPerEstimate) {
  const auto r = run({"verify", "strip-counterexample", "--format", "csv"});
  ASSERT_EQ(r.code, 2) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "command,name,value,stderr,n,seed");
  int rows = 0;
  bool verdict = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find("verdict:fails") != std::string::npos) verdict = true;
  }
  EXPECT_GE(rows, 4);
  EXPECT_TRUE(verdict);
}

TEST(Cli, SectionVolumeAtCoordinateNormalIsBallVolume) {
  const auto r = run({"section-volume", "--q", "1", "--n", "3", "--a", "e1", "--samples", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(result(json::parse(r.out), "section_volume"), 2.0, 1e-12);
}

TEST(Cli, ProjectionOfCubeUsesClosedForm) {
  const auto r = run({"projection-volume", "--q", "inf", "--n", "3", "--a", "1,1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  // |Proj_{a^perp} [-1,1]^3| = 4 ||a||_1
  EXPECT_NEAR(result(json::parse(r.out), "projection_volume"), 4.0 * std::sqrt(3.0), 1e-12);
}

TEST(Cli, SameSeedSameOutput) {
  const std::vector<std::string> args{"moment", "--family", "exp-power", "--p", "1.5", "--a", "1,2,3",
                                      "--samples", "20000", "--seed", "17"};
  const auto first = run(args), second = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
  auto other = args;
  other.back() = "18";
  EXPECT_NE(run(other).out, first.out);
}

TEST(Cli, GaussianMomentIsExactByQuadrature) {
  const auto r = run({"moment", "--family", "gaussian", "--a", "3,4", "--moment", "4", "--method", "quadrature"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(result(json::parse(r.out), "norm"), std::pow(3.0, 0.25), 1e-9);
}

TEST(Cli, BallSampleMatchesFormula) {
  const auto r = run({"ball-sample", "--q", "2", "--n", "3", "--moment", "2", "--samples", "200000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(result(j, "E|X_1|^r formula"), 0.2, 1e-12);
  EXPECT_NEAR(result(j, "E|X_1|^r sample"), 0.2, 4.0 * j["results"][0]["stderr"].get<double>());
}

TEST(Cli, SchurMomentHolds) {
  const auto r = run({"verify", "schur", "--functional", "moment", "--family", "exp-power", "--p", "1", "--order",
                      "3", "--a", "1,1,1", "--b", "1,0,0", "--samples", "200000"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(json::parse(r.out)["verdict"], "holds");
}

TEST(Cli, SigmaOverridesAreEchoedAndApplied) {
  const auto r = run({"verify", "correlation", "--family", "exp-power", "--p", "1", "--samples", "20000",
                      "--hold-sigma", "0.5", "--fail-sigma", "0.5"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["params"]["hold-sigma"], "0.5");
  EXPECT_EQ(j["params"]["samples"], "20000");
  EXPECT_GT(j["margin"].get<double>(), 0.0);
}

TEST(Cli, OutFileReceivesTheOutput) {
  const std::string path = testing::TempDir() + "gmix_cli_out.json";
  const auto r = run({"verify", "strip-counterexample", "--out", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  EXPECT_EQ(json::parse(in)["verdict"], "fails");
}
