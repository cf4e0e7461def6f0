#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "arcflow_cli.hpp"

using arcflow::Json;
using arcflow::cli::run_command;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("arcflow_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, TangencyReportsVerdict) {
  const auto r = run({"tangency", "--space", "r2", "--a", "bracket(dilU,dilV)", "--b", "transVU"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["command"], "tangency");
  EXPECT_EQ(j["verdict"], "TANGENT");
  EXPECT_NEAR(j["result"]["order_p"].get<double>(), 1.5, 0.05);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"diagnose", "--space", "r1", "--estimator", "E1", "--a", "sin", "--seed", "5"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ExpectMismatchExitsTwo) {
  const auto r = run({"tangency", "--space", "r2", "--a", "transU", "--b", "transU", "--expect", "TANGENT"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.out)["verdict"], "EXACT_ZERO");
  EXPECT_NE(r.err.find("does not match"), std::string::npos);
}

TEST(Cli, ParseErrorNamesToken) {
  const auto r = run({"tangency", "--space", "r2", "--a", "sum(dilU,,transV)", "--b", "transV"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("PARSE_ERROR"), std::string::npos);
  EXPECT_NE(r.err.find("','"), std::string::npos) << r.err;
  const auto unknown = run({"tangency", "--space", "r2", "--a", "nosuch", "--b", "transV"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("nosuch"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
}

TEST(Cli, DumpConfigRoundTrip) {
  const auto dumped = run({"l2-reach", "--order", "2", "--steps", "64", "--expect", "MONOTONE", "--dump-config"});
  ASSERT_EQ(dumped.code, 0) << dumped.err;
  EXPECT_NE(dumped.out.find("command=l2-reach"), std::string::npos);
  EXPECT_NE(dumped.out.find("order=2"), std::string::npos);
  const auto path = temp_file("reach.cfg");
  {
    std::ofstream os(path);
    os << dumped.out;
  }
  const auto from_file = run({"--config", path.string()});
  const auto direct = run({"l2-reach", "--order", "2", "--steps", "64", "--expect", "MONOTONE"});
  ASSERT_EQ(direct.code, 0) << direct.err;
  EXPECT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, direct.out);
  // argv wins over the file
  const auto override_run = run({"l2-reach", "--config", path.string(), "--order", "1", "--dump-config"});
  EXPECT_NE(override_run.out.find("order=1"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, UnknownConfigKeyIsAnError) {
  const auto path = temp_file("bad.cfg");
  {
    std::ofstream os(path);
    os << "command=hermite\nbogus=1\n";
  }
  const auto r = run({"--config", path.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, CsvOutputs) {
  const auto gap_csv = temp_file("gaps.csv");
  const auto r = run({"tangency", "--space", "r2", "--a", "bracket(dilU,dilV)", "--b", "transVU", "--csv",
                      gap_csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(gap_csv);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "t,gap");
  int rows = 0;
  for (std::string line; std::getline(is, line);) rows += !line.empty();
  EXPECT_EQ(rows, 9);
  std::filesystem::remove(gap_csv);

  const auto out_csv = temp_file("output.csv");
  const auto reach = run({"l2-reach", "--order", "1", "--steps", "32", "--output-csv", out_csv.string()});
  ASSERT_EQ(reach.code, 0) << reach.err;
  const auto g = arcflow::read_grid_csv(out_csv.string());
  EXPECT_EQ(g.size(), arcflow::GridSpec{}.size());
  std::filesystem::remove(out_csv);
}

TEST(Cli, MetricCheckAndHermite) {
  const auto m = run({"metric-check", "--space", "hausdorff", "--triples", "200"});
  EXPECT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(Json::parse(m.out)["verdict"], "PASS");
  const auto h = run({"hermite", "--order", "4"});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_EQ(Json::parse(h.out)["verdict"], "AGREE");
  EXPECT_NEAR(Json::parse(h.out)["result"]["closed_form"]["values"][0].get<double>(), 0.398942, 1e-6);
}

TEST(Cli, InvolutivityVerdicts) {
  const auto heis = run({"involutive", "--space", "r3", "--f", "trans1", "--g", "heis", "--points", "0.5,0,0"});
  ASSERT_EQ(heis.code, 0) << heis.err;
  EXPECT_EQ(Json::parse(heis.out)["verdict"], "NOT_INVOLUTIVE");
  const auto plane = run({"involutive", "--space", "r2", "--f", "transU", "--g", "transV", "--points", "0.2,0.1"});
  ASSERT_EQ(plane.code, 0) << plane.err;
  EXPECT_EQ(Json::parse(plane.out)["verdict"], "INVOLUTIVE");
}

TEST(Cli, L2Bracket) {
  const auto r = run({"tangency", "--space", "l2", "--a", "bracket(X,Y)", "--b", "Z", "--point", "zero"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["verdict"], "TANGENT");
}
