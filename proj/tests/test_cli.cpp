#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "casorati/fixtures.hpp"
#include "casorati/submersion_spec.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CASORATI_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, CheckEqualityFixtureExitsZero) {
  auto r = run("check --fixture example2 --theorem general");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  ASSERT_TRUE(doc.is_array());
  const auto& ineq = doc.at(0).at("inequality");
  EXPECT_NEAR(ineq.at("gap_delta").get<double>(), 0.0, 1e-10);
  EXPECT_TRUE(ineq.at("equality_flags").at("A_zero").get<bool>());
}

TEST(Cli, CheckStrictFixtureAtPoint) {
  auto r = run("check --fixture example1 --point 0,0,0,0,0,1");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  const auto& ineq = doc.at(0).at("inequality");
  EXPECT_GT(ineq.at("gap_delta").get<double>(), 1e-3);
  EXPECT_TRUE(ineq.at("strict").get<bool>());
  EXPECT_FALSE(ineq.at("equality_flags").at("quasi_umbilical").get<bool>());
}

TEST(Cli, CheckFlatProductAllZeroReport) {
  auto r = run("check --fixture flat_product");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  EXPECT_NEAR(doc.at(0).at("norms").at("normTH_sq").get<double>(), 0.0, 1e-15);
  EXPECT_NEAR(doc.at(0).at("inequality").at("lhs").get<double>(), 0.0, 1e-14);
}

TEST(Cli, TensorsDumpCarriesBlocks) {
  auto r = run("tensors --fixture example1 --point 0,0,0,0,0,1");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  const auto& T = doc.at(0).at("tensors").at("T_H");
  EXPECT_NEAR(T.at(0).at(0).at(2).get<double>(), -1.0, 1e-9);
  EXPECT_NEAR(T.at(0).at(1).at(2).get<double>(), 0.0, 1e-10);
  const auto& frame = doc.at(0).at("tensors").at("frame");
  EXPECT_EQ(frame.at("vertical").size(), 3u);
}

TEST(Cli, TensorsExample4Pattern) {
  auto r = run("tensors --fixture example4");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  const auto& T = doc.at(0).at("tensors").at("T_H");
  for (int a = 0; a < 4; ++a)
    EXPECT_NEAR(T.at(a).at(a).at(a).get<double>(), -1.0, 1e-9);
}

TEST(Cli, SweepEmitsLexicographicCsv) {
  auto r = run("sweep --fixture example1 --grid x6=0.5:2:4");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ss(r.output);
  std::string line;
  std::getline(ss, line);
  EXPECT_NE(line.find("lhs,rhs_delta"), std::string::npos);
  int rows = 0;
  double prev = -1;
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    ++rows;
    // x6 is the sixth field and must increase (lexicographic grid order)
    std::stringstream fs(line);
    std::string field;
    for (int i = 0; i < 6; ++i) std::getline(fs, field, ',');
    const double x6 = std::stod(field);
    EXPECT_GT(x6, prev);
    prev = x6;
    // gap_delta is field 10
    std::getline(fs, field, ',');  // lhs
    std::getline(fs, field, ',');  // rhs_delta
    std::getline(fs, field, ',');  // rhs_hat
    std::getline(fs, field, ',');  // gap_delta
    EXPECT_GT(std::stod(field), 0.0);
  }
  EXPECT_EQ(rows, 4);
}

TEST(Cli, SweepWarpedFixtureStaysAtEquality) {
  auto r = run("sweep --fixture example5 --grid t=-1:1:5");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ss(r.output);
  std::string line;
  std::getline(ss, line);  // header
  int rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    ++rows;
    std::stringstream fs(line);
    std::string field;
    for (int i = 0; i < 13; ++i) std::getline(fs, field, ',');  // gap_delta column
    EXPECT_NEAR(std::stod(field), 0.0, 1e-8);
  }
  EXPECT_EQ(rows, 5);
}

TEST(Cli, SweepSkipsOutOfDomainPoints) {
  // grid straddling x6 = 0: negative-x6 points are outside the chart
  auto r = run("sweep --fixture example1 --grid x6=-1:1:5");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ss(r.output);
  std::string line;
  int rows = -1;  // header
  while (std::getline(ss, line))
    if (!line.empty() && line != "\r") ++rows;
  EXPECT_EQ(rows, 2);  // only x6 = 0.5 and 1 survive
}

TEST(Cli, SweepEmptyGridHeaderOnly) {
  auto r = run("sweep --fixture example1 --grid x6=-5:-1:4");
  EXPECT_EQ(r.exit_code, 0);
  std::istringstream ss(r.output);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line))
    if (!line.empty() && line != "\r") ++lines;
  EXPECT_EQ(lines, 1);
}

TEST(Cli, SpecFileLoadsAndMatchesFixture) {
  const auto cat = casorati::fixtures::catalog();
  const auto& f = casorati::fixtures::find(cat, "example2");
  const auto j = casorati::io::to_json(f.spec);
  const std::string path = "/tmp/casorati_spec_test.json";
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  auto r = run("check --spec " + path + " --point 0.7,1.1,-0.4,0.9,0.3,1.3");
  EXPECT_EQ(r.exit_code, 0);
  auto doc = nlohmann::json::parse(r.output);
  EXPECT_NEAR(doc.at(0).at("inequality").at("gap_delta").get<double>(), 0.0, 1e-10);
  std::remove(path.c_str());
}

TEST(Cli, ReportsAreDeterministicAcrossRuns) {
  auto a = run("check --fixture example4 --theorem csf");
  auto b = run("check --fixture example4 --theorem csf");
  EXPECT_EQ(a.output, b.output);
}

TEST(Cli, ErrorPathsExitOne) {
  EXPECT_EQ(run("check --fixture no_such_fixture").exit_code, 1);
  EXPECT_EQ(run("check --spec /nonexistent.json").exit_code, 1);
  EXPECT_EQ(run("check --fixture example1 --point 1,2").exit_code, 1);
  // out-of-domain point: pipeline error
  EXPECT_EQ(run("check --fixture example1 --point 0,0,0,0,0,-1").exit_code, 1);
}

TEST(Cli, HelpListsEveryFlag) {
  auto r = run("check --help");
  for (const char* flag : {"--fixture", "--spec", "--point", "--points", "--theorem",
                           "--format", "--tol", "--seed", "--threads"})
    EXPECT_NE(r.output.find(flag), std::string::npos) << flag;
  auto rs = run("sweep --help");
  EXPECT_NE(rs.output.find("--grid"), std::string::npos);
}

TEST(Cli, ThreadedRunMatchesSerial) {
  auto serial = run("check --fixture example5 --theorem gssf --threads 1");
  auto parallel = run("check --fixture example5 --theorem gssf --threads 3");
  EXPECT_EQ(serial.exit_code, 0);
  EXPECT_EQ(serial.output, parallel.output);
}
