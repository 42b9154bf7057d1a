#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "holo/cli/output.hpp"
#include "holo/cli/scenario.hpp"

namespace fs = std::filesystem;
using namespace holo::cli;

namespace {

const std::string kBin = HOLONOMY_LAB_BIN;
const std::string kScenarios = SCENARIO_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("holonomy_lab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const int status = std::system((kBin + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_scenario(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << body;
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(CliExitCodes, MalformedScenarios) {
  const fs::path dir = scratch("malformed");
  const fs::path unknown =
      write_scenario(dir, R"({"schema_version": 1, "name": "x", "seed": 1, "setup": {"preset": "trivial"}, "bogus": 1})");
  EXPECT_EQ(run("holonomy --scenario " + unknown.string() + " --out " + (dir / "o").string()), 2);
  const fs::path no_seed = write_scenario(dir, R"({"schema_version": 1, "name": "x", "setup": {"preset": "trivial"}})");
  EXPECT_EQ(run("holonomy --scenario " + no_seed.string() + " --out " + (dir / "o").string()), 2);
  const fs::path bad_version =
      write_scenario(dir, R"({"schema_version": 7, "name": "x", "seed": 1, "setup": {"preset": "trivial"}})");
  EXPECT_EQ(run("holonomy --scenario " + bad_version.string() + " --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST(CliExitCodes, IoFailures) {
  const fs::path dir = scratch("io");
  EXPECT_EQ(run("holonomy --scenario " + (dir / "missing.json").string() + " --out " + (dir / "o").string()), 4);
  std::ofstream(dir / "plain_file") << "x";
  EXPECT_EQ(run("holonomy --scenario " + kScenarios + "/trivial.json --out " + (dir / "plain_file" / "sub").string()), 4);
}

TEST(CliExitCodes, FailedCheckGivesThree) {
  const fs::path dir = scratch("fail");
  const fs::path s = write_scenario(dir, R"({
    "schema_version": 1, "name": "strict", "seed": 5,
    "setup": {"preset": "random-polynomial", "group": "SU2"},
    "loops": [{"id": 0, "preset": "ellipse", "a": 0.8, "b": 0.5}],
    "checks": {"holonomy": {"tolerance": 1e-30}}
  })");
  EXPECT_EQ(run("holonomy --scenario " + s.string() + " --out " + (dir / "o").string()), 3);
  const auto summary = nlohmann::json::parse(slurp(dir / "o" / "holonomy.json"));
  EXPECT_FALSE(summary["pass"].get<bool>());
}

TEST(CliCommands, TrivialHolonomyIsIdentity) {
  const fs::path dir = scratch("trivial");
  ASSERT_EQ(run("holonomy --scenario " + kScenarios + "/trivial.json --out " + dir.string()), 0);
  const auto rows = read_csv(dir / "holonomy.csv");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "loop");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    // m00, m01, m10, m11 as (re, im) pairs starting at column 3.
    EXPECT_DOUBLE_EQ(std::stod(rows[r][3]), 1.0);
    EXPECT_DOUBLE_EQ(std::stod(rows[r][9]), 1.0);
    for (int c : {4, 5, 6, 7, 8, 10}) EXPECT_NEAR(std::stod(rows[r][static_cast<std::size_t>(c)]), 0.0, 1e-14);
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "holonomy.json"));
  EXPECT_EQ(summary["schema_version"], 1);
  EXPECT_EQ(summary["command"], "holonomy");
  EXPECT_TRUE(summary["pass"].get<bool>());
}

TEST(CliCommands, GroupoidChecksAreExact) {
  const fs::path dir = scratch("groupoid");
  ASSERT_EQ(run("groupoid-check --scenario " + kScenarios + "/groupoid.json --out " + dir.string()), 0);
  const auto rows = read_csv(dir / "groupoid-check.csv");
  ASSERT_GT(rows.size(), 10u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    // Names may hold quoted commas; failures and status are the last two cells.
    EXPECT_EQ(rows[r].back(), "exact-pass") << rows[r][0];
    EXPECT_EQ(rows[r][rows[r].size() - 2], "0");
  }
}

TEST(CliCommands, AbelianSeriesResidualsDecrease) {
  const fs::path dir = scratch("abelian");
  ASSERT_EQ(run("gen-wilson --oracle --scenario " + kScenarios + "/abelian_gen_wilson.json --out " + dir.string()), 0);
  const auto rows = read_csv(dir / "gen-wilson.csv");
  ASSERT_GT(rows.size(), 3u);
  double prev = 1e300;
  std::string loop = rows[1][0];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][0] != loop) {
      loop = rows[r][0];
      prev = 1e300;
    }
    const double res = std::stod(rows[r].back());
    EXPECT_LT(res, prev) << "row " << r;
    prev = res;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(CliCommands, RerunsAreByteIdentical) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  ASSERT_EQ(run("all --scenario " + kScenarios + "/su2_lab.json --out " + a.string()), 0);
  ASSERT_EQ(run("all --jobs 3 --scenario " + kScenarios + "/su2_lab.json --out " + b.string()), 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
  }
  EXPECT_GT(files, 10u);
}

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-2.5e-12), "-2.4999999999999998e-12");
  EXPECT_EQ(std::stod(format_number(M_PI)), M_PI);
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Output, CsvTableLayout) {
  CsvTable t({"a", "b_re", "b_im"});
  t.row() << 1 << std::complex<double>(0.5, -1.0);
  t.row() << "x,\"y\"" << 2.0 << 3.0;
  EXPECT_EQ(t.str(), "a,b_re,b_im\n1,0.5,-1\n\"x,\"\"y\"\"\",2,3\n");
}

TEST(Scenario, ParsesDefaultsAndTolerances) {
  const Scenario s = parse_scenario(R"({
    "schema_version": 1, "name": "p", "seed": 42,
    "setup": {"preset": "flat-angle", "xi": [0.1, 0.2, 0.3]},
    "loops": [{"id": 0, "preset": "circle", "radius": 0.5}],
    "checks": {"holonomy": {"tolerance": 1e-9}, "transport": {}}
  })");
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.setup.group, "SU2");
  EXPECT_EQ(s.loops.size(), 1u);
  EXPECT_DOUBLE_EQ(s.loops[0].radius, 0.5);
  EXPECT_DOUBLE_EQ(s.checks.at("holonomy"), 1e-9);
  EXPECT_DOUBLE_EQ(s.checks.at("transport"), default_tolerance("transport"));
  EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "name": "p", "seed": 1, "setup": {"preset": "nope"}})"),
               ScenarioError);
  EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "name": "p", "seed": 1, "setup": {"preset": "trivial"},
                                  "checks": {"unknown-check": {}}})"),
               ScenarioError);
  EXPECT_THROW(parse_scenario("not json"), ScenarioError);
}
