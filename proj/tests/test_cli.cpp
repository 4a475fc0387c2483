#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cctool::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("cohcost_test_" + name); }

fs::path write_model(const std::string& name, const std::string& json) {
  fs::path p = temp_file(name);
  std::ofstream(p) << json;
  return p;
}

}  // namespace

TEST(CliFig2, BitflipBoundariesMatchClosedForms) {
  CliRun r = run({"fig2", "--builtin", "bitflip"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"delta", "sqrtF_regionA_boundary", "sqrtF_regionB_boundary", "domain_ok"}));
  const double edge = 8.0 * std::sqrt(2.0) / 9.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = std::stod(rows[i][0]);
    const bool ok = rows[i][3] == "true";
    EXPECT_NEAR(std::stod(rows[i][1]), std::max(0.0, 1.0 / d - 2.0), 1e-12);
    const double b = ok ? 1.0 / d + std::sqrt(2.0) / 2.0 : 1.0 / edge + std::sqrt(2.0) / 2.0;
    EXPECT_NEAR(std::stod(rows[i][2]), b, 1e-12);
    EXPECT_EQ(ok, d <= edge);
  }
  EXPECT_EQ(rows.back()[3], "false");
}

TEST(CliFig2, PointAtDeltaTenth) {
  CliRun r = run({"fig2", "--builtin", "bitflip", "--delta-min", "0.1", "--delta-max", "1.3", "--steps", "2"});
  ASSERT_EQ(r.code, 0);
  auto rows = parse_csv(r.out);
  EXPECT_EQ(std::stod(rows[1][0]), 0.1);
  EXPECT_NEAR(std::stod(rows[1][1]), 8.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][2]), 10.7071, 1e-4);
  EXPECT_EQ(rows[1][3], "true");
}

TEST(CliFig2, SymmetricGateHasZeroRegionA) {
  fs::path m = write_model("sym.json", R"({"d_S":2,"A_S":[[-0.5,0],[0,0],[0,0],[0.5,0]],"U_S":[[1,0],[0,0],[0,0],[1,0]]})");
  CliRun r = run({"fig2", "--model", m.string(), "--steps", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][1]), 0.0);
}

TEST(CliFig2, WritesCsvAndSvgFiles) {
  fs::path csv = temp_file("fig2.csv"), svg = temp_file("fig2.svg");
  CliRun r = run({"fig2", "--builtin", "bitflip", "--out", csv.string(), "--svg", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream s(svg);
  std::string text((std::istreambuf_iterator<char>(s)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("<svg"), std::string::npos);
  EXPECT_NE(text.find("<polyline"), std::string::npos);
  EXPECT_NE(text.find("<polygon"), std::string::npos);
  EXPECT_GT(fs::file_size(csv), 100u);
}

TEST(CliFig2, InvalidInputs) {
  EXPECT_EQ(run({"fig2", "--builtin", "bitflip", "--delta-min", "0.5", "--delta-max", "0.2"}).code, 1);
  EXPECT_EQ(run({"fig2", "--builtin", "bitflip", "--delta-max", "2"}).code, 1);
  EXPECT_EQ(run({"fig2"}).code, 1);
  EXPECT_EQ(run({"fig2", "--builtin", "nosuch"}).code, 1);
  EXPECT_EQ(run({"fig2", "--builtin", "bitflip", "--out", "/nonexistent-dir/x.csv"}).code, 1);
}

TEST(CliModel, ValidationOnLoad) {
  fs::path bad = write_model("bad.json", R"({"d_S":2,"A_S":[[0,0],[1,0],[0,0],[0,0]],"U_S":[[1,0],[0,0],[0,0],[1,0]]})");
  CliRun r = run({"fig2", "--model", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Hermitian"), std::string::npos);
  fs::path nonu = write_model("nonu.json", R"({"d_S":2,"A_S":[[1,0],[0,0],[0,0],[0,0]],"U_S":[[1,0],[1,0],[0,0],[1,0]]})");
  EXPECT_EQ(run({"fig2", "--model", nonu.string()}).code, 1);
  fs::path garbage = write_model("garbage.json", "{not json");
  EXPECT_EQ(run({"fig2", "--model", garbage.string()}).code, 1);
  fs::path shortm = write_model("short.json", R"({"d_S":2,"A_S":[[1,0]],"U_S":[[1,0]]})");
  EXPECT_EQ(run({"fig2", "--model", shortm.string()}).code, 1);
  EXPECT_EQ(run({"fig2", "--model", bad.string(), "--builtin", "bitflip"}).code, 1);
}

TEST(CliModel, ShippedModelsMatchBuiltins) {
  for (const std::string name : {"bitflip", "erasure"}) {
    cohcost::TargetSpec file = cohcost::load_model(std::string(COHCOST_MODELS_DIR) + "/" + name + ".json");
    cohcost::TargetSpec builtin = cohcost::builtin_model(name);
    EXPECT_LT(testutil::max_diff(file.A_S.mat(), builtin.A_S.mat()), 1e-15);
    EXPECT_LT(testutil::max_diff(file.U_S.mat(), builtin.U_S.mat()), 1e-15);
  }
}

TEST(CliProtocol, ThresholdReport) {
  CliRun r = run({"protocol", "--builtin", "bitflip", "--zeta", "3.1820"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["delta_bound"].get<double>(), 0.1746, 1e-4);
  EXPECT_LE(j["delta_measured"].get<double>(), 0.1746 + 1e-6);
  EXPECT_EQ(j["lattice"]["s"].get<double>(), 1.0);
  EXPECT_EQ(j["lattice"]["N"].get<int>(), 27);
  EXPECT_TRUE(j["theorem1_check"]["holds"].get<bool>());
  EXPECT_TRUE(j.contains("optimizer"));
  EXPECT_TRUE(j.contains("conservation_residuals"));
  EXPECT_NEAR(j["qfi_measured"].get<double>(), 4 * 3.182 * 3.182, 0.01 * 4 * 3.182 * 3.182);
}

TEST(CliProtocol, TargetDelta) {
  CliRun r = run({"protocol", "--builtin", "bitflip", "--target-delta", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["zeta"].get<double>(), (1 / 0.05 + std::sqrt(2.0) * 0.5) / 2, 1e-12);
  EXPECT_NEAR(j["zeta"].get<double>(), 10.354, 1e-3);
  EXPECT_LE(j["delta_measured"].get<double>(), 0.05 + 1e-6);
}

TEST(CliProtocol, IdentityTargetAndBelowThreshold) {
  fs::path m = write_model("id.json", R"({"d_S":2,"A_S":[[-0.5,0],[0,0],[0,0],[0.5,0]],"U_S":[[1,0],[0,0],[0,0],[1,0]]})");
  CliRun r = run({"protocol", "--model", m.string(), "--target-F", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(nlohmann::json::parse(r.out)["delta_measured"].get<double>(), 1e-10);

  CliRun low = run({"protocol", "--builtin", "bitflip", "--zeta", "1.0"});
  ASSERT_EQ(low.code, 0);
  auto j = nlohmann::json::parse(low.out);
  EXPECT_FALSE(j["delta_bound_applicable"].get<bool>());
  EXPECT_TRUE(j["delta_bound"].is_null());
  EXPECT_NE(low.err.find("threshold"), std::string::npos);
}

TEST(CliProtocol, ExactlyOneTarget) {
  EXPECT_EQ(run({"protocol", "--builtin", "bitflip"}).code, 1);
  EXPECT_EQ(run({"protocol", "--builtin", "bitflip", "--zeta", "4", "--target-F", "64"}).code, 1);
  fs::path irr = write_model("irr.json", R"({"d_S":3,"A_S":[[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[2.414213562373095,0]],"U_S":[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]})");
  CliRun r = run({"protocol", "--model", irr.string(), "--zeta", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("incommensurate"), std::string::npos);
}

TEST(CliVerify, RowsAndExitCodes) {
  CliRun one = run({"verify", "--suites", "lemma3", "--trials", "20"});
  ASSERT_EQ(one.code, 0) << one.err;
  auto rows = parse_csv(one.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"suite", "trials", "violations", "worst_margin", "seed"}));
  EXPECT_EQ(rows[1][0], "lemma3");
  EXPECT_EQ(rows[1][2], "0");
  EXPECT_EQ(rows[1][4], "42");

  CliRun all = run({"verify", "--trials", "10"});
  ASSERT_EQ(all.code, 0);
  EXPECT_EQ(parse_csv(all.out).size(), 6u);

  EXPECT_EQ(run({"verify", "--trials", "0"}).code, 1);
  EXPECT_EQ(run({"verify", "--suites", "bogus"}).code, 1);
}

TEST(CliVerify, SeedFromEnvironmentAndFlag) {
  ::setenv("CC_SEED", "7", 1);
  CliRun env = run({"verify", "--suites", "c2", "--trials", "5"});
  CliRun flag = run({"verify", "--suites", "c2", "--trials", "5", "--seed", "9"});
  ::setenv("CC_SEED", "oops", 1);
  CliRun bad = run({"verify", "--suites", "c2", "--trials", "5"});
  ::unsetenv("CC_SEED");
  EXPECT_EQ(parse_csv(env.out)[1][4], "7");
  EXPECT_EQ(parse_csv(flag.out)[1][4], "9");
  EXPECT_EQ(bad.code, 1);
}

TEST(CliSweep, RowsAndValidation) {
  CliRun r = run({"sweep", "--builtin", "bitflip", "--zetas", "4,8"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"zeta", "sqrtF", "delta_measured", "product_delta_times_sqrtF",
                                               "theorem1_lower", "theorem2_upper"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double sqrt_f = std::stod(rows[i][1]), delta = std::stod(rows[i][2]);
    EXPECT_NEAR(std::stod(rows[i][3]), delta * sqrt_f, 1e-12);
    EXPECT_LE(std::stod(rows[i][4]), sqrt_f + 1e-6);
    EXPECT_NEAR(std::stod(rows[i][5]), 1 / delta + std::sqrt(2.0) / 2, 1e-9);
  }
  CliRun single = run({"sweep", "--builtin", "bitflip", "--zetas", "5"});
  EXPECT_EQ(parse_csv(single.out).size(), 2u);
  EXPECT_EQ(run({"sweep", "--builtin", "bitflip", "--zetas", "8,4"}).code, 1);
  CliRun low = run({"sweep", "--builtin", "bitflip", "--zetas", "1,4"});
  EXPECT_EQ(low.code, 0);
  EXPECT_NE(low.err.find("zeta=1"), std::string::npos);
}

TEST(CliDeterminism, ByteIdenticalOutput) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"fig2", "--builtin", "bitflip"},
           {"sweep", "--builtin", "bitflip", "--zetas", "4"},
           {"verify", "--trials", "10"},
           {"protocol", "--builtin", "erasure", "--zeta", "8"}}) {
    CliRun a = run(args), b = run(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find('\r'), std::string::npos);
  }
}

TEST(CliHelp, NoSubcommandIsAnError) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}
