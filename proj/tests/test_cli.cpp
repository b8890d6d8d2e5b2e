#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli/app.hpp"

namespace fs = std::filesystem;
using proxima::cli::run;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("proxima_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// Data rows of a curve CSV as columns of doubles (comment lines and header skipped).
std::vector<std::vector<double>> rows_of(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& line : lines_of(text)) {
    if (line.empty() || line[0] == '#' || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-'))
      continue;
    std::vector<double> row;
    std::istringstream is(line);
    for (std::string cell; std::getline(is, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string comment_value(const std::string& text, const std::string& key) {
  for (const auto& line : lines_of(text)) {
    const auto pos = line.find(key + "=");
    if (line.rfind("# ", 0) == 0 && pos != std::string::npos) {
      const auto rest = line.substr(pos + key.size() + 1);
      return rest.substr(0, rest.find(' '));
    }
  }
  return {};
}

const char* sphere_config = R"({"kernel": "heat-sio2",
  "curves": [{"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]}]})";

}  // namespace

// --- general ---------------------------------------------------------------

TEST_F(CliTest, ListsPresets) {
  const auto r = call({"presets"});
  EXPECT_EQ(r.code, 0);
  for (const char* name : {"fig1", "fig2", "fig2-inset", "fig4", "cap-pyramid"})
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  const auto one = call({"presets", "fig4"});
  EXPECT_EQ(one.code, 0);
  EXPECT_NE(one.out.find("casimir-ideal"), std::string::npos);
  EXPECT_EQ(call({"presets", "nope"}).code, 2);
}

TEST_F(CliTest, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"sweep"}).code, 2);
  EXPECT_EQ(call({"sweep", "--preset", "nope"}).code, 2);
  EXPECT_EQ(call({"sweep", "--config", path("missing.json")}).code, 2);
  EXPECT_EQ(call({"sweep", "--config", write("bad.json", "{not json")}).code, 2);
  EXPECT_EQ(call({"--version"}).code, 0);
}

TEST_F(CliTest, ConfigErrorsNameTheField) {
  const auto r = call({"shape", "--config",
                       write("neg.json", R"({"curves": [{"name": "x", "layers": [{"type": "sphere", "R": -1}]}]})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("curves[0].layers[0].R"), std::string::npos) << r.err;

  const auto order = call({"shape", "--config", write("order.json", R"({"curves": [{"name": "x", "layers": [
      {"type": "sphere", "R": 1000}, {"type": "pyramid", "h": 1, "l": 2}, {"type": "dome", "h": 10, "l": 40}]}]})")});
  EXPECT_EQ(order.code, 2);
  EXPECT_NE(order.err.find("coarse"), std::string::npos) << order.err;

  const auto seps = call({"sweep", "--config", write("seps.json", R"({"separations": [3, 2],
      "curves": [{"name": "x", "layers": [{"type": "sphere", "R": 1000}]}]})")});
  EXPECT_EQ(seps.code, 2);
  EXPECT_NE(seps.err.find("separations"), std::string::npos) << seps.err;
}

// --- shape -----------------------------------------------------------------

TEST_F(CliTest, ShapeOfSphereIsStraightLine) {
  const auto r = call({"shape", "--config", write("s.json", sphere_config)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto all = lines_of(r.out);
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(all[0].rfind("# proxima 0.1.0 command=shape config={", 0), 0u) << all[0];
  const auto rows = rows_of(r.out);
  ASSERT_GT(rows.size(), 100u);
  for (const auto& row : rows) EXPECT_NEAR(row[1], 2 * std::numbers::pi * (50000 - row[0]), 1e-6 * 2 * std::numbers::pi * 50000);
}

TEST_F(CliTest, ShapeFig1WritesOneFilePerCurve) {
  const auto r = call({"shape", "--preset", "fig1", "--out", path("fig1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"smooth", "dome", "pyramid", "rough"}) EXPECT_TRUE(fs::exists(path(std::string("fig1_") + name + ".csv")));
  EXPECT_NE(r.out.find("case 2"), std::string::npos) << r.out;
  // Sphere ⊗ dome with h = R/10 follows its closed form for s ≤ h.
  const auto rows = rows_of(slurp(path("fig1_dome.csv")));
  const double R = 50000, h = 5000;
  for (const auto& row : rows) {
    const double s = row[0];
    if (s > h) break;
    const double exact = 2 * std::numbers::pi * s * (6 * h * R - 3 * h * s - 3 * R * s + s * s) / (3 * h * h);
    EXPECT_NEAR(row[1], exact, 1e-9 * (1 + exact)) << s;
  }
  // Rough sphere starts linearly from contact with the small slope
  // 2πR·f_R(0), f_R(0) = exp(-s0²/2σ²)/(σ√(2π)·𝒩).
  const auto rough = rows_of(slurp(path("fig1_rough.csv")));
  const double sigma = 1250, s0 = 2500;
  const double norm = 0.5 * std::erfc(-s0 / (sigma * std::numbers::sqrt2));
  const double fr0 = std::exp(-0.5 * s0 * s0 / (sigma * sigma)) / (sigma * std::sqrt(2 * std::numbers::pi) * norm);
  EXPECT_NEAR(rough[0][1], 0.0, 1e-9);
  EXPECT_NEAR(rough[1][1] / rough[1][0], 2 * std::numbers::pi * R * fr0, 0.1 * 2 * std::numbers::pi * R * fr0);
}

// --- sweep -----------------------------------------------------------------

TEST_F(CliTest, Fig2OrderingAndDoubling) {
  const auto r = call({"sweep", "--preset", "fig2", "--out", path("fig2.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, std::vector<std::vector<double>>> curves;
  for (const char* name : {"smooth", "dome", "rough-2sigma", "rough-3sigma", "pyramid"}) {
    const auto text = slurp(path(std::string("fig2_") + name + ".csv"));
    EXPECT_EQ(text.rfind("# proxima 0.1.0 command=sweep", 0), 0u);
    EXPECT_NE(text.find("d_nm,I_nW,corr_nW,ratio,farfield_ratio"), std::string::npos);
    curves[name] = rows_of(text);
    ASSERT_EQ(curves[name].front()[0], 1.0);
    EXPECT_EQ(curves[name].back()[1], 0.0);  // subtracted at 300 nm
  }
  EXPECT_GT(curves["smooth"][0][1], curves["dome"][0][1]);
  EXPECT_GT(curves["dome"][0][1], curves["rough-2sigma"][0][1]);
  EXPECT_GT(curves["rough-2sigma"][0][1], curves["pyramid"][0][1]);
  for (const char* rough : {"rough-2sigma", "rough-3sigma"}) {
    EXPECT_GE(curves[rough][0][4], 1.5) << rough;
    EXPECT_LE(curves[rough][0][4], 3.0) << rough;
  }
}

TEST_F(CliTest, SweepIsDeterministic) {
  ASSERT_EQ(call({"sweep", "--preset", "fig2", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(call({"sweep", "--preset", "fig2", "--out", path("b.csv")}).code, 0);
  for (const char* name : {"smooth", "dome", "rough-2sigma", "rough-3sigma", "pyramid"})
    EXPECT_EQ(slurp(path(std::string("a_") + name + ".csv")), slurp(path(std::string("b_") + name + ".csv"))) << name;
}

TEST_F(CliTest, SingleSeparationGivesOneRow) {
  const auto cfg = write("one.json", R"({"separations": [5], "subtract": false,
      "curves": [{"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]}]})");
  const auto r = call({"sweep", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 1u);
  const double alpha = 0.2558, R = 50000, d = 5;
  EXPECT_NEAR(rows[0][1], 2 * std::numbers::pi * alpha * (R / d - std::log1p(R / d)), 1e-8 * rows[0][1]);
}

TEST_F(CliTest, FlagsOverrideFile) {
  const auto cfg = write("dref.json", R"({"dref": 300, "separations": [10, 100, 300],
      "curves": [{"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]}]})");
  const auto r = call({"sweep", "--config", cfg, "--dref", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(lines_of(r.out)[0].find("\"dref\":100"), std::string::npos) << lines_of(r.out)[0];
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], 0.0);
  EXPECT_LT(rows[2][1], 0.0);
}

TEST_F(CliTest, PresetMergedWithFile) {
  const auto cfg = write("merge.json", R"({"separations": [1, 2, 3]})");
  const auto r = call({"sweep", "--preset", "fig4", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows_of(r.out).size(), 3u);
}

TEST_F(CliTest, GradientColumnsWhenLateralLengthsGiven) {
  const auto cfg = write("grad.json", R"({"separations": [1, 10, 100],
      "curves": [{"name": "dome", "layers": [{"type": "sphere", "R": 50000}, {"type": "dome", "h": 5000, "l": 20000}]}]})");
  const auto r = call({"sweep", "--config", cfg, "--beta", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d_nm,I_nW,corr_nW,ratio"), std::string::npos);
  EXPECT_EQ(rows_of(r.out)[0].size(), 4u);
}

// --- asympt ----------------------------------------------------------------

TEST_F(CliTest, AsymptoticExamplesPass) {
  const auto dome = write("dome.json", R"({"kernel": "heat-sio2", "curves": [
      {"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]},
      {"name": "sphere-dome", "layers": [{"type": "sphere", "R": 50000}, {"type": "dome", "h": 5000}]},
      {"name": "sphere-pyramid", "layers": [{"type": "sphere", "R": 50000}, {"type": "pyramid", "h": 5000}]}]})");
  const auto r = call({"asympt", "--config", dome});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("sphere,1,2,power-law,power-law,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sphere-dome,2,2,logarithmic,logarithmic,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sphere-pyramid,3,2,constant,constant,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(proxima::verification_csv_header), std::string::npos);

  const auto fig4 = call({"asympt", "--preset", "fig4", "--out", path("fig4.csv")});
  EXPECT_EQ(fig4.code, 0) << fig4.out << fig4.err;
  const auto csv = slurp(path("fig4.csv"));
  EXPECT_NE(csv.find("sphere-dome-pyramid,4,3,constant,constant,"), std::string::npos) << csv;
}

TEST_F(CliTest, VerificationFailureExitCode) {
  const auto cfg = write("tight.json", R"({"tolerance": 1e-9,
      "curves": [{"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]}]})");
  const auto r = call({"asympt", "--config", cfg});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, UnderdeterminedFitIsNumericError) {
  const auto cfg = write("sparse.json", R"({"separations": {"from": 1, "to": 300, "per_decade": 3},
      "curves": [{"name": "sphere", "layers": [{"type": "sphere", "R": 50000}]}]})");
  const auto r = call({"asympt", "--config", cfg});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("curve 'sphere'"), std::string::npos) << r.err;
}

// --- heightmap and synth ---------------------------------------------------

TEST_F(CliTest, PyramidTilingFileIsCaseTwo) {
  const auto cfg = write("pyr.json", R"({"surface": {"n": 512, "dx": 1.953125,
      "layers": [{"type": "pyramid", "h": 500, "l": 500}]}})");
  const auto synth = call({"synth", "--config", cfg, "--out", path("pyr.hm")});
  ASSERT_EQ(synth.code, 0) << synth.err;
  const auto r = call({"heightmap", path("pyr.hm"), "--bins", "64", "--out", path("pyr.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(path("pyr.csv"));
  EXPECT_EQ(comment_value(csv, "case"), "2") << csv.substr(0, 600);
  EXPECT_NE(csv.find("s_nm,f_nm,g_nm"), std::string::npos);
  // g/f is the squared face slope 4h²/l² = 4 wherever f > 0.
  for (const auto& row : rows_of(csv))
    if (row[1] > 0) {
      EXPECT_NEAR(row[2] / row[1], 4.0, 0.2) << row[0];
    }
}

TEST_F(CliTest, FlatFileIsDeltaNotice) {
  const auto hm = write("flat.hm", "# heightmap v1 nx=3 ny=3 dx=1 dy=1\n2 2 2\n2 2 2\n2 2 2\n");
  const auto r = call({"heightmap", hm});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("case=unclassifiable (delta"), std::string::npos) << r.out;
  EXPECT_EQ(rows_of(r.out).size(), 1u);
}

TEST_F(CliTest, SeededRoughFileFitsSigma) {
  const auto cfg = write("rough.json", R"({"surface": {"n": 512, "dx": 1,
      "layers": [{"type": "rough", "sigma": 10, "xi": 4}]}})");
  ASSERT_EQ(call({"synth", "--config", cfg, "--seed", "7", "--out", path("a.hm")}).code, 0);
  ASSERT_EQ(call({"synth", "--config", cfg, "--seed", "7", "--out", path("b.hm")}).code, 0);
  EXPECT_EQ(slurp(path("a.hm")), slurp(path("b.hm")));
  const auto r = call({"heightmap", path("a.hm"), "--bins", "128"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double sigma = std::stod(comment_value(r.out, "sigma_nm"));
  EXPECT_NEAR(sigma, 10.0, 1.5);
}

TEST_F(CliTest, HeaderlessFileNeedsSpacings) {
  const auto hm = write("plain.csv", "0,1,2\n0,1,2\n0,1,2\n");
  EXPECT_EQ(call({"heightmap", hm}).code, 2);
  const auto r = call({"heightmap", hm, "--dx", "2", "--dy", "2"});
  // Three distinct heights cannot fill the eight bins a Gaussian fit needs.
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("Gaussian fit"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedHeightmapIsParseError) {
  const auto hm = write("bad.hm", "# heightmap v1 nx=2 ny=2 dx=1 dy=1\n0 1\n2 inf\n");
  const auto r = call({"heightmap", hm});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SynthRejectsOversizedCap) {
  const auto cfg = write("cap.json", R"({"surface": {"n": 64, "dx": 2000, "cap_R": 50000}})");
  const auto r = call({"synth", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("sag"), std::string::npos) << r.err;
}
