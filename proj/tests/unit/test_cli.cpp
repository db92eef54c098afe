#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gprd/nn/checkpoint.hpp"
#include "gprd/radargram.hpp"
#include "gprd_cli/cli.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace gprd;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("gprd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }
  std::string path(const std::string& rel) const { return (root_ / rel).string(); }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::vector<std::string> lines;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_F(Cli, SimulateIsDeterministicAndDefaultSized) {
  ASSERT_EQ(run({"simulate", "--count", "3", "--seed", "7", "--out", path("a")}), 0) << err_.str();
  ASSERT_EQ(run({"simulate", "--count", "3", "--seed", "7", "--out", path("b")}), 0) << err_.str();
  std::size_t scans = 0;
  for (const auto& e : fs::directory_iterator(root_ / "a")) {
    if (e.path().extension() != ".gprb") continue;
    ++scans;
    EXPECT_EQ(slurp(e.path()), slurp(root_ / "b" / e.path().filename())) << e.path();
    const auto r = read_radargram(e.path());
    EXPECT_EQ(r.height(), 256u);
    EXPECT_EQ(r.width(), 64u);
  }
  EXPECT_EQ(scans, 6u);
  EXPECT_TRUE(fs::exists(root_ / "a" / "manifest.json"));
}

TEST_F(Cli, SimulateManifestRecordsTargets) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--surface", "rough", "--targets", "3", "--size", "64x32",
                 "--out", path("d")}),
            0)
      << err_.str();
  const auto manifest = slurp(root_ / "d" / "manifest.json");
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = manifest.find("\"target_count\": 3", pos)) != std::string::npos; ++pos) ++count;
  EXPECT_EQ(count, 2u) << manifest;
}

TEST_F(Cli, SimulateRejectsBadArguments) {
  EXPECT_EQ(run({"simulate", "--targets", "5", "--out", path("d")}), 2);
  EXPECT_EQ(run({"simulate", "--size", "abc", "--out", path("d")}), 2);
  EXPECT_EQ(run({"simulate", "--surface", "lava", "--out", path("d")}), 2);
  EXPECT_NE(run({"simulate"}), 0);
  EXPECT_NE(run({"frobnicate"}), 0);
}

TEST_F(Cli, SvdRemovesRankOneClutter) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--surface", "flat", "--targets", "0", "--soil", "dry_sand",
                 "--out", path("sim")}),
            0)
      << err_.str();
  ASSERT_EQ(run({"declutter", "--input", path("sim"), "--method", "svd", "--k", "1", "--out", path("svd")}), 0)
      << err_.str();
  for (const char* name : {"scene_0000", "scene_0001"}) {
    const auto raw = read_radargram(root_ / "sim" / (std::string(name) + "_raw.gprb"));
    const auto out = read_radargram(root_ / "svd" / (std::string(name) + ".gprb"));
    EXPECT_LE(std::pow(test::frobenius(out), 2), 0.01 * std::pow(test::frobenius(raw), 2)) << name;
  }
}

TEST_F(Cli, DeclutterReportsParametersAndMetrics) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--size", "64x32", "--out", path("sim")}), 0) << err_.str();
  ASSERT_EQ(run({"declutter", "--input", path("sim"), "--method", "rpca", "--lambda", "0.03", "--out",
                 path("rpca")}),
            0)
      << err_.str();
  EXPECT_NE(slurp(root_ / "rpca" / "report.txt").find("lambda=0.03\n"), std::string::npos);
  const auto lines = csv_lines(root_ / "rpca" / "metrics.csv");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(split(lines[3])[0], "MEAN");
  ASSERT_EQ(run({"declutter", "--input", path("sim/scene_0000_raw.gprb"), "--method", "meansub", "--window",
                 "1:10", "--out", path("ms")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(root_ / "ms" / "scene_0000.gprb"));
  EXPECT_NE(slurp(root_ / "ms" / "report.txt").find("window=1:10"), std::string::npos);
}

TEST_F(Cli, DeclutterUsageErrors) {
  ASSERT_EQ(run({"simulate", "--count", "1", "--size", "64x32", "--out", path("sim")}), 0);
  EXPECT_EQ(run({"declutter", "--input", path("sim"), "--method", "crnet", "--out", path("o")}), 2);
  EXPECT_EQ(run({"declutter", "--input", path("sim"), "--method", "magic", "--out", path("o")}), 2);
  EXPECT_EQ(run({"declutter", "--input", path("sim"), "--method", "svd", "--k", "0", "--out", path("o")}), 2);
  EXPECT_EQ(run({"declutter", "--input", path("nope"), "--method", "svd", "--out", path("o")}), 2);
  EXPECT_NE(err_.str().find(path("nope")), std::string::npos) << err_.str();
}

TEST_F(Cli, HybridizePairsClutterWithCleanScans) {
  ASSERT_EQ(run({"simulate", "--count", "3", "--size", "64x32", "--emit-clutter", "--out", path("sim")}), 0)
      << err_.str();
  ASSERT_EQ(run({"hybridize", "--clutter", path("sim"), "--clean", path("sim"), "--per-clutter", "2",
                 "--size", "64x32", "--out", path("hyb")}),
            0)
      << err_.str();
  std::size_t raws = 0;
  for (const auto& e : fs::directory_iterator(root_ / "hyb")) raws += e.path().string().ends_with("_raw.gprb");
  EXPECT_EQ(raws, 6u);
  EXPECT_EQ(run({"hybridize", "--clutter", path("sim"), "--clean", path("sim"), "--mix", "1.5", "--out",
                 path("bad")}),
            2);
}

TEST_F(Cli, TrainWritesCheckpointAndHistory) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--size", "32x32", "--out", path("sim")}), 0) << err_.str();
  ASSERT_EQ(run({"train", "--data", path("sim"), "--epochs", "2", "--batch", "2", "--lr", "1e-3",
                 "--base-width", "4", "--seed", "1", "--out", path("model")}),
            0)
      << err_.str();
  const auto history = csv_lines(root_ / "model" / "loss_history.csv");
  ASSERT_EQ(history.size(), 3u);
  EXPECT_EQ(history[0], "epoch,lr,steps,loss,mae,ms_ssim");
  const auto model = nn::load_checkpoint(root_ / "model" / "model.crn");
  EXPECT_EQ(model.config().base_width, 4u);
  ASSERT_EQ(run({"declutter", "--input", path("sim"), "--method", "crnet", "--checkpoint",
                 path("model/model.crn"), "--out", path("crnet")}),
            0)
      << err_.str();
  EXPECT_EQ(read_radargram(root_ / "crnet" / "scene_0000.gprb").height(), 32u);
  EXPECT_EQ(run({"train", "--data", path("sim"), "--size", "30x30", "--out", path("m2")}), 2);
}

TEST_F(Cli, EvaluateReportAndHeatmaps) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--size", "64x32", "--out", path("sim")}), 0) << err_.str();
  // A "method" whose outputs are the ground truth itself.
  fs::create_directories(root_ / "oracle");
  for (const char* name : {"scene_0000", "scene_0001"}) {
    fs::copy_file(root_ / "sim" / (std::string(name) + "_gt.gprb"), root_ / "oracle" / (std::string(name) + ".gprb"));
  }
  ASSERT_EQ(run({"declutter", "--input", path("sim"), "--method", "svd", "--out", path("svd")}), 0);
  ASSERT_EQ(run({"evaluate", "--data", path("sim"), "--processed", "svd=" + path("svd"), "--processed",
                 path("oracle"), "--out", path("eval")}),
            0)
      << err_.str();
  const auto lines = csv_lines(root_ / "eval" / "report.csv");
  ASSERT_EQ(lines.size(), 1u + 4u + 2u);
  EXPECT_EQ(lines[0], "scan,method,MAE,MSE,PSNR,MS_SSIM,SCR_raw,SCR_proc,Im_dB");
  EXPECT_EQ(split(lines[5])[1], "oracle");
  EXPECT_EQ(split(lines[6])[1], "svd");
  for (const auto& line : lines) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 9u);
    if (cells[1] == "oracle") {
      EXPECT_EQ(std::stod(cells[2]), 0.0);
      EXPECT_NEAR(std::stod(cells[5]), 1.0, 1e-9);
    }
  }
  EXPECT_TRUE(fs::exists(root_ / "eval" / "heatmaps" / "scene_0000_raw.pgm"));
  EXPECT_TRUE(fs::exists(root_ / "eval" / "heatmaps" / "scene_0001_svd.pgm"));
  EXPECT_EQ(run({"evaluate", "--data", path("sim"), "--processed", path("oracle"), "--no-heatmaps", "--out",
                 path("eval2")}),
            0);
  EXPECT_FALSE(fs::exists(root_ / "eval2" / "heatmaps"));
}

TEST_F(Cli, EvaluateRejectsMismatchedCounts) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--size", "64x32", "--out", path("sim")}), 0);
  fs::remove(root_ / "sim" / "scene_0001_gt.gprb");
  EXPECT_EQ(run({"evaluate", "--data", path("sim"), "--processed", path("sim"), "--out", path("e")}), 2);
}

TEST_F(Cli, ReplayReproducesOutputs) {
  ASSERT_EQ(run({"simulate", "--count", "2", "--seed", "4", "--size", "64x32", "--out", path("sim")}), 0);
  ASSERT_EQ(run({"declutter", "--input", path("sim"), "--method", "rpca", "--out", path("rpca")}), 0);
  ASSERT_EQ(run({"replay", path("sim/manifest.json"), "--out", path("sim2")}), 0) << err_.str();
  ASSERT_EQ(run({"replay", path("rpca/manifest.json"), "--out", path("rpca2")}), 0) << err_.str();
  for (const char* f : {"sim/scene_0000_raw.gprb", "sim/scene_0001_gt.gprb", "rpca/scene_0000.gprb"}) {
    const std::string rel(f);
    const auto copy = root_ / (rel.substr(0, rel.find('/')) + "2") / rel.substr(rel.find('/') + 1);
    EXPECT_EQ(slurp(root_ / rel), slurp(copy)) << f;
  }
}

TEST(Heatmap, QuantizationRule) {
  const Radargram r(1, 5, {-1.0, 0.0, 0.5, 1.0, 1.0 + 1.0 / 255.0 * 2.0});
  const auto px = cli::heatmap_pixels(r);
  const auto norm = normalize_unit(r);
  ASSERT_EQ(px.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(px[i], std::lround(255.0 * norm.data()[i]));
  EXPECT_EQ(px.front(), 0);
  EXPECT_EQ(px.back(), 255);
  const auto path = fs::temp_directory_path() / "gprd_heatmap_test.pgm";
  cli::write_heatmap(path, r);
  const auto bytes = slurp(path);
  EXPECT_EQ(bytes.substr(0, 11), "P5\n5 1\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 5u);
  fs::remove(path);
}
