#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fusetrack/cli.hpp"
#include "fusetrack/config.hpp"
#include "fusetrack/io.hpp"
#include "fusetrack/metrics.hpp"

namespace fusetrack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fusetrack_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "fusetrack");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) { return read_text_file(p); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

constexpr const char* kSmallConfig = R"({
  "scenario": {"n_objects": 4, "n_frames": 12, "sigma_pos": 0.2, "sigma_vel": 0.2,
               "sigma_embed": 0.1, "sigma_score": 0.2, "p_miss": 0.1, "clutter_rate": 1,
               "embedding_dim": 16, "radar_points_per_object": 3},
  "n_scenes": 3
})";

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({"track"}), cli::kExitUsage);  // --detections is required
  EXPECT_EQ(run({"simulate", "--jobs", "0"}), cli::kExitUsage);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(CliTest, MissingInputFileIsUsageError) {
  EXPECT_EQ(run({"track", "--detections", (dir_ / "nope.jsonl").string(), "--out",
                 dir_.string()}),
            cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--gt", (dir_ / "a.jsonl").string(), "--pred",
                 (dir_ / "b.jsonl").string(), "--out", dir_.string()}),
            cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "missing.json").string()}), cli::kExitUsage);
}

TEST_F(CliTest, BadConfigIsUsageError) {
  const auto cfg = write_config("bad.json", R"({"tracker": {"max_age": -1}})");
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--out", dir_.string()}), cli::kExitUsage);
  EXPECT_NE(err_.str().find("max_age"), std::string::npos);
  const auto typo = write_config("typo.json", R"({"scenrio": {}})");
  EXPECT_EQ(run({"simulate", "--config", typo.string(), "--out", dir_.string()}), cli::kExitUsage);
}

TEST_F(CliTest, MalformedDataIsRuntimeError) {
  std::ofstream(dir_ / "broken.jsonl") << "{\"frame_idx\": 0, \"dt\": 0.5, \"detections\": [{}]}\n";
  EXPECT_EQ(run({"track", "--detections", (dir_ / "broken.jsonl").string(), "--out",
                 dir_.string()}),
            cli::kExitRuntime);
}

TEST_F(CliTest, SimulateWritesBundleWithStableHash) {
  const auto cfg_path = write_config("small.json", kSmallConfig);
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--out", a.string()}), cli::kExitOk);
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--out", b.string()}), cli::kExitOk);
  for (const char* f : {"gt.jsonl", "detections.jsonl", "radar.jsonl", "manifest.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const json manifest = json::parse(slurp(a / "manifest.json"));
  RunConfig expected = parse_run_config(kSmallConfig);
  EXPECT_EQ(manifest["config_hash"], config_hash(expected));

  const fs::path c = dir_ / "c";
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--seed", "7", "--out", c.string()}),
            cli::kExitOk);
  const json other = json::parse(slurp(c / "manifest.json"));
  EXPECT_NE(other["config_hash"], manifest["config_hash"]);
  EXPECT_NE(slurp(c / "detections.jsonl"), slurp(a / "detections.jsonl"));
}

TEST_F(CliTest, EvalMatchesLibraryExactly) {
  const auto cfg_path = write_config("small.json", kSmallConfig);
  const std::string d = dir_.string();
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--out", d}), cli::kExitOk);
  ASSERT_EQ(run({"track", "--config", cfg_path.string(), "--detections", d + "/detections.jsonl",
                 "--out", d}),
            cli::kExitOk);
  ASSERT_EQ(run({"eval", "--gt", d + "/gt.jsonl", "--pred", d + "/tracks.jsonl", "--out", d}),
            cli::kExitOk);

  std::istringstream gt_in(slurp(dir_ / "gt.jsonl"));
  std::istringstream pred_in(slurp(dir_ / "tracks.jsonl"));
  const EvalResult lib =
      evaluate(read_track_log_jsonl(gt_in), read_track_log_jsonl(pred_in), EvalConfig{});
  const json cli_json = json::parse(slurp(dir_ / "metrics.json"));
  EXPECT_EQ(cli_json, json::parse(to_json(lib).dump()));
  EXPECT_EQ(cli_json["amota"].get<double>(), lib.amota);
  EXPECT_TRUE(fs::exists(dir_ / "per_recall.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "motar_curve.csv"));
}

TEST_F(CliTest, PerfectLogScoresOne) {
  const auto cfg_path = write_config("small.json", kSmallConfig);
  const std::string d = dir_.string();
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--out", d}), cli::kExitOk);
  ASSERT_EQ(run({"eval", "--gt", d + "/gt.jsonl", "--pred", d + "/gt.jsonl", "--out", d}),
            cli::kExitOk);
  const json m = json::parse(slurp(dir_ / "metrics.json"));
  EXPECT_EQ(m["amota"].get<double>(), 1.0);
  EXPECT_EQ(m["ids"].get<int>(), 0);
}

TEST_F(CliTest, RunIsIndependentOfJobCount) {
  const auto cfg_path = write_config("small.json", kSmallConfig);
  const fs::path a = dir_ / "j1";
  const fs::path b = dir_ / "j4";
  ASSERT_EQ(run({"run", "--config", cfg_path.string(), "--jobs", "1", "--out", a.string()}),
            cli::kExitOk);
  ASSERT_EQ(run({"run", "--config", cfg_path.string(), "--jobs", "4", "--out", b.string()}),
            cli::kExitOk);
  for (const char* f : {"gt.jsonl", "detections.jsonl", "tracks.jsonl", "metrics.json",
                        "per_recall.csv", "motar_curve.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(CliTest, PillarizeWritesSparseCells) {
  const auto cfg_path = write_config("small.json", kSmallConfig);
  const std::string d = dir_.string();
  ASSERT_EQ(run({"simulate", "--config", cfg_path.string(), "--out", d}), cli::kExitOk);
  ASSERT_EQ(run({"pillarize", "--radar", d + "/radar.jsonl", "--out", d}), cli::kExitOk);
  std::ifstream in(dir_ / "pillars.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    EXPECT_EQ(j["head_input_channels"].get<int>(), 274);
    EXPECT_GT(j["points"].get<int>(), 0);
    ++lines;
  }
  EXPECT_EQ(lines, 3 * 12);

  const auto voxel = write_config("voxel.json", R"({"fusion": {"variant": "voxel"}})");
  EXPECT_EQ(run({"pillarize", "--config", voxel.string(), "--radar", d + "/radar.jsonl", "--out",
                 d}),
            cli::kExitUsage);
}

TEST_F(CliTest, AblateWritesCsv) {
  const auto cfg_path = write_config("abl.json", R"({
    "scenario": {"n_objects": 3, "n_frames": 8, "embedding_dim": 8, "radar_points_per_object": 0},
    "experiment": "ablate_threshold", "n_seeds": 2})");
  ASSERT_EQ(run({"ablate", "--config", cfg_path.string(), "--out", dir_.string()}), cli::kExitOk);
  const std::string csv = slurp(dir_ / "ablation.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')).substr(0, 15), "experiment,cell");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(ExampleConfigs, AllParse) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(FUSETRACK_EXAMPLE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_run_config(read_text_file(entry.path()))) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 4);
}

}  // namespace
}  // namespace fusetrack
