#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <sogtrack/sogtrack.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("sogtrack_capi_") + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

constexpr const char* kSynthSpec = R"({
  "seed": 3, "frames": 3, "width": 80, "height": 60,
  "object": {"count": 120, "radius": 0.05},
  "camera": {"focal": 180.0, "distance": 0.5},
  "trajectory": {"translation_amplitude": 0.01}
})";

constexpr const char* kTrackConfig = R"({
  "window": {"size": 3, "iterations": 3},
  "object_sog": {"count": 60}
})";

}  // namespace

TEST_CASE("version and default config") {
  CHECK(std::strcmp(sogtrack_version(), "1.0.0") == 0);

  size_t required = 0;
  REQUIRE(sogtrack_default_config(nullptr, 0, &required) == SOGTRACK_OK);
  REQUIRE(required > 2);

  std::vector<char> buf(required);
  REQUIRE(sogtrack_default_config(buf.data(), buf.size(), &required) == SOGTRACK_OK);
  const Json j = Json::parse(buf.data());
  CHECK(j.at("object_sog").at("count").get<int>() == 2000);
  CHECK(j.at("weights").at("depth").get<double>() == 1000.0);
  CHECK(j.at("window").at("size").get<int>() == 8);

  char tiny[4];
  CHECK(sogtrack_default_config(tiny, sizeof(tiny), &required) == SOGTRACK_BUFFER_TOO_SMALL);
  CHECK(std::string(sogtrack_last_error()) == "output buffer too small");
}

TEST_CASE("null and range argument handling") {
  sogtrack_sequence* seq = nullptr;
  CHECK(sogtrack_sequence_open(nullptr, &seq) == SOGTRACK_INVALID_ARGUMENT);
  CHECK(sogtrack_sequence_open("x", nullptr) == SOGTRACK_INVALID_ARGUMENT);
  int n = 0;
  CHECK(sogtrack_sequence_frame_count(nullptr, &n) == SOGTRACK_INVALID_ARGUMENT);
  sogtrack_trajectory* traj = nullptr;
  CHECK(sogtrack_track(nullptr, nullptr, nullptr, &traj) == SOGTRACK_INVALID_ARGUMENT);
  CHECK(sogtrack_trajectory_open(nullptr, &traj) == SOGTRACK_INVALID_ARGUMENT);
  CHECK(sogtrack_synth(nullptr, nullptr, nullptr, 0) == SOGTRACK_INVALID_ARGUMENT);
  size_t count = 0;
  CHECK(sogtrack_keyframes(nullptr, 2, 1.0, "greedy", 0, nullptr, 0, &count) ==
        SOGTRACK_INVALID_ARGUMENT);
  CHECK(sogtrack_overlay(nullptr, nullptr, nullptr, "d") == SOGTRACK_INVALID_ARGUMENT);
  CHECK(std::string(sogtrack_last_error()) == "null argument");

  CHECK(sogtrack_trajectory_open("/nonexistent/t.json", &traj) == SOGTRACK_ERROR);
  CHECK(std::string(sogtrack_last_error()).find("cannot open file") != std::string::npos);
}

TEST_CASE("synthesize, track, save, evaluate, keyframes, overlay") {
  TempDir dir("full");
  const std::string scene_dir = dir.file("scene");

  char manifest[512] = {0};
  REQUIRE(sogtrack_synth(kSynthSpec, scene_dir.c_str(), manifest, sizeof(manifest)) ==
          SOGTRACK_OK);
  CHECK(fs::exists(manifest));

  sogtrack_sequence* seq = nullptr;
  REQUIRE(sogtrack_sequence_open(manifest, &seq) == SOGTRACK_OK);
  int frames = 0;
  REQUIRE(sogtrack_sequence_frame_count(seq, &frames) == SOGTRACK_OK);
  CHECK(frames == 3);

  const std::string diag_dir = dir.file("diag");
  sogtrack_trajectory* traj = nullptr;
  REQUIRE(sogtrack_track(seq, kTrackConfig, diag_dir.c_str(), &traj) == SOGTRACK_OK);
  int traj_frames = 0;
  REQUIRE(sogtrack_trajectory_frame_count(traj, &traj_frames) == SOGTRACK_OK);
  CHECK(traj_frames == 3);

  // Objective-trace CSV: header plus one row per iteration including start.
  REQUIRE(fs::exists(fs::path(diag_dir) / "window_0000.csv"));
  std::ifstream csv(fs::path(diag_dir) / "window_0000.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "iteration,total,energy,j2d,depth,sil,contact,smooth");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) rows += !line.empty();
  CHECK(rows == 4);

  double quat[4] = {0, 0, 0, 0}, trans[3] = {0, 0, 0}, scale = 0.0;
  REQUIRE(sogtrack_trajectory_object_pose(traj, 0, quat, trans, &scale) == SOGTRACK_OK);
  const double qn = quat[0] * quat[0] + quat[1] * quat[1] + quat[2] * quat[2] + quat[3] * quat[3];
  CHECK(qn == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(trans[2] > 0.3);
  CHECK(scale > 0.5);
  CHECK(sogtrack_trajectory_object_pose(traj, 99, quat, trans, &scale) ==
        SOGTRACK_INVALID_ARGUMENT);
  CHECK(std::string(sogtrack_last_error()) == "frame out of range");

  const std::string traj_path = dir.file("pred.json");
  REQUIRE(sogtrack_trajectory_save(traj, traj_path.c_str()) == SOGTRACK_OK);
  sogtrack_trajectory* reopened = nullptr;
  REQUIRE(sogtrack_trajectory_open(traj_path.c_str(), &reopened) == SOGTRACK_OK);
  double quat2[4], trans2[3], scale2;
  REQUIRE(sogtrack_trajectory_object_pose(reopened, 0, quat2, trans2, &scale2) == SOGTRACK_OK);
  for (int k = 0; k < 4; ++k) CHECK(quat2[k] == quat[k]);
  for (int k = 0; k < 3; ++k) CHECK(trans2[k] == trans[k]);
  CHECK(scale2 == scale);

  // Evaluating the ground truth against itself gives perfect scores.
  const std::string gt_path = (fs::path(scene_dir) / "gt_trajectory.json").string();
  sogtrack_trajectory* gt = nullptr;
  REQUIRE(sogtrack_trajectory_open(gt_path.c_str(), &gt) == SOGTRACK_OK);
  const std::string perfect = dir.file("perfect.json");
  REQUIRE(sogtrack_evaluate(seq, gt, gt_path.c_str(), perfect.c_str()) == SOGTRACK_OK);
  {
    std::ifstream in(perfect);
    const Json report = Json::parse(in);
    CHECK(report.at("success").get<bool>());
    CHECK(report.at("cd_cm").get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(report.at("f10_pct").get<double>() == doctest::Approx(100.0));
    CHECK(report.at("mpjpe_mm").get<double>() == doctest::Approx(0.0));
  }

  // Tracked-result report exists and parses.
  const std::string report_path = dir.file("report.json");
  REQUIRE(sogtrack_evaluate(seq, traj, gt_path.c_str(), report_path.c_str()) == SOGTRACK_OK);
  {
    std::ifstream in(report_path);
    const Json report = Json::parse(in);
    CHECK(report.contains("cd_cm"));
    CHECK(report.contains("conventions"));
  }

  // Keyframes over the synthesized feature file.
  const std::string features = (fs::path(scene_dir) / "features.json").string();
  int indices[8] = {0};
  size_t count = 0;
  REQUIRE(sogtrack_keyframes(features.c_str(), 2, 1.0, "greedy", 0, indices, 8, &count) ==
          SOGTRACK_OK);
  REQUIRE(count == 2);
  CHECK(indices[0] >= 0);
  CHECK(indices[0] < indices[1]);
  CHECK(indices[1] < 3);

  int brute[8] = {0};
  REQUIRE(sogtrack_keyframes(features.c_str(), 2, 1.0, "brute", 0, brute, 8, &count) ==
          SOGTRACK_OK);
  CHECK(count == 2);

  int rnd_a[8], rnd_b[8];
  REQUIRE(sogtrack_keyframes(features.c_str(), 2, 1.0, "random", 11, rnd_a, 8, &count) ==
          SOGTRACK_OK);
  REQUIRE(sogtrack_keyframes(features.c_str(), 2, 1.0, "random", 11, rnd_b, 8, &count) ==
          SOGTRACK_OK);
  CHECK(rnd_a[0] == rnd_b[0]);
  CHECK(rnd_a[1] == rnd_b[1]);

  int small[1];
  CHECK(sogtrack_keyframes(features.c_str(), 2, 1.0, "greedy", 0, small, 1, &count) ==
        SOGTRACK_BUFFER_TOO_SMALL);
  CHECK(sogtrack_keyframes(features.c_str(), 2, 1.0, "swizzle", 0, indices, 8, &count) ==
        SOGTRACK_ERROR);
  CHECK(std::string(sogtrack_last_error()) == "unknown keyframe mode");

  // Overlay renders one image per frame.
  const std::string overlay_dir = dir.file("overlay");
  REQUIRE(sogtrack_overlay(seq, gt, nullptr, overlay_dir.c_str()) == SOGTRACK_OK);
  int overlays = 0;
  for (const auto& e : fs::directory_iterator(overlay_dir))
    overlays += e.path().extension() == ".png";
  CHECK(overlays == 3);

  sogtrack_trajectory_close(gt);
  sogtrack_trajectory_close(reopened);
  sogtrack_trajectory_close(traj);
  sogtrack_sequence_close(seq);
}
