#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "keyframes/keyframes.hpp"
#include "priors/priors.hpp"

namespace sogtrack {

using Json = nlohmann::json;

// Per-frame pinhole cameras: intrinsics row-major 3x3, extrinsics row-major
// 4x4 world-to-camera.
std::vector<Camera> read_cameras(const std::string& path);
void write_cameras(const std::string& path, const std::vector<Camera>& cams);

// Hand track: per-frame local geometry, 2D detections, rigid pose, contact
// flag; one global scale; optional contact vertex indices.
struct HandTrack {
  double scale = 1.0;
  std::vector<int> contact_vertex_indices;
  std::vector<HandFrame> frames;
  std::vector<Pose> poses;  // rotation/translation per frame, shared scale
};
HandTrack read_hand(const std::string& path);
void write_hand(const std::string& path, const HandTrack& hand);

// Tracked sequence result: per-frame rigid poses for object and hand with one
// global scale each, contact flags, failure markers and free-form diagnostics.
struct TrajectoryData {
  double object_scale = 1.0;
  double hand_scale = 1.0;
  std::vector<Pose> object;  // scale field mirrors object_scale
  std::vector<Pose> hand;
  std::vector<std::uint8_t> contact;
  std::vector<std::uint8_t> failed;
  Json diagnostics = Json::object();

  int frame_count() const { return static_cast<int>(object.size()); }
};
TrajectoryData read_trajectory(const std::string& path);
void write_trajectory(const std::string& path, const TrajectoryData& traj);

// Top-level sequence description; all paths resolved against the manifest
// directory on read.
struct SequenceManifest {
  int frame_count = 0;
  int width = 0;
  int height = 0;
  double fps = 30.0;
  std::uint64_t seed = 0;
  std::vector<std::string> images;
  std::vector<std::string> object_masks;
  std::vector<std::string> hand_masks;
  std::vector<std::string> pointmaps;
  std::string cameras;
  std::string hand;
  std::string asset;
  std::string features;            // optional, empty when absent
  std::string initial_trajectory;  // optional, empty when absent
};
SequenceManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const SequenceManifest& manifest);

// Feature file: JSON manifest next to raw float32 N x d data.
struct FeatureFile {
  FrameFeatures features;
  std::vector<int> frame_indices;
};
FeatureFile read_features(const std::string& path);
void write_features(const std::string& path, const std::string& data_path,
                    const Eigen::MatrixXd& descriptors, const std::vector<int>& frame_indices);

struct MetricReport {
  double cd_cm = 0.0;
  double f10_pct = 0.0;
  double mpjpe_mm = 0.0;
  double cd_h_cm = 0.0;
  double acc_h = 0.0;
  double acc_o = 0.0;
  double mrrpe_mm = 0.0;
  bool success = true;
};
Json metric_report_json(const MetricReport& report);
void write_metric_report(const std::string& path, const MetricReport& report);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

}  // namespace sogtrack
