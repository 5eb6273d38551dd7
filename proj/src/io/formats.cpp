#include "io/formats.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "io/raw_io.hpp"
#include "metrics/metrics.hpp"

namespace sogtrack {

namespace {

Json require(const Json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key)) throw std::runtime_error(what + " missing field: " + key);
  return j.at(key);
}

Vec3 to_vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Vec4 to_vec4(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw std::runtime_error("expected 4-vector");
  return Vec4(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

Json from_vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json from_vec4(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

Json pose_json(const Pose& p) {
  return Json{{"rotation", from_vec4(p.rotation)}, {"translation", from_vec3(p.translation)}};
}

Pose pose_from_json(const Json& j, double scale) {
  Pose p;
  p.rotation = to_vec4(require(j, "rotation", "pose"));
  p.translation = to_vec3(require(j, "translation", "pose"));
  p.scale = scale;
  return p;
}

std::string resolve(const std::filesystem::path& base, const std::string& rel) {
  if (rel.empty()) return rel;
  const std::filesystem::path p(rel);
  return p.is_absolute() ? p.string() : (base / p).string();
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  Json j;
  in >> j;
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

std::vector<Camera> read_cameras(const std::string& path) {
  const Json j = load_json(path);
  std::vector<Camera> cams;
  for (const Json& f : require(j, "frames", "camera file")) {
    Camera cam;
    const Json k = require(f, "intrinsics", "camera frame");
    const Json e = require(f, "extrinsics", "camera frame");
    if (k.size() != 9 || e.size() != 16) throw std::runtime_error("camera matrix size mismatch");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cam.intrinsics(r, c) = k[3 * r + c].get<double>();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) cam.extrinsics(r, c) = e[4 * r + c].get<double>();
    cam.width = require(f, "width", "camera frame").get<int>();
    cam.height = require(f, "height", "camera frame").get<int>();
    cams.push_back(cam);
  }
  return cams;
}

void write_cameras(const std::string& path, const std::vector<Camera>& cams) {
  Json frames = Json::array();
  for (const Camera& cam : cams) {
    Json k = Json::array(), e = Json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) k.push_back(cam.intrinsics(r, c));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) e.push_back(cam.extrinsics(r, c));
    frames.push_back(Json{{"intrinsics", k},
                          {"extrinsics", e},
                          {"width", cam.width},
                          {"height", cam.height}});
  }
  save_json(path, Json{{"frames", frames}});
}

HandTrack read_hand(const std::string& path) {
  const Json j = load_json(path);
  HandTrack hand;
  hand.scale = j.value("scale", 1.0);
  if (j.contains("contact_vertex_indices"))
    hand.contact_vertex_indices = j.at("contact_vertex_indices").get<std::vector<int>>();
  for (const Json& f : require(j, "frames", "hand file")) {
    HandFrame frame;
    for (const Json& p : require(f, "local_joints", "hand frame")) frame.local_joints.push_back(to_vec3(p));
    if (f.contains("local_vertices"))
      for (const Json& p : f.at("local_vertices")) frame.local_vertices.push_back(to_vec3(p));
    for (const Json& p : require(f, "joints_2d", "hand frame"))
      frame.detected_joints_2d.push_back(to_vec3(p));
    frame.contact_flag = f.value("contact", false);
    hand.frames.push_back(std::move(frame));
    hand.poses.push_back(pose_from_json(f, hand.scale));
  }
  return hand;
}

void write_hand(const std::string& path, const HandTrack& hand) {
  Json frames = Json::array();
  for (size_t t = 0; t < hand.frames.size(); ++t) {
    const HandFrame& f = hand.frames[t];
    Json jf = pose_json(hand.poses[t]);
    Json joints = Json::array(), j2d = Json::array();
    for (const Vec3& p : f.local_joints) joints.push_back(from_vec3(p));
    for (const Vec3& p : f.detected_joints_2d) j2d.push_back(from_vec3(p));
    jf["local_joints"] = joints;
    jf["joints_2d"] = j2d;
    if (!f.local_vertices.empty()) {
      Json verts = Json::array();
      for (const Vec3& p : f.local_vertices) verts.push_back(from_vec3(p));
      jf["local_vertices"] = verts;
    }
    jf["contact"] = f.contact_flag;
    frames.push_back(std::move(jf));
  }
  Json j{{"scale", hand.scale}, {"frames", frames}};
  if (!hand.contact_vertex_indices.empty())
    j["contact_vertex_indices"] = hand.contact_vertex_indices;
  save_json(path, j);
}

TrajectoryData read_trajectory(const std::string& path) {
  const Json j = load_json(path);
  TrajectoryData traj;
  traj.object_scale = require(j, "object_scale", "trajectory").get<double>();
  traj.hand_scale = require(j, "hand_scale", "trajectory").get<double>();
  for (const Json& f : require(j, "frames", "trajectory")) {
    traj.object.push_back(pose_from_json(require(f, "object", "trajectory frame"), traj.object_scale));
    traj.hand.push_back(pose_from_json(require(f, "hand", "trajectory frame"), traj.hand_scale));
    traj.contact.push_back(f.value("contact", false) ? 1 : 0);
    traj.failed.push_back(f.value("failed", false) ? 1 : 0);
  }
  if (j.contains("diagnostics")) traj.diagnostics = j.at("diagnostics");
  return traj;
}

void write_trajectory(const std::string& path, const TrajectoryData& traj) {
  Json frames = Json::array();
  for (int t = 0; t < traj.frame_count(); ++t) {
    Json f{{"object", pose_json(traj.object[t])}, {"hand", pose_json(traj.hand[t])}};
    f["contact"] = traj.contact.empty() ? false : traj.contact[t] != 0;
    if (!traj.failed.empty() && traj.failed[t] != 0) f["failed"] = true;
    frames.push_back(std::move(f));
  }
  Json j{{"frame_count", traj.frame_count()},
         {"object_scale", traj.object_scale},
         {"hand_scale", traj.hand_scale},
         {"frames", frames}};
  if (!traj.diagnostics.empty()) j["diagnostics"] = traj.diagnostics;
  save_json(path, j);
}

SequenceManifest read_manifest(const std::string& path) {
  const Json j = load_json(path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  SequenceManifest m;
  m.frame_count = require(j, "frame_count", "manifest").get<int>();
  m.width = require(j, "width", "manifest").get<int>();
  m.height = require(j, "height", "manifest").get<int>();
  m.fps = j.value("fps", 30.0);
  m.seed = j.value("seed", std::uint64_t{0});
  for (const Json& p : require(j, "images", "manifest")) m.images.push_back(resolve(base, p));
  for (const Json& p : require(j, "object_masks", "manifest"))
    m.object_masks.push_back(resolve(base, p));
  for (const Json& p : require(j, "hand_masks", "manifest")) m.hand_masks.push_back(resolve(base, p));
  for (const Json& p : require(j, "pointmaps", "manifest")) m.pointmaps.push_back(resolve(base, p));
  m.cameras = resolve(base, require(j, "cameras", "manifest").get<std::string>());
  m.hand = resolve(base, require(j, "hand", "manifest").get<std::string>());
  m.asset = resolve(base, require(j, "asset", "manifest").get<std::string>());
  m.features = resolve(base, j.value("features", std::string()));
  m.initial_trajectory = resolve(base, j.value("initial_trajectory", std::string()));
  return m;
}

void write_manifest(const std::string& path, const SequenceManifest& m) {
  Json j{{"frame_count", m.frame_count}, {"width", m.width},   {"height", m.height},
         {"fps", m.fps},                 {"seed", m.seed},     {"images", m.images},
         {"object_masks", m.object_masks}, {"hand_masks", m.hand_masks},
         {"pointmaps", m.pointmaps},     {"cameras", m.cameras}, {"hand", m.hand},
         {"asset", m.asset}};
  if (!m.features.empty()) j["features"] = m.features;
  if (!m.initial_trajectory.empty()) j["initial_trajectory"] = m.initial_trajectory;
  save_json(path, j);
}

FeatureFile read_features(const std::string& path) {
  const Json j = load_json(path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  const int count = require(j, "count", "feature file").get<int>();
  const int dim = require(j, "dim", "feature file").get<int>();
  const std::string data = resolve(base, require(j, "data", "feature file").get<std::string>());
  FeatureFile out;
  out.features.descriptors = read_matrix_raw(data, count, dim);
  if (j.contains("frames"))
    out.frame_indices = j.at("frames").get<std::vector<int>>();
  else
    for (int i = 0; i < count; ++i) out.frame_indices.push_back(i);
  return out;
}

void write_features(const std::string& path, const std::string& data_path,
                    const Eigen::MatrixXd& descriptors, const std::vector<int>& frame_indices) {
  write_matrix_raw(data_path, descriptors);
  Json j{{"count", static_cast<int>(descriptors.rows())},
         {"dim", static_cast<int>(descriptors.cols())},
         {"data", std::filesystem::path(data_path).filename().string()}};
  if (!frame_indices.empty()) j["frames"] = frame_indices;
  save_json(path, j);
}

Json metric_report_json(const MetricReport& report) {
  return Json{{"cd_cm", report.cd_cm},
              {"f10_pct", report.f10_pct},
              {"mpjpe_mm", report.mpjpe_mm},
              {"cd_h_cm", report.cd_h_cm},
              {"acc_h", report.acc_h},
              {"acc_o", report.acc_o},
              {"mrrpe_mm", report.mrrpe_mm},
              {"success", report.success},
              {"conventions",
               Json{{"chamfer", "unsquared L2 mean, symmetric"},
                    {"fscore_threshold_m", kFScoreThresholdM},
                    {"icp", "similarity (rotation + translation + uniform scale)"},
                    {"object_root", "point centroid"},
                    {"hand_root", "joint 0"}}}};
}

void write_metric_report(const std::string& path, const MetricReport& report) {
  save_json(path, metric_report_json(report));
}

}  // namespace sogtrack
