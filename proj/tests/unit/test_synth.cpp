#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "core/geometry.hpp"
#include "io/png_io.hpp"
#include "pipeline/synth.hpp"

using namespace sogtrack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("sogtrack_synth_") + tag + "_" + std::to_string(std::random_device{}()));
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

SynthSpec small_spec() {
  SynthSpec spec;
  spec.seed = 7;
  spec.frames = 4;
  spec.width = 96;
  spec.height = 72;
  spec.object.count = 150;
  spec.object.radius = 0.05;
  spec.camera.focal = 200.0;
  spec.camera.distance = 0.5;
  spec.trajectory.translation_amplitude = 0.01;
  return spec;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("synthetic sequence loads and is self-consistent") {
  TempDir dir("load");
  const SynthSpec spec = small_spec();
  const SynthResult res = synth_scene(spec, dir.str());
  const Sequence seq = load_sequence(res.manifest_path);

  CHECK(seq.frame_count() == 4);
  CHECK(seq.manifest.width == 96);
  CHECK(seq.manifest.height == 72);
  CHECK(seq.manifest.seed == 7);
  CHECK(seq.images.size() == 4);
  CHECK(seq.cameras.size() == 4);
  CHECK(seq.hand.frames.size() == 4);
  CHECK(seq.asset.centers.size() >= 100);  // relief grid plus low-opacity decoys
  REQUIRE(seq.initial.has_value());
  CHECK(seq.initial->frame_count() == 4);

  const TrajectoryData gt = read_trajectory(res.gt_path);
  REQUIRE(gt.frame_count() == 4);
  CHECK(gt.diagnostics.at("occlusion_fraction").size() == 4);
  CHECK(gt.diagnostics.at("object_diameter").get<double>() == doctest::Approx(0.1));

  for (int t = 0; t < 4; ++t) {
    CHECK_FALSE(seq.object_masks[t].empty_mask());
    CHECK(seq.hand_masks[t].empty_mask());  // no occluder requested
    CHECK(res.occlusion_fraction[t] == 0.0);
    CHECK(seq.hand.frames[t].local_joints.size() == 21);
    CHECK(seq.hand.frames[t].detected_joints_2d.size() == 21);

    // Valid pointmap pixels sit exactly on rendered content and carry depths
    // inside the object's camera-space slab.
    const Pointmap& pm = seq.pointmaps[t];
    const double z_gt = gt.object[t].translation.z();
    int valid = 0;
    for (int r = 0; r < pm.height; ++r) {
      for (int c = 0; c < pm.width; ++c) {
        if (!pm.valid_at(r, c)) {
          CHECK_FALSE(seq.object_masks[t].at(r, c));
          continue;
        }
        ++valid;
        if (!seq.object_masks[t].at(r, c)) continue;
        const double z = pm.at(r, c).z();
        CHECK(z > z_gt - 1.5 * spec.object.radius);
        CHECK(z < z_gt + 1.5 * spec.object.radius);
      }
    }
    CHECK(valid > 0);
  }

  // Features: one 48-dim descriptor per frame, finite and not all zero.
  const FeatureFile feats = read_features(seq.manifest.features);
  CHECK(feats.features.descriptors.rows() == 4);
  CHECK(feats.features.descriptors.cols() == 48);
  CHECK(feats.features.descriptors.allFinite());
  CHECK(feats.features.descriptors.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("synthesis is deterministic per seed") {
  TempDir a("det_a"), b("det_b"), c("det_c");
  synth_scene(small_spec(), a.str());
  synth_scene(small_spec(), b.str());
  SynthSpec other = small_spec();
  other.seed = 8;
  synth_scene(other, c.str());

  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.path)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a.path);
    CHECK(slurp(entry.path()) == slurp(b.path / rel));
    ++compared;
  }
  CHECK(compared > 10);

  // A different seed must change at least the first rendered frame.
  CHECK(slurp(a.path / "frames/img_0000.png") != slurp(c.path / "frames/img_0000.png"));
}

TEST_CASE("parked occluder covers part of the object") {
  TempDir dir("occ");
  SynthSpec spec = small_spec();
  spec.occluder.mode = "parked";
  const SynthResult res = synth_scene(spec, dir.str());
  const Sequence seq = load_sequence(res.manifest_path);
  for (int t = 0; t < spec.frames; ++t) {
    CHECK(res.occlusion_fraction[t] > 0.0);
    CHECK_FALSE(seq.hand_masks[t].empty_mask());
  }
}

TEST_CASE("initial trajectory perturbation") {
  TempDir exact("init0"), rough("init1");
  const SynthResult base = synth_scene(small_spec(), exact.str());
  const TrajectoryData gt0 = read_trajectory(base.gt_path);
  const TrajectoryData init0 = read_trajectory(base.init_path);
  for (int t = 0; t < gt0.frame_count(); ++t) {
    CHECK(init0.object[t].rotation == gt0.object[t].rotation);
    CHECK(init0.object[t].translation == gt0.object[t].translation);
  }

  SynthSpec spec = small_spec();
  spec.init.rotation_deg = 10.0;
  spec.init.translation_fraction = 0.05;
  const SynthResult pert = synth_scene(spec, rough.str());
  const TrajectoryData gt1 = read_trajectory(pert.gt_path);
  const TrajectoryData init1 = read_trajectory(pert.init_path);
  const double diameter = 2.0 * spec.object.radius;
  for (int t = 0; t < gt1.frame_count(); ++t) {
    const double ang = quat_angle_deg(gt1.object[t].rotation, init1.object[t].rotation);
    CHECK(ang >= 5.0 - 1e-6);
    CHECK(ang <= 10.0 + 1e-6);
    const double off = (gt1.object[t].translation - init1.object[t].translation).norm();
    CHECK(off >= 0.5 * 0.05 * diameter - 1e-9);
    CHECK(off <= 0.05 * diameter + 1e-9);
  }
}

TEST_CASE("default initial trajectory uses pointmap medians") {
  TempDir dir("medians");
  const SynthResult res = synth_scene(small_spec(), dir.str());
  const Sequence seq = load_sequence(res.manifest_path);
  const TrajectoryData init = default_initial_trajectory(seq);
  const TrajectoryData gt = read_trajectory(res.gt_path);
  REQUIRE(init.frame_count() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(init.object[t].rotation == Vec4(1, 0, 0, 0));
    // The median object point lands near the ground-truth center.
    CHECK((init.object[t].translation - gt.object[t].translation).norm() < 0.1);
    CHECK(init.object[t].translation.z() > 0.3);
    CHECK(init.hand[t].translation == seq.hand.poses[t].translation);
  }
}

TEST_CASE("dimension mismatch is reported with the frame index") {
  TempDir dir("baddims");
  const SynthResult res = synth_scene(small_spec(), dir.str());
  const SequenceManifest m = read_manifest(res.manifest_path);
  write_mask_png(m.object_masks[2], make_mask(10, 10));
  try {
    load_sequence(res.manifest_path);
    FAIL("expected a dimension mismatch error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("object mask dimension mismatch at frame 2") != std::string::npos);
    CHECK(msg.find("10x10") != std::string::npos);
  }
}

TEST_CASE("synth spec json parsing") {
  const SynthSpec def = synth_spec_from_json(Json::object());
  CHECK(def.frames == 10);
  CHECK(def.width == 160);
  CHECK(def.object.style == "relief");
  CHECK(def.occluder.mode == "none");

  const SynthSpec s = synth_spec_from_json(Json::parse(R"({
    "seed": 17, "frames": 6, "width": 128, "height": 96, "fps": 24.0,
    "object": {"style": "shell", "count": 250, "radius": 0.08},
    "camera": {"focal": 300.0, "distance": 0.7},
    "trajectory": {"family": "linear", "translation_amplitude": 0.03},
    "occluder": {"mode": "parked", "radius_fraction": 0.3},
    "noise": {"color": 0.01},
    "init": {"rotation_deg": 5.0, "translation_fraction": 0.02},
    "splat_radius_sigma": 1.5
  })"));
  CHECK(s.seed == 17);
  CHECK(s.frames == 6);
  CHECK(s.width == 128);
  CHECK(s.height == 96);
  CHECK(s.fps == 24.0);
  CHECK(s.object.style == "shell");
  CHECK(s.object.count == 250);
  CHECK(s.object.radius == 0.08);
  CHECK(s.camera.focal == 300.0);
  CHECK(s.camera.distance == 0.7);
  CHECK(s.trajectory.family == "linear");
  CHECK(s.trajectory.translation_amplitude == 0.03);
  CHECK(s.occluder.mode == "parked");
  CHECK(s.occluder.radius_fraction == 0.3);
  CHECK(s.noise.color == 0.01);
  CHECK(s.init.rotation_deg == 5.0);
  CHECK(s.init.translation_fraction == 0.02);
  CHECK(s.splat_radius_sigma == 1.5);

  CHECK_THROWS_WITH_AS(synth_scene(synth_spec_from_json(Json{{"object", {{"style", "torus"}}}}),
                                   fs::temp_directory_path().string() + "/sogtrack_badstyle"),
                       "unknown object style: torus", std::runtime_error);
}
