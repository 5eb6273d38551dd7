#pragma once

#include "pipeline/sequence.hpp"

namespace sogtrack {

struct SynthObjectSpec {
  std::string style = "relief";  // relief | cloud | shell
  int count = 400;               // asset Gaussian count (approximate for relief)
  double radius = 0.06;          // object half-extent, meters
  double height_amplitude = 0.1; // relief height as fraction of radius
  int palette = 6;               // distinct patch colors
  double low_opacity_fraction = 0.05;  // decoys below the opacity filter
};

struct SynthCameraSpec {
  double focal = 260.0;
  double distance = 0.55;  // object depth, meters
};

struct SynthTrajectorySpec {
  std::string family = "spline";  // spline | linear | static
  double translation_amplitude = 0.02;  // meters
  double rotation_amplitude_deg = 20.0;
};

struct SynthOccluderSpec {
  std::string mode = "none";  // none | parked | overlay
  double radius_fraction = 0.45;  // sphere radius vs object radius
};

struct SynthNoiseSpec {
  double color = 0.0;  // stddev on image channels
  double depth = 0.0;  // stddev on pointmap depth, meters
  double mask = 0.0;   // per-pixel flip probability
};

// Perturbation applied to the ground-truth object poses to produce the
// initial trajectory; zero keeps the initialization exact.
struct SynthInitSpec {
  double rotation_deg = 0.0;
  double translation_fraction = 0.0;  // of the object diameter
};

struct SynthSpec {
  std::uint64_t seed = 1;
  int frames = 10;
  int width = 160;
  int height = 120;
  double fps = 30.0;
  SynthObjectSpec object;
  SynthCameraSpec camera;
  SynthTrajectorySpec trajectory;
  SynthOccluderSpec occluder;
  SynthNoiseSpec noise;
  SynthInitSpec init;
  double splat_radius_sigma = 1.0;  // draw radius in units of projected sigma
};

SynthSpec synth_spec_from_json(const Json& j);

struct SynthResult {
  std::string manifest_path;
  std::string gt_path;
  std::string init_path;
  SequenceManifest manifest;
  TrajectoryData gt;
  std::vector<double> occlusion_fraction;  // per frame, of object pixels
};

// Writes a complete synthetic sequence (frames, masks, pointmaps, cameras,
// hand track, asset, features, ground-truth and initial trajectories) into
// out_dir. Deterministic: one seed drives every random draw.
SynthResult synth_scene(const SynthSpec& spec, const std::string& out_dir);

}  // namespace sogtrack
