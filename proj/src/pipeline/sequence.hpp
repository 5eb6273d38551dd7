#pragma once

#include <optional>

#include "io/formats.hpp"
#include "object/asset.hpp"

namespace sogtrack {

// Fully loaded, dimension-checked sequence.
struct Sequence {
  SequenceManifest manifest;
  std::vector<ImageRGB> images;
  std::vector<Mask> object_masks;
  std::vector<Mask> hand_masks;
  std::vector<Pointmap> pointmaps;
  std::vector<Camera> cameras;
  HandTrack hand;
  DenseGaussianAsset asset;
  std::optional<TrajectoryData> initial;

  int frame_count() const { return manifest.frame_count; }
};

Sequence load_sequence(const std::string& manifest_path);

// Identity rotations, per-frame translation at the component-wise median of
// valid pointmap points inside the object mask, scale 1; hand side taken from
// the hand track.
TrajectoryData default_initial_trajectory(const Sequence& seq);

}  // namespace sogtrack
