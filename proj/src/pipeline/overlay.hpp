#pragma once

#include "pipeline/config.hpp"
#include "pipeline/sequence.hpp"

namespace sogtrack {

// Blends the projected object SoG over one frame: each Gaussian splats its
// color with weight exp(-d^2 / (2 sigma^2)), far to near.
ImageRGB render_overlay(const ImageRGB& frame, const ProjectedSoG& projected);

// Renders an overlay PNG per frame into out_dir using the trajectory's poses.
void run_overlay(const Sequence& seq, const TrajectoryData& traj, const TrackConfig& config,
                 const std::string& out_dir);

}  // namespace sogtrack
