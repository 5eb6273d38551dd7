#pragma once

#include "energy/energy.hpp"
#include "image/image_sog.hpp"
#include "io/formats.hpp"
#include "keyframes/keyframes.hpp"
#include "object/object_sog.hpp"
#include "optim/window.hpp"

namespace sogtrack {

// Every tunable of the tracking pipeline with its published default.
struct TrackConfig {
  QuadTreeParams quadtree;
  int object_count = 2000;
  double sigma_factor = 3.0;
  double min_opacity = 0.05;
  EnergyParams energy;
  LossWeights weights;
  WindowConfig window;
  AdamWConfig optimizer;
  LearningRates lr;
  int sil_downsample = 4;
  int depth_erosion_iterations = 1;
  double lambda_temp = kLambdaTempDefault;
  bool gating = true;
  int keyframe_count = kKeyframeCountDefault;
  double lambda_div = kLambdaDivDefault;
};

Json config_json(const TrackConfig& config);
TrackConfig config_from_json(const Json& j);

// Applies one dotted-path override ("weights.depth=500") onto a config JSON
// tree; the value is parsed as JSON when possible, else taken as a string.
void apply_override(Json& j, const std::string& assignment);

}  // namespace sogtrack
