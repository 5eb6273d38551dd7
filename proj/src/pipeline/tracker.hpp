#pragma once

#include "metrics/metrics.hpp"
#include "pipeline/config.hpp"
#include "pipeline/sequence.hpp"

namespace sogtrack {

struct TrackDiagnostics {
  std::vector<int> window_starts;
  std::vector<std::vector<double>> window_traces;
  std::vector<std::vector<TermBreakdown>> window_terms;
  std::vector<std::string> warnings;
  HandAlignment alignment;
  bool alignment_applied = false;
  double runtime_seconds = 0.0;
  double hours_per_100_frames = 0.0;
  std::vector<size_t> image_sog_sizes;
  size_t object_sog_size = 0;
};

// Full tracking pass: image SoGs per frame, object SoG once, hand depth
// alignment once, sliding-window optimization, quaternion sign fix. Windows
// that diverge leave their frames at the previous values and set the frame
// failure markers; the function itself only throws on unusable inputs.
TrajectoryData run_tracking(const Sequence& seq, const TrackConfig& config,
                            TrackDiagnostics* diagnostics = nullptr);

// Evaluation against a ground-truth trajectory sharing the same canonical
// object points and hand track. Template CD/F10 are computed after similarity
// ICP between the two (scaled) canonical point sets, or between explicitly
// provided point sets when given. Errors in one metric mark the report
// unsuccessful instead of aborting.
MetricReport run_eval(const TrajectoryData& pred, const TrajectoryData& gt,
                      const std::vector<Vec3>& object_points, const HandTrack& hand, double fps,
                      const std::vector<Vec3>* pred_template = nullptr,
                      const std::vector<Vec3>* gt_template = nullptr);

// Posed world-space copies of canonical points.
std::vector<Vec3> pose_points(const std::vector<Vec3>& points, const Pose& pose);

}  // namespace sogtrack
