#pragma once

#include "core/geometry.hpp"

namespace sogtrack {

// Symmetric mean nearest-neighbor L2 distance (unsquared), meters.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Harmonic mean of precision and recall at the distance threshold, in percent.
double f_score(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double threshold_m);

inline constexpr double kFScoreThresholdM = 0.010;

struct IcpResult {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;
  double residual = 0.0;  // final mean nearest-neighbor distance (m)
  int iterations = 0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

// Iterative nearest-neighbor + closed-form similarity fit of source onto
// target, initialized from centroid/spread moments over a fixed set of coarse
// rotation starts; the best start wins. Each start stops at max_iters or when
// the mean residual improves by < tol.
IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    int max_iters = 50, double tol = 1e-6);

// Root-relative mean per-joint position error in millimeters; joint 0 is the
// root of every frame.
double mpjpe(const std::vector<std::vector<Vec3>>& pred_joints,
             const std::vector<std::vector<Vec3>>& gt_joints);

// Per-frame chamfer of hand-root-relative object points, averaged, in cm.
double cd_hand_relative(const std::vector<std::vector<Vec3>>& pred_obj,
                        const std::vector<Vec3>& pred_hand_root,
                        const std::vector<std::vector<Vec3>>& gt_obj,
                        const std::vector<Vec3>& gt_hand_root);

// Mean L2 difference of second finite differences of the two trajectories,
// scaled by fps^2 (m/s^2).
double acceleration_error(const std::vector<Vec3>& pred_traj, const std::vector<Vec3>& gt_traj,
                          double fps);

// Mean error of relative root offsets, millimeters.
double mrrpe(const std::vector<Vec3>& pred_hand_root, const std::vector<Vec3>& pred_obj_root,
             const std::vector<Vec3>& gt_hand_root, const std::vector<Vec3>& gt_obj_root);

Vec3 centroid(const std::vector<Vec3>& points);

}  // namespace sogtrack
