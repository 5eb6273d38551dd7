#pragma once

#include <span>

#include "object/object_sog.hpp"
#include "priors/priors.hpp"

namespace sogtrack {

// Optimized variables for one window: per-frame object and hand rigid poses
// plus one global log-scale per side. Quaternions are stored raw and
// normalized inside the objective.
struct ParamBlocks {
  std::vector<Vec4> obj_rot;
  std::vector<Vec3> obj_trans;
  double obj_log_scale = 0.0;
  std::vector<Vec4> hand_rot;
  std::vector<Vec3> hand_trans;
  double hand_log_scale = 0.0;

  int frames() const { return static_cast<int>(obj_rot.size()); }
  size_t dof() const { return static_cast<size_t>(frames()) * 14 + 2; }
  void flatten(std::vector<double>& out) const;
  void unflatten(std::span<const double> flat);
  Pose object_pose(int t) const;
  Pose hand_pose(int t) const;
};

// Per-block learning rates; fill_per_param expands them to the flat layout.
struct LearningRates {
  double object_rotation = 2e-3;
  double object_translation = 2e-3;
  double object_scale = 1e-3;
  double hand_rotation = 1e-4;
  double hand_translation = 1e-3;
  double hand_scale = 1e-3;

  std::vector<double> per_param(int frames) const;
};

// Immutable per-frame observations consumed by the objective. Pointmap depth
// medians are precomputed over the eroded masks since they never change
// during optimization.
struct FrameObservation {
  const ImageSoG* sog = nullptr;
  const Mask* mask_h = nullptr;          // full-resolution, for gating
  const Mask* mask_o_eroded = nullptr;   // depth-statistic membership
  const Mask* mask_h_eroded = nullptr;
  const DownsampledMask* mask_o_down = nullptr;  // silhouette target
  const Camera* cam = nullptr;
  const HandFrame* hand = nullptr;
  std::optional<double> pm_median_o;
  std::optional<double> pm_median_h;
  std::vector<double> image_self_energy;  // E_ii per image Gaussian
};

struct ObjectiveConfig {
  LossWeights weights;
  EnergyParams energy;
  int sil_downsample = 4;
  bool gating = true;
  std::vector<int> contact_indices;  // empty = fingertip joints
};

struct WindowProblem {
  std::vector<const FrameObservation*> frames;
  const ObjectSoG* object = nullptr;
  ObjectiveConfig config;
};

// Discrete state captured at the evaluation point and held fixed for one
// iteration: active energy pairs, clamp branches, visibility and membership
// sets, absolute-value signs, silhouette saturation, contact correspondences
// and quaternion signs. With these frozen the objective is smooth, so the
// analytic gradient and the central-difference oracle see the same function.
struct FrozenFrame {
  std::vector<std::uint8_t> in_front;    // per object Gaussian
  std::vector<std::uint8_t> visible;     // in_front, in-image, not hand-occluded
  EnergyActiveSet pairs;                 // model_index = object-Gaussian index
  std::vector<std::uint8_t> depth_member;
  double depth_sign_o = 0.0;
  std::vector<std::uint8_t> hand_in_front;
  std::vector<std::uint8_t> hand_depth_member;
  double depth_sign_h = 0.0;
  std::vector<std::uint8_t> joint_in_front;
  std::vector<std::uint8_t> sil_saturated;
  std::vector<int> contact_nn;           // per contact point, object-Gaussian index
  bool contact_active = false;
};

// Weighted contribution of each loss term; they sum to the total objective.
struct TermBreakdown {
  double energy = 0.0;
  double j2d = 0.0;
  double depth = 0.0;
  double sil = 0.0;
  double contact = 0.0;
  double smooth = 0.0;
};

struct FrozenWindow {
  std::vector<FrozenFrame> frames;
  std::vector<double> obj_qsign;
  std::vector<double> hand_qsign;
  TermBreakdown terms;
  double value = 0.0;  // true (unfrozen) objective at the freeze point
};

// Captures the frozen state and the true objective value at params.
// Throws "objective diverged" when the objective is not finite.
FrozenWindow freeze_window(const WindowProblem& problem, const ParamBlocks& params);

// Smooth surrogate defined by the frozen state; equals FrozenWindow::value at
// the freeze point.
double frozen_objective(const WindowProblem& problem, const ParamBlocks& params,
                        const FrozenWindow& frozen);

// Analytic gradient of frozen_objective, flat layout.
std::vector<double> frozen_gradient(const WindowProblem& problem, const ParamBlocks& params,
                                    const FrozenWindow& frozen);

// Central finite differences of frozen_objective; the verification oracle.
std::vector<double> finite_difference_gradient(const WindowProblem& problem,
                                               const ParamBlocks& params,
                                               const FrozenWindow& frozen, double h = 1e-4);

}  // namespace sogtrack
