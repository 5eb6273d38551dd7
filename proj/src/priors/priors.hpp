#pragma once

#include <optional>

#include "energy/energy.hpp"

namespace sogtrack {

// One frame's hand observations: precomputed local geometry plus detections.
// Articulated pose lives in the per-frame local joints/vertices; only the
// rigid transform and global scale are optimized.
struct HandFrame {
  std::vector<Vec3> local_joints;          // 21 x 3, hand-local frame
  std::vector<Vec3> local_vertices;        // optional V x 3
  std::vector<Vec3> detected_joints_2d;    // 21 x (u, v, confidence)
  bool contact_flag = false;
};

// Per-pixel world points from monocular depth, NaN rows invalid.
struct Pointmap {
  int width = 0;
  int height = 0;
  std::vector<float> points;            // height * width * 3
  std::vector<std::uint8_t> validity;   // height * width

  bool valid_at(int row, int col) const { return validity[static_cast<size_t>(row) * width + col] != 0; }
  Vec3 at(int row, int col) const {
    const float* p = points.data() + 3 * (static_cast<size_t>(row) * width + col);
    return Vec3(p[0], p[1], p[2]);
  }
};

struct LossWeights {
  double j2d = 0.5;
  double depth = 1000.0;
  double sil = 100.0;
  double contact = 5000.0;
  double smooth = 100.0;
  double energy = 0.05;
};

// Default contact set when the hand file carries no index list: the five
// fingertip joints in the conventional 21-joint order.
inline constexpr int kFingertipJoints[5] = {4, 8, 12, 16, 20};

// Hand points used for depth/contact: vertices when present, joints otherwise.
const std::vector<Vec3>& hand_points(const HandFrame& hand);

// Contact points for one frame: indices into hand_points(hand), or the
// fingertip joints when the list is empty.
std::vector<Vec3> contact_points(const HandFrame& hand, const std::vector<int>& contact_indices);

// Confidence-weighted squared reprojection error of the 21 joints; joints
// behind the camera contribute a fixed 1e6 px^2 penalty instead of erroring.
double loss_j2d(const HandFrame& hand, const Pose& pose_h, const Camera& cam);

// Mean depths of the rendered object/hand inside their masks; the flags mark
// whether any member existed.
struct RenderedDepthStats {
  bool object_valid = false;
  double object_mean = 0.0;
  bool hand_valid = false;
  double hand_mean = 0.0;
};

// Object side: visibility-gated projected Gaussians whose centers round into
// mask_o. Hand side: posed hand points projecting inside mask_h.
RenderedDepthStats render_depth_stats(const std::vector<Gaussian2D>& projected,
                                      const std::vector<double>& depths,
                                      const VisibilityFlags& flags, const Mask& mask_o,
                                      const std::vector<Vec3>& hand_points_world,
                                      const Camera& cam, const Mask& mask_h);

// Median camera-space depth of valid pointmap pixels inside the mask.
std::optional<double> pointmap_depth_median(const Pointmap& pm, const Mask& mask, const Camera& cam);

// |mean(D_rend[mask_o]) - median(D_pm[mask_o])| + same for the hand mask;
// either term is 0 when its statistics are undefined.
double loss_depth(const RenderedDepthStats& stats, const Pointmap& pm, const Camera& cam,
                  const Mask& mask_o, const Mask& mask_h);

struct OccupancyMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
};

// Soft silhouette at reduced resolution:
//   O(u) = min(1, sum_j exp(-||u*d - mu_j||^2 / (2 sigma_j^2))).
OccupancyMap render_silhouette(const std::vector<Gaussian2D>& projected, int width, int height,
                               int downsample);

// Unclamped site sums of the same kernel; shared by the loss and its gradient.
std::vector<double> silhouette_sums(const std::vector<Gaussian2D>& projected, int out_width,
                                    int out_height, int downsample);

// Mean squared difference between the occupancy map and the area-averaged
// downsampled object mask.
double loss_sil(const OccupancyMap& occupancy, const Mask& mask_o, int downsample);

// Mean squared nearest-neighbor distance from posed contact points to posed
// object surface samples. Only applied when the frame's contact flag is set.
double loss_contact(const HandFrame& hand, const Pose& pose_h, const std::vector<Vec3>& object_points,
                    const Pose& pose_o, const std::vector<int>& contact_indices);

// Squared second differences of translations and sign-consistent quaternions
// over a window; 0 for windows shorter than 3.
double loss_smooth(const std::vector<Pose>& window);

// Global hand scale + translation correction from pointmap support around the
// reference frame (largest hand-mask area). scale multiplies the hand scale;
// translation is added to every frame's hand translation.
struct HandAlignment {
  int reference_frame = -1;
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();
  int sample_count = 0;
};
HandAlignment hand_depth_align(const std::vector<HandFrame>& frames,
                               const std::vector<Pose>& hand_poses,
                               const std::vector<Pointmap>& pointmaps,
                               const std::vector<Mask>& hand_masks,
                               const std::vector<Camera>& cams);

inline constexpr double kSilExponentCutoff = 30.0;
inline constexpr double kBehindCameraPenalty = 1e6;

}  // namespace sogtrack
