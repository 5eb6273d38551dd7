#include "priors/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sogtrack {

const std::vector<Vec3>& hand_points(const HandFrame& hand) {
  return hand.local_vertices.empty() ? hand.local_joints : hand.local_vertices;
}

std::vector<Vec3> contact_points(const HandFrame& hand, const std::vector<int>& contact_indices) {
  std::vector<Vec3> out;
  if (contact_indices.empty()) {
    for (int j : kFingertipJoints)
      if (j < static_cast<int>(hand.local_joints.size())) out.push_back(hand.local_joints[j]);
  } else {
    const std::vector<Vec3>& pts = hand_points(hand);
    for (int j : contact_indices) {
      if (j < 0 || j >= static_cast<int>(pts.size()))
        throw std::runtime_error("contact index out of range");
      out.push_back(pts[j]);
    }
  }
  return out;
}

double loss_j2d(const HandFrame& hand, const Pose& pose_h, const Camera& cam) {
  double total = 0.0;
  for (size_t l = 0; l < hand.local_joints.size(); ++l) {
    const double conf = hand.detected_joints_2d[l].z();
    if (conf <= 0.0) continue;
    const Vec3 c = to_camera(cam, apply_pose(pose_h, hand.local_joints[l]));
    if (c.z() <= 1e-9) {
      total += conf * kBehindCameraPenalty;
      continue;
    }
    const Vec2 uv(cam.fx() * c.x() / c.z() + cam.cx(), cam.fy() * c.y() / c.z() + cam.cy());
    total += conf * (uv - hand.detected_joints_2d[l].head<2>()).squaredNorm();
  }
  return total;
}

RenderedDepthStats render_depth_stats(const std::vector<Gaussian2D>& projected,
                                      const std::vector<double>& depths,
                                      const VisibilityFlags& flags, const Mask& mask_o,
                                      const std::vector<Vec3>& hand_points_world,
                                      const Camera& cam, const Mask& mask_h) {
  RenderedDepthStats stats;
  double sum = 0.0;
  size_t n = 0;
  for (size_t j = 0; j < projected.size(); ++j) {
    if (!flags.visible(j)) continue;
    const long col = std::lround(projected[j].mu.x());
    const long row = std::lround(projected[j].mu.y());
    if (col < 0 || row < 0 || col >= mask_o.width || row >= mask_o.height) continue;
    if (!mask_o.at(static_cast<int>(row), static_cast<int>(col))) continue;
    sum += depths[j];
    ++n;
  }
  if (n > 0) {
    stats.object_valid = true;
    stats.object_mean = sum / static_cast<double>(n);
  }

  sum = 0.0;
  n = 0;
  for (const Vec3& p : hand_points_world) {
    const Vec3 c = to_camera(cam, p);
    if (c.z() <= 1e-9) continue;
    const long col = std::lround(cam.fx() * c.x() / c.z() + cam.cx());
    const long row = std::lround(cam.fy() * c.y() / c.z() + cam.cy());
    if (col < 0 || row < 0 || col >= mask_h.width || row >= mask_h.height) continue;
    if (!mask_h.at(static_cast<int>(row), static_cast<int>(col))) continue;
    sum += c.z();
    ++n;
  }
  if (n > 0) {
    stats.hand_valid = true;
    stats.hand_mean = sum / static_cast<double>(n);
  }
  return stats;
}

std::optional<double> pointmap_depth_median(const Pointmap& pm, const Mask& mask, const Camera& cam) {
  const Mat3 re = cam.extrinsics.topLeftCorner<3, 3>();
  const Vec3 te = cam.extrinsics.topRightCorner<3, 1>();
  std::vector<double> depths;
  for (int r = 0; r < pm.height; ++r) {
    for (int c = 0; c < pm.width; ++c) {
      if (!mask.at(r, c) || !pm.valid_at(r, c)) continue;
      depths.push_back((re * pm.at(r, c) + te).z());
    }
  }
  if (depths.empty()) return std::nullopt;
  return median(std::move(depths));
}

double loss_depth(const RenderedDepthStats& stats, const Pointmap& pm, const Camera& cam,
                  const Mask& mask_o, const Mask& mask_h) {
  double total = 0.0;
  if (stats.object_valid) {
    if (auto med = pointmap_depth_median(pm, mask_o, cam))
      total += std::abs(stats.object_mean - *med);
  }
  if (stats.hand_valid) {
    if (auto med = pointmap_depth_median(pm, mask_h, cam))
      total += std::abs(stats.hand_mean - *med);
  }
  return total;
}

std::vector<double> silhouette_sums(const std::vector<Gaussian2D>& projected, int out_width,
                                    int out_height, int downsample) {
  std::vector<double> sums(static_cast<size_t>(out_width) * out_height, 0.0);
  const double d = downsample;
  for (const Gaussian2D& g : projected) {
    // Sites beyond the exponent cutoff contribute < exp(-30); skip them.
    const double radius = std::sqrt(2.0 * kSilExponentCutoff) * g.sigma;
    const int c0 = std::max(0, static_cast<int>(std::ceil((g.mu.x() - radius) / d)));
    const int c1 = std::min(out_width - 1, static_cast<int>(std::floor((g.mu.x() + radius) / d)));
    const int r0 = std::max(0, static_cast<int>(std::ceil((g.mu.y() - radius) / d)));
    const int r1 = std::min(out_height - 1, static_cast<int>(std::floor((g.mu.y() + radius) / d)));
    const double inv_2s2 = 1.0 / (2.0 * g.sigma * g.sigma);
    for (int r = r0; r <= r1; ++r) {
      const double dy = r * d - g.mu.y();
      for (int c = c0; c <= c1; ++c) {
        const double dx = c * d - g.mu.x();
        const double expo = (dx * dx + dy * dy) * inv_2s2;
        if (expo > kSilExponentCutoff) continue;
        sums[static_cast<size_t>(r) * out_width + c] += std::exp(-expo);
      }
    }
  }
  return sums;
}

OccupancyMap render_silhouette(const std::vector<Gaussian2D>& projected, int width, int height,
                               int downsample) {
  if (downsample < 1) throw std::runtime_error("downsample factor must be positive");
  OccupancyMap map;
  map.width = (width + downsample - 1) / downsample;
  map.height = (height + downsample - 1) / downsample;
  map.data = silhouette_sums(projected, map.width, map.height, downsample);
  for (double& v : map.data) v = std::min(1.0, v);
  return map;
}

double loss_sil(const OccupancyMap& occupancy, const Mask& mask_o, int downsample) {
  const DownsampledMask m = downsample_mask(mask_o, downsample);
  if (m.width != occupancy.width || m.height != occupancy.height)
    throw std::runtime_error("silhouette resolution mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < occupancy.data.size(); ++i) {
    const double diff = occupancy.data[i] - m.data[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(occupancy.data.size());
}

double loss_contact(const HandFrame& hand, const Pose& pose_h, const std::vector<Vec3>& object_points,
                    const Pose& pose_o, const std::vector<int>& contact_indices) {
  if (object_points.empty()) throw std::runtime_error("no object surface samples");
  const std::vector<Vec3> contacts = contact_points(hand, contact_indices);
  if (contacts.empty()) return 0.0;

  std::vector<Vec3> posed_obj(object_points.size());
  for (size_t i = 0; i < object_points.size(); ++i) posed_obj[i] = apply_pose(pose_o, object_points[i]);

  double acc = 0.0;
  for (const Vec3& cp : contacts) {
    const Vec3 p = apply_pose(pose_h, cp);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& op : posed_obj) best = std::min(best, (p - op).squaredNorm());
    acc += best;
  }
  return acc / static_cast<double>(contacts.size());
}

double loss_smooth(const std::vector<Pose>& window) {
  if (window.size() < 3) return 0.0;
  std::vector<Vec4> quats(window.size());
  for (size_t t = 0; t < window.size(); ++t) quats[t] = quat_normalize(window[t].rotation);
  fix_quaternion_trajectory(quats);
  double acc = 0.0;
  for (size_t t = 1; t + 1 < window.size(); ++t) {
    acc += (window[t + 1].translation - 2.0 * window[t].translation + window[t - 1].translation)
               .squaredNorm();
    acc += (quats[t + 1] - 2.0 * quats[t] + quats[t - 1]).squaredNorm();
  }
  return acc;
}

namespace {

// Least-squares scale + translation (no rotation): min sum ||a*x + d - p||^2.
void fit_scale_translation(const std::vector<Vec3>& x, const std::vector<Vec3>& p,
                           const std::vector<int>& subset, double& alpha, Vec3& delta) {
  Vec3 xm = Vec3::Zero(), pm = Vec3::Zero();
  for (int i : subset) {
    xm += x[i];
    pm += p[i];
  }
  xm /= static_cast<double>(subset.size());
  pm /= static_cast<double>(subset.size());
  double num = 0.0, den = 0.0;
  for (int i : subset) {
    num += (x[i] - xm).dot(p[i] - pm);
    den += (x[i] - xm).squaredNorm();
  }
  alpha = den > 1e-12 ? num / den : 1.0;
  delta = pm - alpha * xm;
}

}  // namespace

HandAlignment hand_depth_align(const std::vector<HandFrame>& frames,
                               const std::vector<Pose>& hand_poses,
                               const std::vector<Pointmap>& pointmaps,
                               const std::vector<Mask>& hand_masks,
                               const std::vector<Camera>& cams) {
  int ref = -1;
  size_t best_area = 0;
  for (size_t t = 0; t < hand_masks.size(); ++t) {
    const size_t area = hand_masks[t].count();
    if (area > best_area) {
      best_area = area;
      ref = static_cast<int>(t);
    }
  }
  if (ref < 0) throw std::runtime_error("hand depth alignment failed: no pointmap support");

  const Mask eroded = erode_mask(hand_masks[ref], 2);
  const Camera& cam = cams[ref];
  const Pointmap& pm = pointmaps[ref];
  const std::vector<Vec3>& local = hand_points(frames[ref]);

  std::vector<Vec3> posed, samples;
  std::vector<std::uint8_t> claimed(static_cast<size_t>(eroded.width) * eroded.height, 0);
  constexpr int kRadius = 2;
  constexpr size_t kMaxSamples = 2000;
  for (const Vec3& lp : local) {
    if (samples.size() >= kMaxSamples) break;
    const Vec3 world = apply_pose(hand_poses[ref], lp);
    const Vec3 c = to_camera(cam, world);
    if (c.z() <= 1e-9) continue;
    const long col = std::lround(cam.fx() * c.x() / c.z() + cam.cx());
    const long row = std::lround(cam.fy() * c.y() / c.z() + cam.cy());
    for (int dr = -kRadius; dr <= kRadius; ++dr) {
      for (int dc = -kRadius; dc <= kRadius; ++dc) {
        if (dr * dr + dc * dc > kRadius * kRadius) continue;
        const long r = row + dr, cc = col + dc;
        if (r < 0 || cc < 0 || r >= eroded.height || cc >= eroded.width) continue;
        std::uint8_t& seen = claimed[static_cast<size_t>(r) * eroded.width + cc];
        if (seen || !eroded.at(static_cast<int>(r), static_cast<int>(cc)) ||
            !pm.valid_at(static_cast<int>(r), static_cast<int>(cc)))
          continue;
        seen = 1;
        posed.push_back(world);
        samples.push_back(pm.at(static_cast<int>(r), static_cast<int>(cc)));
        if (samples.size() >= kMaxSamples) break;
      }
      if (samples.size() >= kMaxSamples) break;
    }
  }
  if (samples.empty()) throw std::runtime_error("hand depth alignment failed: no pointmap support");

  // Trimmed fit: re-solve on the best 80% by residual, three rounds.
  std::vector<int> subset(samples.size());
  std::iota(subset.begin(), subset.end(), 0);
  double alpha = 1.0;
  Vec3 delta = Vec3::Zero();
  for (int round = 0; round < 3; ++round) {
    fit_scale_translation(posed, samples, subset, alpha, delta);
    if (round == 2) break;
    std::vector<std::pair<double, int>> residuals;
    residuals.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
      residuals.emplace_back((alpha * posed[i] + delta - samples[i]).squaredNorm(),
                             static_cast<int>(i));
    const size_t keep = std::max<size_t>(3, (samples.size() * 8 + 9) / 10);
    if (keep >= residuals.size()) continue;
    std::nth_element(residuals.begin(), residuals.begin() + keep - 1, residuals.end());
    residuals.resize(keep);
    subset.clear();
    for (const auto& [res, idx] : residuals) subset.push_back(idx);
    std::sort(subset.begin(), subset.end());
  }
  if (!(alpha > 1e-6)) throw std::runtime_error("hand depth alignment failed: degenerate fit");

  HandAlignment out;
  out.reference_frame = ref;
  out.scale = alpha;
  // Posed points map as x -> alpha*x + delta; for x = s R v + tau this equals
  // (alpha s) R v + (alpha tau + delta), so the translation delta below is the
  // shift applied to the reference frame and propagated to all frames.
  out.translation = alpha * hand_poses[ref].translation + delta - hand_poses[ref].translation;
  out.sample_count = static_cast<int>(samples.size());
  return out;
}

}  // namespace sogtrack
