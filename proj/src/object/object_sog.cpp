#include "object/object_sog.hpp"

#include <limits>
#include <stdexcept>

namespace sogtrack {

std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int k, int seed_index) {
  const int n = static_cast<int>(points.size());
  if (k > n) throw std::runtime_error("sample larger than population");
  if (k < 1) throw std::runtime_error("sample size must be positive");
  if (seed_index < 0 || seed_index >= n) throw std::runtime_error("FPS seed index out of range");

  std::vector<int> selected;
  selected.reserve(k);
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  int current = seed_index;
  selected.push_back(current);
  for (int step = 1; step < k; ++step) {
    int best = -1;
    double best_sq = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points[i] - points[current]).squaredNorm();
      if (d < min_sq[i]) min_sq[i] = d;
      if (min_sq[i] > best_sq) {  // strict: ties keep the lowest index
        best_sq = min_sq[i];
        best = i;
      }
    }
    current = best;
    selected.push_back(current);
  }
  return selected;
}

int centroid_seed(const std::vector<Vec3>& points) {
  if (points.empty()) throw std::runtime_error("sample larger than population");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  int best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i] - centroid).squaredNorm();
    if (d < best_sq) {
      best_sq = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ObjectSoG to_object_sog(const DenseGaussianAsset& asset, int k, double sigma_factor,
                        double min_opacity) {
  std::vector<int> kept;
  for (size_t i = 0; i < asset.size(); ++i)
    if (asset.opacities[i] >= min_opacity) kept.push_back(static_cast<int>(i));

  std::vector<Vec3> centers;
  centers.reserve(kept.size());
  for (int i : kept) centers.push_back(asset.centers[i]);

  const std::vector<int> picks = farthest_point_sample(centers, k, centroid_seed(centers));
  ObjectSoG sog;
  sog.gaussians.reserve(picks.size());
  for (int p : picks) {
    const int i = kept[p];
    Gaussian3D g;
    g.mu = asset.centers[i];
    g.sigma = sigma_factor * asset.scales[i].mean();
    g.color = dc_to_rgb(asset.colors_dc[i]);
    g.weight = 1.0;
    sog.gaussians.push_back(g);
  }
  return sog;
}

ProjectedSoG project_sog(const ObjectSoG& sog, const Pose& pose, const Camera& cam) {
  ProjectedSoG out;
  const Vec4 q = quat_normalize(pose.rotation);
  const Mat3 re = cam.extrinsics.topLeftCorner<3, 3>();
  const Vec3 te = cam.extrinsics.topRightCorner<3, 1>();
  for (int j = 0; j < sog.count(); ++j) {
    const Gaussian3D& g = sog.gaussians[j];
    const Vec3 world = pose.scale * quat_rotate(q, g.mu) + pose.translation;
    const Vec3 c = re * world + te;
    if (c.z() <= 1e-9) continue;
    Gaussian2D p;
    p.mu = Vec2(cam.fx() * c.x() / c.z() + cam.cx(), cam.fy() * c.y() / c.z() + cam.cy());
    p.sigma = cam.favg() * (pose.scale * g.sigma) / c.z();
    p.color = g.color;
    p.weight = g.weight;
    out.gaussians.push_back(p);
    out.depths.push_back(c.z());
    out.source_indices.push_back(j);
  }
  if (out.gaussians.empty()) throw std::runtime_error("object fully behind camera");
  return out;
}

}  // namespace sogtrack
