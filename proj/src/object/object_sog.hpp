#pragma once

#include "object/asset.hpp"

namespace sogtrack {

// Compact isotropic 3D Gaussian mixture for the canonical object.
struct ObjectSoG {
  std::vector<Gaussian3D> gaussians;
  int count() const { return static_cast<int>(gaussians.size()); }
};

// Greedy max-min farthest-point sampling starting at seed_index; ties broken
// by lowest index; indices returned in selection order. Throws
// "sample larger than population" when k > N.
std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int k, int seed_index);

// Index of the point nearest the centroid, lowest index on ties. Default FPS
// seed so selection does not depend on file ordering.
int centroid_seed(const std::vector<Vec3>& points);

// FPS-sparsifies an asset into k isotropic Gaussians: sigma = sigma_factor *
// mean of the three scale axes, color = DC-mapped RGB, weight 1. Gaussians
// with opacity below min_opacity are dropped before sampling.
ObjectSoG to_object_sog(const DenseGaussianAsset& asset, int k, double sigma_factor,
                        double min_opacity = 0.05);

// Posed perspective projection of the SoG; Gaussians behind the camera are
// omitted. sigma_2d = f_avg * (pose.scale * sigma_3d) / depth. source_index
// ties each projected Gaussian back to its 3D origin.
struct ProjectedSoG {
  std::vector<Gaussian2D> gaussians;
  std::vector<double> depths;       // camera-space z per projected Gaussian
  std::vector<int> source_indices;  // into ObjectSoG
};
ProjectedSoG project_sog(const ObjectSoG& sog, const Pose& pose, const Camera& cam);

}  // namespace sogtrack
