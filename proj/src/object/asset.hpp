#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace sogtrack {

// Dense Gaussian-splat asset in the de-facto PLY layout. Scales are stored as
// natural logs and opacities as logits in the file; both are mapped on load.
// colors_dc keeps the raw spherical-harmonic DC coefficients.
struct DenseGaussianAsset {
  std::vector<Vec3> centers;
  std::vector<Vec3> scales;      // per-axis standard deviations, > 0
  std::vector<Vec4> rotations;   // (w,x,y,z), as stored
  std::vector<double> opacities; // sigmoid-mapped, in [0,1]
  std::vector<Vec3> colors_dc;   // SH degree-0 coefficients

  size_t size() const { return centers.size(); }
};

// Standard degree-0 spherical-harmonic constant; rgb = 0.5 + C0 * dc.
inline constexpr double kShC0 = 0.28209479177;

Vec3 dc_to_rgb(const Vec3& dc);

// Reads a binary little-endian PLY with per-vertex properties x, y, z,
// scale_0..2, rot_0..3, opacity, f_dc_0..2. Unknown extra properties are
// skipped. Throws a named-property error when a required property is missing.
DenseGaussianAsset read_gaussian_ply(const std::string& path);
void write_gaussian_ply(const std::string& path, const DenseGaussianAsset& asset);

// Reads only vertex positions (x, y, z) from a binary little-endian PLY.
std::vector<Vec3> read_point_set_ply(const std::string& path);
void write_point_set_ply(const std::string& path, const std::vector<Vec3>& points);

}  // namespace sogtrack
