#pragma once

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace sogtrack {

struct QuadTreeParams {
  int max_depth = 8;
  double color_variance_threshold = 0.01;
  int min_cell_size = 2;
  int bbox_padding = 2;
  double min_valid_mask_ratio = 1e-6;
};

// Compact 2D Gaussian mixture summarizing one masked frame.
struct ImageSoG {
  std::vector<Gaussian2D> gaussians;
  int source_frame = 0;
  size_t mask_area = 0;
};

// Quad-tree color clustering over the padded mask bounding box. A cell becomes
// a leaf when its mean per-channel color variance is at or below the
// threshold, its longer side is at or below min_cell_size, or it sits at
// max_depth. Each surviving leaf yields one Gaussian with mu at the
// valid-pixel centroid, color at the valid-pixel mean, sigma = longer cell
// side / 2, weight 1. Throws "empty object mask" on an all-zero mask.
ImageSoG build_image_sog(const ImageRGB& image, const Mask& mask, const QuadTreeParams& params,
                         int source_frame = 0);

// Fraction of masked pixels within k_sigma * sigma of at least one center.
double coverage_fraction(const ImageSoG& sog, const Mask& mask, double k_sigma);

}  // namespace sogtrack
