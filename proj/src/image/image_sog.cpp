#include "image/image_sog.hpp"

#include <algorithm>
#include <stdexcept>

namespace sogtrack {
namespace {

struct CellStats {
  size_t valid = 0;
  double sum[3] = {0, 0, 0};
  double sum_sq[3] = {0, 0, 0};
  double sum_col = 0;
  double sum_row = 0;
};

CellStats cell_stats(const ImageRGB& image, const Mask& mask, int r0, int c0, int h, int w) {
  CellStats s;
  for (int r = r0; r < r0 + h; ++r) {
    for (int c = c0; c < c0 + w; ++c) {
      if (!mask.at(r, c)) continue;
      const float* px = image.pixel(r, c);
      ++s.valid;
      for (int ch = 0; ch < 3; ++ch) {
        s.sum[ch] += px[ch];
        s.sum_sq[ch] += static_cast<double>(px[ch]) * px[ch];
      }
      s.sum_col += c;
      s.sum_row += r;
    }
  }
  return s;
}

// Mean of the three per-channel population variances.
double mean_variance(const CellStats& s) {
  double acc = 0;
  for (int ch = 0; ch < 3; ++ch) {
    const double mean = s.sum[ch] / s.valid;
    acc += std::max(0.0, s.sum_sq[ch] / s.valid - mean * mean);
  }
  return acc / 3.0;
}

void subdivide(const ImageRGB& image, const Mask& mask, const QuadTreeParams& params, int r0, int c0,
               int h, int w, int depth, std::vector<Gaussian2D>& out) {
  if (h <= 0 || w <= 0) return;
  const CellStats s = cell_stats(image, mask, r0, c0, h, w);
  if (s.valid == 0) return;
  const double valid_fraction = static_cast<double>(s.valid) / (static_cast<double>(h) * w);
  if (valid_fraction < params.min_valid_mask_ratio) return;

  const int side = std::max(h, w);
  const bool leaf = mean_variance(s) <= params.color_variance_threshold ||
                    side <= params.min_cell_size || depth >= params.max_depth;
  if (leaf) {
    Gaussian2D g;
    g.mu = Vec2(s.sum_col / s.valid, s.sum_row / s.valid);
    g.sigma = 0.5 * side;
    g.color = Vec3(s.sum[0] / s.valid, s.sum[1] / s.valid, s.sum[2] / s.valid);
    g.weight = 1.0;
    out.push_back(g);
    return;
  }

  // Odd sizes give the larger half to the low-index child.
  const int h0 = (h + 1) / 2, w0 = (w + 1) / 2;
  subdivide(image, mask, params, r0, c0, h0, w0, depth + 1, out);
  subdivide(image, mask, params, r0, c0 + w0, h0, w - w0, depth + 1, out);
  subdivide(image, mask, params, r0 + h0, c0, h - h0, w0, depth + 1, out);
  subdivide(image, mask, params, r0 + h0, c0 + w0, h - h0, w - w0, depth + 1, out);
}

}  // namespace

ImageSoG build_image_sog(const ImageRGB& image, const Mask& mask, const QuadTreeParams& params,
                         int source_frame) {
  if (image.width != mask.width || image.height != mask.height)
    throw std::runtime_error("image and mask dimensions differ");

  int rmin = mask.height, rmax = -1, cmin = mask.width, cmax = -1;
  size_t area = 0;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      ++area;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  if (area == 0) throw std::runtime_error("empty object mask");

  // Padded bounding box, clamped to image bounds.
  rmin = std::max(0, rmin - params.bbox_padding);
  cmin = std::max(0, cmin - params.bbox_padding);
  rmax = std::min(mask.height - 1, rmax + params.bbox_padding);
  cmax = std::min(mask.width - 1, cmax + params.bbox_padding);

  ImageSoG sog;
  sog.source_frame = source_frame;
  sog.mask_area = area;
  subdivide(image, mask, params, rmin, cmin, rmax - rmin + 1, cmax - cmin + 1, 0, sog.gaussians);
  return sog;
}

double coverage_fraction(const ImageSoG& sog, const Mask& mask, double k_sigma) {
  size_t total = 0, covered = 0;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      ++total;
      for (const Gaussian2D& g : sog.gaussians) {
        const double radius = k_sigma * g.sigma;
        if ((g.mu - Vec2(c, r)).squaredNorm() <= radius * radius) {
          ++covered;
          break;
        }
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace sogtrack
