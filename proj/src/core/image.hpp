#pragma once

#include <cstdint>
#include <vector>

namespace sogtrack {

// Row-major RGB image with channels interleaved, values in [0,1].
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // height * width * 3

  float* pixel(int row, int col) { return data.data() + 3 * (static_cast<size_t>(row) * width + col); }
  const float* pixel(int row, int col) const {
    return data.data() + 3 * (static_cast<size_t>(row) * width + col);
  }
};

// Binary mask, nonzero means inside.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // height * width

  bool at(int row, int col) const { return data[static_cast<size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v) { data[static_cast<size_t>(row) * width + col] = v ? 1 : 0; }
  size_t count() const;
  bool empty_mask() const { return count() == 0; }
};

Mask make_mask(int width, int height);

// Morphological erosion with a full 3x3 structuring element; pixels outside
// the image count as background.
Mask erode_mask(const Mask& m, int iterations);

// Block mean over d x d cells; edge cells average over the pixels present.
// Result is row-major with ceil(height/d) rows and ceil(width/d) columns.
struct DownsampledMask {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
};
DownsampledMask downsample_mask(const Mask& m, int factor);

// Exact median; even-sized input averages the two central values. Throws on
// empty input.
double median(std::vector<double> values);

}  // namespace sogtrack
