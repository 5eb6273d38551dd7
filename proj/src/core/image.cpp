#include "core/image.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sogtrack {

size_t Mask::count() const {
  return static_cast<size_t>(std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

Mask make_mask(int width, int height) {
  Mask m;
  m.width = width;
  m.height = height;
  m.data.assign(static_cast<size_t>(width) * height, 0);
  return m;
}

Mask erode_mask(const Mask& m, int iterations) {
  Mask cur = m;
  for (int it = 0; it < iterations; ++it) {
    Mask next = make_mask(cur.width, cur.height);
    for (int r = 0; r < cur.height; ++r) {
      for (int c = 0; c < cur.width; ++c) {
        bool keep = cur.at(r, c);
        for (int dr = -1; dr <= 1 && keep; ++dr) {
          for (int dc = -1; dc <= 1 && keep; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || cc < 0 || rr >= cur.height || cc >= cur.width || !cur.at(rr, cc)) keep = false;
          }
        }
        next.set(r, c, keep);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

DownsampledMask downsample_mask(const Mask& m, int factor) {
  if (factor < 1) throw std::runtime_error("downsample factor must be positive");
  DownsampledMask out;
  out.width = (m.width + factor - 1) / factor;
  out.height = (m.height + factor - 1) / factor;
  out.data.assign(static_cast<size_t>(out.width) * out.height, 0.0);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      const int r0 = r * factor, c0 = c * factor;
      const int r1 = std::min(m.height, r0 + factor), c1 = std::min(m.width, c0 + factor);
      double sum = 0.0;
      for (int rr = r0; rr < r1; ++rr)
        for (int cc = c0; cc < c1; ++cc) sum += m.at(rr, cc) ? 1.0 : 0.0;
      out.data[static_cast<size_t>(r) * out.width + c] = sum / ((r1 - r0) * (c1 - c0));
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("median of empty set");
  const size_t n = values.size();
  const size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

}  // namespace sogtrack
