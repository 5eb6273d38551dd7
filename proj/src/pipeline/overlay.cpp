#include "pipeline/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "io/png_io.hpp"

namespace sogtrack {

ImageRGB render_overlay(const ImageRGB& frame, const ProjectedSoG& projected) {
  ImageRGB out = frame;
  std::vector<size_t> order(projected.gaussians.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return projected.depths[a] > projected.depths[b];
  });
  for (size_t k : order) {
    const Gaussian2D& g = projected.gaussians[k];
    const double radius = 2.5 * g.sigma;
    const int c0 = std::max(0, static_cast<int>(std::floor(g.mu.x() - radius)));
    const int c1 = std::min(out.width - 1, static_cast<int>(std::ceil(g.mu.x() + radius)));
    const int r0 = std::max(0, static_cast<int>(std::floor(g.mu.y() - radius)));
    const int r1 = std::min(out.height - 1, static_cast<int>(std::ceil(g.mu.y() + radius)));
    const double inv = 1.0 / (2.0 * g.sigma * g.sigma);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double dx = c - g.mu.x(), dy = r - g.mu.y();
        const double a = 0.75 * std::exp(-(dx * dx + dy * dy) * inv);
        if (a < 0.02) continue;
        float* px = out.data.data() + 3 * (static_cast<size_t>(r) * out.width + c);
        for (int ch = 0; ch < 3; ++ch)
          px[ch] = static_cast<float>((1.0 - a) * px[ch] + a * g.color[ch]);
      }
    }
  }
  return out;
}

void run_overlay(const Sequence& seq, const TrajectoryData& traj, const TrackConfig& config,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (traj.frame_count() < seq.frame_count())
    throw std::runtime_error("trajectory length mismatch");
  fs::create_directories(out_dir);
  int population = 0;
  for (double op : seq.asset.opacities) population += op >= config.min_opacity;
  if (population < 1) throw std::runtime_error("no object surface samples");
  const ObjectSoG object = to_object_sog(seq.asset, std::min(config.object_count, population),
                                         config.sigma_factor, config.min_opacity);
  for (int t = 0; t < seq.frame_count(); ++t) {
    Pose pose = traj.object[t];
    pose.scale = traj.object_scale;
    const ProjectedSoG projected = project_sog(object, pose, seq.cameras[t]);
    const ImageRGB composite = render_overlay(seq.images[t], projected);
    char name[32];
    std::snprintf(name, sizeof(name), "overlay_%04d.png", t);
    write_png((fs::path(out_dir) / name).string(), composite);
  }
}

}  // namespace sogtrack
