#include "pipeline/sequence.hpp"

#include <algorithm>
#include <stdexcept>

#include "io/png_io.hpp"
#include "io/raw_io.hpp"

namespace sogtrack {

namespace {

void check_count(size_t got, int expected, const char* what) {
  if (static_cast<int>(got) != expected)
    throw std::runtime_error(std::string("manifest frame count mismatch: ") + what + " has " +
                             std::to_string(got) + ", expected " + std::to_string(expected));
}

void check_dims(int w, int h, const SequenceManifest& m, int frame, const std::string& path,
                const char* what) {
  if (w != m.width || h != m.height)
    throw std::runtime_error(std::string(what) + " dimension mismatch at frame " +
                             std::to_string(frame) + ": " + path + " is " + std::to_string(w) +
                             "x" + std::to_string(h) + ", expected " + std::to_string(m.width) +
                             "x" + std::to_string(m.height));
}

}  // namespace

Sequence load_sequence(const std::string& manifest_path) {
  Sequence seq;
  seq.manifest = read_manifest(manifest_path);
  const SequenceManifest& m = seq.manifest;
  check_count(m.images.size(), m.frame_count, "images");
  check_count(m.object_masks.size(), m.frame_count, "object_masks");
  check_count(m.hand_masks.size(), m.frame_count, "hand_masks");
  check_count(m.pointmaps.size(), m.frame_count, "pointmaps");

  for (int t = 0; t < m.frame_count; ++t) {
    seq.images.push_back(read_png(m.images[t]));
    check_dims(seq.images.back().width, seq.images.back().height, m, t, m.images[t], "image");
    seq.object_masks.push_back(read_mask_png(m.object_masks[t]));
    check_dims(seq.object_masks.back().width, seq.object_masks.back().height, m, t,
               m.object_masks[t], "object mask");
    seq.hand_masks.push_back(read_mask_png(m.hand_masks[t]));
    check_dims(seq.hand_masks.back().width, seq.hand_masks.back().height, m, t, m.hand_masks[t],
               "hand mask");
    seq.pointmaps.push_back(read_pointmap_raw(m.pointmaps[t], m.width, m.height));
  }

  seq.cameras = read_cameras(m.cameras);
  check_count(seq.cameras.size(), m.frame_count, "cameras");
  for (int t = 0; t < m.frame_count; ++t)
    check_dims(seq.cameras[t].width, seq.cameras[t].height, m, t, m.cameras, "camera");

  seq.hand = read_hand(m.hand);
  check_count(seq.hand.frames.size(), m.frame_count, "hand frames");
  seq.asset = read_gaussian_ply(m.asset);
  if (!m.initial_trajectory.empty()) {
    seq.initial = read_trajectory(m.initial_trajectory);
    check_count(seq.initial->object.size(), m.frame_count, "initial trajectory");
  }
  return seq;
}

TrajectoryData default_initial_trajectory(const Sequence& seq) {
  TrajectoryData traj;
  traj.object_scale = 1.0;
  traj.hand_scale = seq.hand.scale;
  for (int t = 0; t < seq.frame_count(); ++t) {
    Pose obj;
    const Pointmap& pm = seq.pointmaps[t];
    const Mask& mask = seq.object_masks[t];
    std::vector<double> xs, ys, zs;
    for (int r = 0; r < pm.height; ++r) {
      for (int c = 0; c < pm.width; ++c) {
        if (!pm.valid_at(r, c) || !mask.at(r, c)) continue;
        const Vec3 p = pm.at(r, c);
        xs.push_back(p.x());
        ys.push_back(p.y());
        zs.push_back(p.z());
      }
    }
    if (!xs.empty())
      obj.translation = Vec3(median(xs), median(ys), median(zs));
    traj.object.push_back(obj);
    traj.hand.push_back(seq.hand.poses[t]);
    traj.contact.push_back(seq.hand.frames[t].contact_flag ? 1 : 0);
    traj.failed.push_back(0);
  }
  return traj;
}

}  // namespace sogtrack
