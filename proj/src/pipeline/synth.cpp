#include "pipeline/synth.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "io/png_io.hpp"
#include "io/raw_io.hpp"

namespace sogtrack {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double normal(Rng& rng, double stddev) {
  return std::normal_distribution<double>(0.0, stddev)(rng);
}

Vec3 random_unit(Rng& rng) {
  while (true) {
    const Vec3 v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

// Deterministic spherical Fibonacci directions.
std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> dirs(n);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double y = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double th = golden * i;
    dirs[i] = Vec3(r * std::cos(th), y, r * std::sin(th));
  }
  return dirs;
}

std::vector<Vec3> make_palette(Rng& rng, int n) {
  std::vector<Vec3> colors;
  while (static_cast<int>(colors.size()) < n) {
    const Vec3 c(uniform(rng, 0.08, 0.92), uniform(rng, 0.08, 0.92), uniform(rng, 0.08, 0.92));
    bool ok = true;
    for (const Vec3& p : colors)
      if ((p - c).norm() < 0.35) ok = false;
    if (ok || colors.size() > 200) colors.push_back(c);
  }
  return colors;
}

struct ReliefField {
  struct Wave {
    double amp, freq, dir_x, dir_y, phase;
  };
  std::vector<Wave> waves;
  double operator()(double x, double y, double radius) const {
    double h = 0.0;
    for (const Wave& w : waves)
      h += w.amp * std::sin(w.freq * (w.dir_x * x + w.dir_y * y) / radius + w.phase);
    return h;
  }
};

DenseGaussianAsset make_asset(const SynthSpec& spec, Rng& rng) {
  const SynthObjectSpec& os = spec.object;
  DenseGaussianAsset asset;
  const std::vector<Vec3> palette = make_palette(rng, std::max(1, os.palette));

  if (os.style == "relief") {
    const int grid = std::max(2, static_cast<int>(std::lround(std::sqrt(double(os.count)))));
    const double d = 2.0 * os.radius / (grid - 1);
    ReliefField field;
    for (int k = 0; k < 3; ++k) {
      const double phi = uniform(rng, 0, 2 * M_PI);
      field.waves.push_back({uniform(rng, 0.3, 1.0), uniform(rng, 1.5, 3.5), std::cos(phi),
                             std::sin(phi), uniform(rng, 0, 2 * M_PI)});
    }
    double amp_sum = 0.0;
    for (const auto& w : field.waves) amp_sum += w.amp;
    const double amp = os.height_amplitude * os.radius / std::max(1e-9, amp_sum);

    // Voronoi patch sites for crisp color edges.
    std::vector<Vec2> sites(palette.size());
    for (Vec2& s : sites)
      s = Vec2(uniform(rng, -os.radius, os.radius), uniform(rng, -os.radius, os.radius));

    const double sigma3d = 0.9 * d;
    for (int gy = 0; gy < grid; ++gy) {
      for (int gx = 0; gx < grid; ++gx) {
        const double x = -os.radius + gx * d;
        const double y = -os.radius + gy * d;
        const double z = amp * field(x, y, os.radius);
        size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t p = 0; p < sites.size(); ++p) {
          const double dd = (sites[p] - Vec2(x, y)).squaredNorm();
          if (dd < best_d) {
            best_d = dd;
            best = p;
          }
        }
        asset.centers.push_back(Vec3(x, y, z));
        asset.scales.push_back(Vec3(sigma3d, sigma3d, sigma3d));
        asset.rotations.push_back(Vec4(1, 0, 0, 0));
        asset.opacities.push_back(1.0);
        asset.colors_dc.push_back((palette[best] - Vec3(0.5, 0.5, 0.5)) / kShC0);
      }
    }
  } else if (os.style == "cloud" || os.style == "shell") {
    const double sigma3d = (os.style == "cloud" ? 0.35 : 2.2) * os.radius /
                           std::sqrt(static_cast<double>(std::max(1, os.count)));
    for (int i = 0; i < os.count; ++i) {
      Vec3 p = random_unit(rng);
      if (os.style == "cloud") p *= std::cbrt(uniform(rng, 0.0, 1.0));
      p *= os.radius;
      const Vec3& color = palette[static_cast<size_t>(i) % palette.size()];
      asset.centers.push_back(p);
      asset.scales.push_back(Vec3(sigma3d, sigma3d, sigma3d));
      asset.rotations.push_back(Vec4(1, 0, 0, 0));
      asset.opacities.push_back(1.0);
      asset.colors_dc.push_back((color - Vec3(0.5, 0.5, 0.5)) / kShC0);
    }
  } else {
    throw std::runtime_error("unknown object style: " + os.style);
  }

  // Low-opacity decoys, dropped by the opacity filter downstream.
  const int decoys = static_cast<int>(std::lround(os.low_opacity_fraction * asset.centers.size()));
  for (int i = 0; i < decoys; ++i) {
    asset.centers.push_back(random_unit(rng) * os.radius * 1.5);
    asset.scales.push_back(Vec3(0.3 * os.radius, 0.3 * os.radius, 0.3 * os.radius));
    asset.rotations.push_back(Vec4(1, 0, 0, 0));
    asset.opacities.push_back(0.02);
    asset.colors_dc.push_back(Vec3::Zero());
  }
  return asset;
}

struct GtMotion {
  std::vector<Pose> object;
  std::vector<Pose> hand;  // hand/occluder rigid pose
};

GtMotion make_motion(const SynthSpec& spec, Rng& rng) {
  const int n = spec.frames;
  const double r = spec.object.radius;
  const Vec3 base(0, 0, spec.camera.distance);
  const Vec4 q_base = quat_from_axis_angle(random_unit(rng), uniform(rng, 0, 2 * M_PI));
  const Vec3 rot_axis = random_unit(rng);
  const double rot_amp = spec.trajectory.rotation_amplitude_deg * M_PI / 180.0;
  const double tr_amp = spec.trajectory.translation_amplitude;

  GtMotion gt;
  if (spec.trajectory.family == "spline") {
    Vec3 freq(uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 1.5));
    Vec3 phase(uniform(rng, 0, 2 * M_PI), uniform(rng, 0, 2 * M_PI), uniform(rng, 0, 2 * M_PI));
    const double rphase = uniform(rng, 0, 2 * M_PI);
    for (int t = 0; t < n; ++t) {
      const double u = n > 1 ? static_cast<double>(t) / (n - 1) : 0.0;
      Pose p;
      p.translation = base + tr_amp * Vec3(std::sin(2 * M_PI * freq.x() * u + phase.x()),
                                           std::sin(2 * M_PI * freq.y() * u + phase.y()),
                                           0.5 * std::sin(2 * M_PI * freq.z() * u + phase.z()));
      p.rotation = quat_mul(quat_from_axis_angle(rot_axis, rot_amp * std::sin(2 * M_PI * u + rphase)),
                            q_base);
      gt.object.push_back(p);
    }
  } else if (spec.trajectory.family == "linear") {
    const Vec3 vel = tr_amp * random_unit(rng);
    for (int t = 0; t < n; ++t) {
      const double u = n > 1 ? static_cast<double>(t) / (n - 1) : 0.0;
      Pose p;
      p.translation = base + u * vel;
      p.rotation = quat_mul(quat_from_axis_angle(rot_axis, rot_amp * u), q_base);
      gt.object.push_back(p);
    }
  } else if (spec.trajectory.family == "static") {
    for (int t = 0; t < n; ++t) {
      Pose p;
      p.translation = base;
      p.rotation = q_base;
      gt.object.push_back(p);
    }
  } else {
    throw std::runtime_error("unknown trajectory family: " + spec.trajectory.family);
  }

  // Occluder path.
  const double rho_z = spec.camera.distance - 2.2 * r;  // in front of the object
  for (int t = 0; t < n; ++t) {
    Pose p;
    const double u = n > 1 ? static_cast<double>(t) / (n - 1) : 0.0;
    if (spec.occluder.mode == "none") {
      p.translation = Vec3(8.0 * r, 0, spec.camera.distance);
    } else if (spec.occluder.mode == "parked") {
      p.translation = Vec3(gt.object[t].translation.x(), gt.object[t].translation.y(), rho_z);
    } else if (spec.occluder.mode == "overlay") {
      p.translation = Vec3(gt.object[t].translation.x() + (2.0 * u - 1.0) * 1.2 * r,
                           gt.object[t].translation.y(), rho_z);
    } else {
      throw std::runtime_error("unknown occluder mode: " + spec.occluder.mode);
    }
    gt.hand.push_back(p);
  }
  return gt;
}

struct RenderOut {
  ImageRGB image;
  Mask mask_o;
  Mask mask_h;
  Pointmap pm;
  double occlusion_fraction = 0.0;
};

RenderOut render_frame(const SynthSpec& spec, const DenseGaussianAsset& asset, const Camera& cam,
                       const Pose& obj_pose, const Vec3& hand_center, double hand_radius,
                       Rng& rng) {
  const int w = spec.width, h = spec.height;
  RenderOut out;
  out.image.width = w;
  out.image.height = h;
  out.image.data.assign(static_cast<size_t>(w) * h * 3, 0.1f);
  out.mask_o = make_mask(w, h);
  out.mask_h = make_mask(w, h);
  std::vector<double> depth(static_cast<size_t>(w) * h,
                            std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> label(static_cast<size_t>(w) * h, 0);

  // Posed, projected splats in painter's order (far to near).
  struct Splat {
    Vec2 uv;
    double z;
    double radius_px;
    Vec3 color;
  };
  std::vector<Splat> splats;
  const Vec4 q = quat_normalize(obj_pose.rotation);
  for (size_t i = 0; i < asset.centers.size(); ++i) {
    if (asset.opacities[i] < 0.5) continue;  // decoys are not part of the rendered object
    const Vec3 world = obj_pose.scale * quat_rotate(q, asset.centers[i]) + obj_pose.translation;
    if (world.z() <= 1e-6) continue;
    const double sigma3d = asset.scales[i].mean();
    Splat s;
    s.z = world.z();
    s.uv = Vec2(cam.fx() * world.x() / world.z() + cam.cx(),
                cam.fy() * world.y() / world.z() + cam.cy());
    s.radius_px = std::max(0.9, spec.splat_radius_sigma * cam.favg() * sigma3d / world.z());
    s.color = dc_to_rgb(asset.colors_dc[i]);
    splats.push_back(s);
  }
  std::stable_sort(splats.begin(), splats.end(),
                   [](const Splat& a, const Splat& b) { return a.z > b.z; });

  for (const Splat& s : splats) {
    const int c0 = std::max(0, static_cast<int>(std::floor(s.uv.x() - s.radius_px)));
    const int c1 = std::min(w - 1, static_cast<int>(std::ceil(s.uv.x() + s.radius_px)));
    const int r0 = std::max(0, static_cast<int>(std::floor(s.uv.y() - s.radius_px)));
    const int r1 = std::min(h - 1, static_cast<int>(std::ceil(s.uv.y() + s.radius_px)));
    const double r2 = s.radius_px * s.radius_px;
    for (int rr = r0; rr <= r1; ++rr) {
      for (int cc = c0; cc <= c1; ++cc) {
        const double dx = cc - s.uv.x(), dy = rr - s.uv.y();
        if (dx * dx + dy * dy > r2) continue;
        const size_t idx = static_cast<size_t>(rr) * w + cc;
        depth[idx] = s.z;
        label[idx] = 1;
        out.image.data[3 * idx + 0] = static_cast<float>(s.color.x());
        out.image.data[3 * idx + 1] = static_cast<float>(s.color.y());
        out.image.data[3 * idx + 2] = static_cast<float>(s.color.z());
      }
    }
  }
  const long object_pixels_full =
      std::count(label.begin(), label.end(), static_cast<std::uint8_t>(1));

  // Analytic front-surface sphere for the occluder, depth-tested.
  long covered = 0;
  if (hand_center.z() > 1e-6 && hand_radius > 0.0) {
    const double zc = hand_center.z();
    const Vec2 uvc(cam.fx() * hand_center.x() / zc + cam.cx(),
                   cam.fy() * hand_center.y() / zc + cam.cy());
    const double r_px = cam.favg() * hand_radius / zc;
    const int c0 = std::max(0, static_cast<int>(std::floor(uvc.x() - r_px)));
    const int c1 = std::min(w - 1, static_cast<int>(std::ceil(uvc.x() + r_px)));
    const int r0 = std::max(0, static_cast<int>(std::floor(uvc.y() - r_px)));
    const int r1 = std::min(h - 1, static_cast<int>(std::ceil(uvc.y() + r_px)));
    for (int rr = r0; rr <= r1; ++rr) {
      for (int cc = c0; cc <= c1; ++cc) {
        const double dx = cc - uvc.x(), dy = rr - uvc.y();
        const double d2 = dx * dx + dy * dy;
        if (d2 > r_px * r_px) continue;
        const double lateral = std::sqrt(d2) * zc / cam.favg();
        const double zs =
            zc - std::sqrt(std::max(0.0, hand_radius * hand_radius - lateral * lateral));
        const size_t idx = static_cast<size_t>(rr) * w + cc;
        if (!std::isnan(depth[idx]) && depth[idx] <= zs) continue;
        if (label[idx] == 1) ++covered;
        depth[idx] = zs;
        label[idx] = 2;
        out.image.data[3 * idx + 0] = 0.82f;
        out.image.data[3 * idx + 1] = 0.62f;
        out.image.data[3 * idx + 2] = 0.50f;
      }
    }
  }
  if (object_pixels_full > 0)
    out.occlusion_fraction = static_cast<double>(covered) / object_pixels_full;

  // Masks, noise, pointmap.
  out.pm.width = w;
  out.pm.height = h;
  out.pm.points.assign(static_cast<size_t>(w) * h * 3,
                       std::numeric_limits<float>::quiet_NaN());
  out.pm.validity.assign(static_cast<size_t>(w) * h, 0);
  for (int rr = 0; rr < h; ++rr) {
    for (int cc = 0; cc < w; ++cc) {
      const size_t idx = static_cast<size_t>(rr) * w + cc;
      if (label[idx] == 1) out.mask_o.data[idx] = 1;
      if (label[idx] == 2) out.mask_h.data[idx] = 1;
      if (label[idx] != 0) {
        double z = depth[idx];
        if (spec.noise.depth > 0.0) z += normal(rng, spec.noise.depth);
        out.pm.points[3 * idx + 0] = static_cast<float>((cc - cam.cx()) * z / cam.fx());
        out.pm.points[3 * idx + 1] = static_cast<float>((rr - cam.cy()) * z / cam.fy());
        out.pm.points[3 * idx + 2] = static_cast<float>(z);
        out.pm.validity[idx] = 1;
      }
    }
  }
  if (spec.noise.color > 0.0)
    for (float& v : out.image.data)
      v = std::clamp(v + static_cast<float>(normal(rng, spec.noise.color)), 0.0f, 1.0f);
  if (spec.noise.mask > 0.0) {
    for (size_t i = 0; i < out.mask_o.data.size(); ++i) {
      if (uniform(rng, 0, 1) < spec.noise.mask) out.mask_o.data[i] ^= 1;
      if (uniform(rng, 0, 1) < spec.noise.mask) out.mask_h.data[i] ^= 1;
    }
  }
  return out;
}

std::string frame_name(const char* stem, int t, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, t, ext);
  return buf;
}

}  // namespace

SynthSpec synth_spec_from_json(const Json& j) {
  SynthSpec s;
  s.seed = j.value("seed", s.seed);
  s.frames = j.value("frames", s.frames);
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.fps = j.value("fps", s.fps);
  s.splat_radius_sigma = j.value("splat_radius_sigma", s.splat_radius_sigma);
  if (j.contains("object")) {
    const Json& o = j.at("object");
    s.object.style = o.value("style", s.object.style);
    s.object.count = o.value("count", s.object.count);
    s.object.radius = o.value("radius", s.object.radius);
    s.object.height_amplitude = o.value("height_amplitude", s.object.height_amplitude);
    s.object.palette = o.value("palette", s.object.palette);
    s.object.low_opacity_fraction = o.value("low_opacity_fraction", s.object.low_opacity_fraction);
  }
  if (j.contains("camera")) {
    s.camera.focal = j.at("camera").value("focal", s.camera.focal);
    s.camera.distance = j.at("camera").value("distance", s.camera.distance);
  }
  if (j.contains("trajectory")) {
    const Json& t = j.at("trajectory");
    s.trajectory.family = t.value("family", s.trajectory.family);
    s.trajectory.translation_amplitude =
        t.value("translation_amplitude", s.trajectory.translation_amplitude);
    s.trajectory.rotation_amplitude_deg =
        t.value("rotation_amplitude_deg", s.trajectory.rotation_amplitude_deg);
  }
  if (j.contains("occluder")) {
    s.occluder.mode = j.at("occluder").value("mode", s.occluder.mode);
    s.occluder.radius_fraction = j.at("occluder").value("radius_fraction", s.occluder.radius_fraction);
  }
  if (j.contains("noise")) {
    s.noise.color = j.at("noise").value("color", s.noise.color);
    s.noise.depth = j.at("noise").value("depth", s.noise.depth);
    s.noise.mask = j.at("noise").value("mask", s.noise.mask);
  }
  if (j.contains("init")) {
    s.init.rotation_deg = j.at("init").value("rotation_deg", s.init.rotation_deg);
    s.init.translation_fraction =
        j.at("init").value("translation_fraction", s.init.translation_fraction);
  }
  return s;
}

SynthResult synth_scene(const SynthSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "frames");
  fs::create_directories(fs::path(out_dir) / "masks_o");
  fs::create_directories(fs::path(out_dir) / "masks_h");
  fs::create_directories(fs::path(out_dir) / "pm");
  Rng rng(spec.seed);

  // Asset and camera.
  const DenseGaussianAsset asset = make_asset(spec, rng);
  write_gaussian_ply((fs::path(out_dir) / "asset.ply").string(), asset);

  Camera cam;
  cam.intrinsics << spec.camera.focal, 0, (spec.width - 1) / 2.0, 0, spec.camera.focal,
      (spec.height - 1) / 2.0, 0, 0, 1;
  cam.extrinsics = Mat4::Identity();
  cam.width = spec.width;
  cam.height = spec.height;
  write_cameras((fs::path(out_dir) / "cameras.json").string(),
                std::vector<Camera>(spec.frames, cam));

  // Motion and hand geometry.
  const GtMotion motion = make_motion(spec, rng);
  const double rho = spec.occluder.radius_fraction * spec.object.radius;
  const std::vector<Vec3> joint_dirs = fibonacci_sphere(20);
  const std::vector<Vec3> vertex_dirs = fibonacci_sphere(200);

  HandTrack hand;
  hand.scale = 1.0;
  for (int t = 0; t < spec.frames; ++t) {
    HandFrame hf;
    hf.local_joints.push_back(Vec3::Zero());
    for (const Vec3& d : joint_dirs) hf.local_joints.push_back(0.92 * rho * d);
    for (const Vec3& d : vertex_dirs) hf.local_vertices.push_back(rho * d);
    for (const Vec3& lj : hf.local_joints) {
      const Vec3 world = lj + motion.hand[t].translation;
      if (world.z() > 1e-6) {
        hf.detected_joints_2d.push_back(Vec3(cam.fx() * world.x() / world.z() + cam.cx(),
                                             cam.fy() * world.y() / world.z() + cam.cy(), 1.0));
      } else {
        hf.detected_joints_2d.push_back(Vec3(0, 0, 0));
      }
    }
    hf.contact_flag = false;
    hand.frames.push_back(std::move(hf));
    Pose hp = motion.hand[t];
    hp.scale = 1.0;
    hand.poses.push_back(hp);
  }
  write_hand((fs::path(out_dir) / "hand.json").string(), hand);

  // Frames.
  SynthResult result;
  const bool draw_hand = spec.occluder.mode != "none";
  Eigen::MatrixXd features(spec.frames, 48);
  for (int t = 0; t < spec.frames; ++t) {
    RenderOut ro = render_frame(spec, asset, cam, motion.object[t],
                                draw_hand ? motion.hand[t].translation : Vec3(0, 0, -1.0),
                                draw_hand ? rho : 0.0, rng);
    result.occlusion_fraction.push_back(ro.occlusion_fraction);
    write_png((fs::path(out_dir) / "frames" / frame_name("img", t, "png")).string(), ro.image);
    write_mask_png((fs::path(out_dir) / "masks_o" / frame_name("m", t, "png")).string(), ro.mask_o);
    write_mask_png((fs::path(out_dir) / "masks_h" / frame_name("h", t, "png")).string(), ro.mask_h);
    write_pointmap_raw((fs::path(out_dir) / "pm" / frame_name("pm", t, "raw")).string(), ro.pm);

    // 4x4 grid of mean colors over the object bbox as a frame descriptor.
    int r0 = spec.height, r1 = -1, c0 = spec.width, c1 = -1;
    for (int r = 0; r < spec.height; ++r)
      for (int c = 0; c < spec.width; ++c)
        if (ro.mask_o.at(r, c)) {
          r0 = std::min(r0, r);
          r1 = std::max(r1, r);
          c0 = std::min(c0, c);
          c1 = std::max(c1, c);
        }
    features.row(t).setZero();
    if (r1 >= r0) {
      for (int gy = 0; gy < 4; ++gy)
        for (int gx = 0; gx < 4; ++gx) {
          Vec3 acc = Vec3::Zero();
          long cnt = 0;
          for (int r = r0 + (r1 - r0 + 1) * gy / 4; r < r0 + (r1 - r0 + 1) * (gy + 1) / 4; ++r)
            for (int c = c0 + (c1 - c0 + 1) * gx / 4; c < c0 + (c1 - c0 + 1) * (gx + 1) / 4; ++c) {
              if (!ro.mask_o.at(r, c)) continue;
              const size_t idx = static_cast<size_t>(r) * spec.width + c;
              acc += Vec3(ro.image.data[3 * idx], ro.image.data[3 * idx + 1],
                          ro.image.data[3 * idx + 2]);
              ++cnt;
            }
          if (cnt > 0) acc /= static_cast<double>(cnt);
          features(t, 3 * (4 * gy + gx) + 0) = acc.x();
          features(t, 3 * (4 * gy + gx) + 1) = acc.y();
          features(t, 3 * (4 * gy + gx) + 2) = acc.z();
        }
    }
  }
  write_features((fs::path(out_dir) / "features.json").string(),
                 (fs::path(out_dir) / "features.raw").string(), features, {});

  // Ground truth trajectory.
  TrajectoryData gt;
  gt.object_scale = 1.0;
  gt.hand_scale = 1.0;
  for (int t = 0; t < spec.frames; ++t) {
    Pose po = motion.object[t];
    po.scale = 1.0;
    gt.object.push_back(po);
    gt.hand.push_back(hand.poses[t]);
    gt.contact.push_back(0);
    gt.failed.push_back(0);
  }
  gt.diagnostics = Json{{"occlusion_fraction", result.occlusion_fraction},
                        {"object_radius", spec.object.radius},
                        {"object_diameter", 2.0 * spec.object.radius}};
  const std::string gt_path = (fs::path(out_dir) / "gt_trajectory.json").string();
  write_trajectory(gt_path, gt);

  // Initial trajectory: ground truth with seeded object-pose perturbations.
  TrajectoryData init = gt;
  init.diagnostics = Json::object();
  if (spec.init.rotation_deg > 0.0 || spec.init.translation_fraction > 0.0) {
    const double diameter = 2.0 * spec.object.radius;
    for (int t = 0; t < spec.frames; ++t) {
      const double ang = spec.init.rotation_deg * uniform(rng, 0.5, 1.0) * M_PI / 180.0;
      init.object[t].rotation =
          quat_mul(quat_from_axis_angle(random_unit(rng), ang), init.object[t].rotation);
      init.object[t].translation +=
          spec.init.translation_fraction * diameter * uniform(rng, 0.5, 1.0) * random_unit(rng);
    }
  }
  const std::string init_path = (fs::path(out_dir) / "init_trajectory.json").string();
  write_trajectory(init_path, init);

  // Manifest with paths relative to out_dir.
  SequenceManifest m;
  m.frame_count = spec.frames;
  m.width = spec.width;
  m.height = spec.height;
  m.fps = spec.fps;
  m.seed = spec.seed;
  for (int t = 0; t < spec.frames; ++t) {
    m.images.push_back("frames/" + frame_name("img", t, "png"));
    m.object_masks.push_back("masks_o/" + frame_name("m", t, "png"));
    m.hand_masks.push_back("masks_h/" + frame_name("h", t, "png"));
    m.pointmaps.push_back("pm/" + frame_name("pm", t, "raw"));
  }
  m.cameras = "cameras.json";
  m.hand = "hand.json";
  m.asset = "asset.ply";
  m.features = "features.json";
  m.initial_trajectory = "init_trajectory.json";
  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  write_manifest(manifest_path, m);

  result.manifest_path = manifest_path;
  result.gt_path = gt_path;
  result.init_path = init_path;
  result.manifest = read_manifest(manifest_path);
  result.gt = gt;
  return result;
}

}  // namespace sogtrack
