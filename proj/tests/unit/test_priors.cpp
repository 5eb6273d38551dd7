#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "priors/priors.hpp"

using namespace sogtrack;

namespace {

Camera test_camera() {
  Camera cam;
  cam.intrinsics << 100, 0, 32, 0, 100, 32, 0, 0, 1;
  cam.width = 64;
  cam.height = 64;
  return cam;
}

HandFrame grid_hand(int per_side = 5, double half = 0.1) {
  HandFrame h;
  for (int i = 0; i < 21; ++i) h.local_joints.push_back(Vec3(0.01 * i, 0.0, 0.0));
  for (int r = 0; r < per_side; ++r)
    for (int c = 0; c < per_side; ++c)
      h.local_vertices.push_back(
          Vec3(-half + 2 * half * c / (per_side - 1), -half + 2 * half * r / (per_side - 1), 0.0));
  return h;
}

Pointmap empty_pointmap(int w, int h) {
  Pointmap pm;
  pm.width = w;
  pm.height = h;
  pm.points.assign(static_cast<size_t>(w) * h * 3, std::numeric_limits<float>::quiet_NaN());
  pm.validity.assign(static_cast<size_t>(w) * h, 0);
  return pm;
}

void set_point(Pointmap& pm, int row, int col, const Vec3& p) {
  float* dst = pm.points.data() + 3 * (static_cast<size_t>(row) * pm.width + col);
  dst[0] = static_cast<float>(p.x());
  dst[1] = static_cast<float>(p.y());
  dst[2] = static_cast<float>(p.z());
  pm.validity[static_cast<size_t>(row) * pm.width + col] = 1;
}

Mask full_mask(int w, int h) {
  Mask m = make_mask(w, h);
  std::fill(m.data.begin(), m.data.end(), 1);
  return m;
}

}  // namespace

TEST_CASE("reprojection loss") {
  const Camera cam = test_camera();
  Pose pose;
  pose.translation = Vec3(0, 0, 1);
  HandFrame hand = grid_hand();
  for (const Vec3& j : hand.local_joints) {
    const Projection p = project_point(cam, apply_pose(pose, j));
    hand.detected_joints_2d.push_back(Vec3(p.uv.x(), p.uv.y(), 1.0));
  }
  CHECK(loss_j2d(hand, pose, cam) == doctest::Approx(0.0));

  HandFrame off = hand;
  off.detected_joints_2d[7] += Vec3(3, 4, 0);
  CHECK(loss_j2d(off, pose, cam) == doctest::Approx(25.0).epsilon(1e-12));

  HandFrame zero_conf = off;
  for (auto& d : zero_conf.detected_joints_2d) d.z() = 0.0;
  CHECK(loss_j2d(zero_conf, pose, cam) == 0.0);

  // A joint behind the camera adds the fixed penalty instead of throwing.
  HandFrame behind = hand;
  behind.local_joints[0] = Vec3(0, 0, -5);
  CHECK(loss_j2d(behind, pose, cam) == doctest::Approx(kBehindCameraPenalty).epsilon(1e-9));
}

TEST_CASE("depth statistics and loss") {
  const Camera cam = test_camera();
  Mask mask_o = make_mask(64, 64);
  for (int r = 20; r < 44; ++r)
    for (int c = 20; c < 44; ++c) mask_o.set(r, c, true);
  const Mask mask_h = make_mask(64, 64);

  std::vector<Gaussian2D> proj(3);
  std::vector<double> depths{0.9, 1.0, 1.1};
  for (int i = 0; i < 3; ++i) proj[i].mu = Vec2(30 + i, 30);
  VisibilityFlags vis;
  vis.flags.assign(3, 1);

  const RenderedDepthStats stats =
      render_depth_stats(proj, depths, vis, mask_o, {}, cam, mask_h);
  CHECK(stats.object_valid);
  CHECK(stats.object_mean == doctest::Approx(1.0));
  CHECK_FALSE(stats.hand_valid);

  // 0.9375 is exactly representable in the pointmap's float storage.
  Pointmap pm = empty_pointmap(64, 64);
  for (int r = 20; r < 44; ++r)
    for (int c = 20; c < 44; ++c) set_point(pm, r, c, Vec3(0.0, 0.0, 0.9375));
  CHECK(loss_depth(stats, pm, cam, mask_o, mask_h) == doctest::Approx(0.0625).epsilon(1e-9));

  for (int r = 20; r < 44; ++r)
    for (int c = 20; c < 44; ++c) set_point(pm, r, c, Vec3(0.0, 0.0, 1.0));
  CHECK(loss_depth(stats, pm, cam, mask_o, mask_h) == doctest::Approx(0.0));

  const Pointmap none = empty_pointmap(64, 64);
  CHECK(loss_depth(stats, none, cam, mask_o, mask_h) == doctest::Approx(0.0));

  // Median robustness: corrupting under half the pixels moves the median only
  // within the clean value range.
  Pointmap corrupt = pm;
  int flipped = 0;
  for (int r = 20; r < 44 && flipped < 250; ++r)
    for (int c = 20; c < 44 && flipped < 250; ++c, ++flipped)
      set_point(corrupt, r, c, Vec3(0.0, 0.0, 500.0));
  const double med = *pointmap_depth_median(corrupt, mask_o, cam);
  CHECK(med == doctest::Approx(1.0));
}

TEST_CASE("silhouette rendering") {
  CHECK(render_silhouette({}, 64, 64, 4).data ==
        std::vector<double>(16 * 16, 0.0));

  std::vector<Gaussian2D> one(1);
  one[0].mu = Vec2(32, 32);
  one[0].sigma = 10.0;
  const OccupancyMap occ = render_silhouette(one, 64, 64, 4);
  const double at_center = occ.at(8, 8);
  for (int r = 0; r < occ.height; ++r)
    for (int c = 0; c < occ.width; ++c) CHECK(occ.at(r, c) <= at_center + 1e-12);

  // Overlapping contributions clamp at 1.
  std::vector<Gaussian2D> many(4, one[0]);
  CHECK(render_silhouette(many, 64, 64, 4).at(8, 8) == 1.0);
}

TEST_CASE("silhouette loss") {
  Mask mask = make_mask(16, 16);
  OccupancyMap occ;
  occ.width = 4;
  occ.height = 4;
  occ.data.assign(16, 0.0);
  CHECK(loss_sil(occ, mask, 4) == doctest::Approx(0.0));

  occ.data.assign(16, 1.0);
  CHECK(loss_sil(occ, mask, 4) == doctest::Approx(1.0));

  // Horizontal flip of both map and mask leaves the loss unchanged.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mask half = make_mask(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) half.set(r, c, u(rng) < 0.5);
  for (auto& v : occ.data) v = u(rng);
  const double base = loss_sil(occ, half, 4);

  Mask flipped_mask = make_mask(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) flipped_mask.set(r, 15 - c, half.at(r, c));
  OccupancyMap flipped = occ;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) flipped.data[r * 4 + (3 - c)] = occ.at(r, c);
  CHECK(loss_sil(flipped, flipped_mask, 4) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("contact loss") {
  HandFrame hand = grid_hand();
  hand.contact_flag = true;
  Pose pose_h, pose_o;
  pose_h.translation = Vec3(0, 0, 1);
  pose_o.translation = Vec3(0, 0, 1);

  // Object points coincide with the first contact vertex.
  const std::vector<int> indices{0, 1};
  const std::vector<Vec3> object_local{hand.local_vertices[0],
                                       hand.local_vertices[1] + Vec3(0.01, 0, 0)};
  const double l = loss_contact(hand, pose_h, object_local, pose_o, indices);
  CHECK(l == doctest::Approx(0.5 * 1e-4).epsilon(1e-9));

  const std::vector<Vec3> exact{hand.local_vertices[0], hand.local_vertices[1]};
  CHECK(loss_contact(hand, pose_h, exact, pose_o, indices) == doctest::Approx(0.0));

  CHECK_THROWS_WITH_AS(loss_contact(hand, pose_h, {}, pose_o, indices),
                       "no object surface samples", std::runtime_error);

  // Default contact set: fingertip joints of the 21-joint convention.
  HandFrame joints_only = hand;
  joints_only.local_vertices.clear();
  const std::vector<Vec3> tips{joints_only.local_joints[4], joints_only.local_joints[8],
                               joints_only.local_joints[12], joints_only.local_joints[16],
                               joints_only.local_joints[20]};
  CHECK(loss_contact(joints_only, pose_h, tips, pose_o, {}) == doctest::Approx(0.0));
}

TEST_CASE("smoothness loss") {
  std::vector<Pose> constant(5);
  for (auto& p : constant) p.translation = Vec3(1, 2, 3);
  CHECK(loss_smooth(constant) == doctest::Approx(0.0));

  std::vector<Pose> linear(5);
  for (int t = 0; t < 5; ++t) linear[t].translation = Vec3(0.1 * t, -0.2 * t, 0.0);
  CHECK(loss_smooth(linear) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK(loss_smooth({Pose{}, Pose{}}) == 0.0);

  // Quaternion sign flips do not affect the loss.
  std::vector<Pose> signs(4);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& p : signs) {
    p.rotation = quat_normalize(Vec4(2 + n(rng) * 0.05, n(rng) * 0.05, n(rng) * 0.05, 0));
    p.translation = Vec3(n(rng), n(rng), n(rng));
  }
  std::vector<Pose> flipped = signs;
  flipped[1].rotation = -flipped[1].rotation;
  flipped[3].rotation = -flipped[3].rotation;
  CHECK(loss_smooth(flipped) == doctest::Approx(loss_smooth(signs)).epsilon(1e-12));

  // An accelerating trajectory scores above zero.
  std::vector<Pose> bent = linear;
  bent[2].translation += Vec3(0.05, 0, 0);
  CHECK(loss_smooth(bent) > 0.0);
}

TEST_CASE("hand depth alignment") {
  const Camera cam = test_camera();
  HandFrame hand = grid_hand();
  Pose pose;
  pose.translation = Vec3(0, 0, 1);

  const Mask mask = full_mask(64, 64);
  Pointmap aligned = empty_pointmap(64, 64);
  Pointmap doubled = empty_pointmap(64, 64);
  for (const Vec3& v : hand.local_vertices) {
    const Vec3 world = apply_pose(pose, v);
    const Projection p = project_point(cam, world);
    const int col = static_cast<int>(std::lround(p.uv.x()));
    const int row = static_cast<int>(std::lround(p.uv.y()));
    set_point(aligned, row, col, world);
    set_point(doubled, row, col, 2.0 * world);
  }

  const HandAlignment a = hand_depth_align({hand}, {pose}, {aligned}, {mask}, {cam});
  CHECK(a.reference_frame == 0);
  CHECK(a.scale == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.translation.norm() < 1e-6);
  CHECK(a.sample_count > 0);

  const HandAlignment d = hand_depth_align({hand}, {pose}, {doubled}, {mask}, {cam});
  CHECK(d.scale == doctest::Approx(2.0).epsilon(1e-6));
  // New frame translation = old + delta must equal the doubled posed center.
  CHECK(((pose.translation + d.translation) - 2.0 * pose.translation).norm() < 1e-6);

  const Pointmap invalid = empty_pointmap(64, 64);
  CHECK_THROWS_WITH_AS(hand_depth_align({hand}, {pose}, {invalid}, {mask}, {cam}),
                       "hand depth alignment failed: no pointmap support", std::runtime_error);
}

TEST_CASE("hand point selection") {
  HandFrame with_verts = grid_hand();
  CHECK(&hand_points(with_verts) == &with_verts.local_vertices);
  HandFrame joints_only = with_verts;
  joints_only.local_vertices.clear();
  CHECK(&hand_points(joints_only) == &joints_only.local_joints);
}
