#include "core/geometry.hpp"

#include <cmath>

namespace sogtrack {

Vec4 quat_normalize(const Vec4& q) {
  const double n = q.norm();
  if (n < 1e-12) throw std::runtime_error("degenerate quaternion");
  return q / n;
}

Vec4 quat_mul(const Vec4& a, const Vec4& b) {
  const double aw = a[0], ax = a[1], ay = a[2], az = a[3];
  const double bw = b[0], bx = b[1], by = b[2], bz = b[3];
  return Vec4(aw * bw - ax * bx - ay * by - az * bz,
              aw * bx + ax * bw + ay * bz - az * by,
              aw * by - ax * bz + ay * bw + az * bx,
              aw * bz + ax * by - ay * bx + az * bw);
}

Vec4 quat_conjugate(const Vec4& q) { return Vec4(q[0], -q[1], -q[2], -q[3]); }

Vec4 quat_from_axis_angle(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (n < 1e-12) return Vec4(1, 0, 0, 0);
  const Vec3 u = axis / n;
  const double h = 0.5 * angle_rad;
  return Vec4(std::cos(h), std::sin(h) * u.x(), std::sin(h) * u.y(), std::sin(h) * u.z());
}

Vec3 quat_rotate(const Vec4& q, const Vec3& x) {
  const double w = q[0];
  const Vec3 v(q[1], q[2], q[3]);
  // R(q) x = (w^2 - v.v) x + 2 (v.x) v + 2 w (v x x), valid for unit q.
  return (w * w - v.squaredNorm()) * x + 2.0 * v.dot(x) * v + 2.0 * w * v.cross(x);
}

Mat3 quat_to_matrix(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Vec4 quat_from_matrix(const Mat3& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  return Vec4(q.w(), q.x(), q.y(), q.z());
}

double quat_angle_deg(const Vec4& a, const Vec4& b) {
  const Vec4 an = quat_normalize(a);
  const Vec4 bn = quat_normalize(b);
  const double d = std::min(1.0, std::abs(an.dot(bn)));
  return 2.0 * std::acos(d) * 180.0 / M_PI;
}

void fix_quaternion_trajectory(std::vector<Vec4>& rotations) {
  for (size_t t = 1; t < rotations.size(); ++t) {
    if (rotations[t].dot(rotations[t - 1]) < 0.0) rotations[t] = -rotations[t];
  }
}

Vec3 apply_pose(const Pose& pose, const Vec3& x) {
  const Vec4 q = quat_normalize(pose.rotation);
  return pose.scale * quat_rotate(q, x) + pose.translation;
}

Pose pose_inverse(const Pose& pose) {
  Pose inv;
  const Vec4 q = quat_normalize(pose.rotation);
  inv.rotation = quat_conjugate(q);
  inv.scale = 1.0 / pose.scale;
  inv.translation = -inv.scale * quat_rotate(inv.rotation, pose.translation);
  return inv;
}

Pose pose_compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = quat_normalize(quat_mul(quat_normalize(a.rotation), quat_normalize(b.rotation)));
  out.scale = a.scale * b.scale;
  out.translation = a.scale * quat_rotate(quat_normalize(a.rotation), b.translation) + a.translation;
  return out;
}

Vec3 to_camera(const Camera& cam, const Vec3& x_world) {
  return cam.extrinsics.topLeftCorner<3, 3>() * x_world + cam.extrinsics.topRightCorner<3, 1>();
}

Projection project_point(const Camera& cam, const Vec3& x_world) {
  const Vec3 c = to_camera(cam, x_world);
  if (c.z() <= 1e-9) throw std::runtime_error("behind camera");
  Projection p;
  p.uv = Vec2(cam.fx() * c.x() / c.z() + cam.cx(), cam.fy() * c.y() / c.z() + cam.cy());
  p.depth = c.z();
  return p;
}

Gaussian2D project_gaussian(const Camera& cam, const Pose& pose, const Gaussian3D& g) {
  const Projection p = project_point(cam, apply_pose(pose, g.mu));
  Gaussian2D out;
  out.mu = p.uv;
  out.sigma = cam.favg() * (pose.scale * g.sigma) / p.depth;
  out.color = g.color;
  out.weight = g.weight;
  return out;
}

}  // namespace sogtrack
