#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <vector>

namespace sogtrack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Isotropic 2D Gaussian in pixel coordinates, mu = (column, row).
struct Gaussian2D {
  Vec2 mu = Vec2::Zero();
  double sigma = 1.0;
  Vec3 color = Vec3::Zero();  // RGB in [0,1]
  double weight = 1.0;
};

// Isotropic 3D Gaussian in object (canonical) coordinates, units meters.
struct Gaussian3D {
  Vec3 mu = Vec3::Zero();
  double sigma = 0.01;
  Vec3 color = Vec3::Zero();
  double weight = 1.0;
};

// Similarity pose: x_world = scale * R(rotation) * x + translation.
// Quaternion layout is (w, x, y, z), scalar first.
struct Pose {
  Vec4 rotation = Vec4(1, 0, 0, 0);
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;
};

// Pinhole camera. extrinsics maps world points to camera coordinates.
struct Camera {
  Mat3 intrinsics = Mat3::Identity();
  Mat4 extrinsics = Mat4::Identity();
  int width = 0;
  int height = 0;

  double fx() const { return intrinsics(0, 0); }
  double fy() const { return intrinsics(1, 1); }
  double cx() const { return intrinsics(0, 2); }
  double cy() const { return intrinsics(1, 2); }
  double favg() const { return 0.5 * (fx() + fy()); }
};

// Quaternion helpers. All take (w, x, y, z) vectors; inputs need not be
// normalized unless stated. quat_normalize throws on near-zero norm.
Vec4 quat_normalize(const Vec4& q);
Vec4 quat_mul(const Vec4& a, const Vec4& b);
Vec4 quat_conjugate(const Vec4& q);
Vec4 quat_from_axis_angle(const Vec3& axis, double angle_rad);
Vec3 quat_rotate(const Vec4& q_unit, const Vec3& x);
Mat3 quat_to_matrix(const Vec4& q_unit);
Vec4 quat_from_matrix(const Mat3& r);

// Geodesic angle between two rotations in degrees; sign-insensitive.
double quat_angle_deg(const Vec4& a, const Vec4& b);

// Flips quaternion signs in place so consecutive dot products are >= 0.
void fix_quaternion_trajectory(std::vector<Vec4>& rotations);

Vec3 apply_pose(const Pose& pose, const Vec3& x);
Pose pose_inverse(const Pose& pose);
Pose pose_compose(const Pose& a, const Pose& b);  // a after b: a(b(x))

// Projects a world point. Throws "behind camera" when the camera-space depth
// is not positive.
struct Projection {
  Vec2 uv = Vec2::Zero();
  double depth = 0.0;
};
Projection project_point(const Camera& cam, const Vec3& x_world);

// Camera-space point without the positivity check.
Vec3 to_camera(const Camera& cam, const Vec3& x_world);

// Projects a posed 3D Gaussian; sigma_2d = favg * (pose.scale * sigma) / depth.
Gaussian2D project_gaussian(const Camera& cam, const Pose& pose, const Gaussian3D& g);

inline bool inside_image(const Camera& cam, const Vec2& uv) {
  return uv.x() >= 0.0 && uv.y() >= 0.0 && uv.x() < cam.width && uv.y() < cam.height;
}

}  // namespace sogtrack
