#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace sogtrack {

namespace {

double nearest_distance(const Vec3& p, const std::vector<Vec3>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& q : set) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

}  // namespace

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw std::runtime_error("empty point set");
  double sum_ab = 0.0, sum_ba = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum_ab)
  for (long i = 0; i < static_cast<long>(a.size()); ++i) sum_ab += nearest_distance(a[i], b);
#pragma omp parallel for schedule(static) reduction(+ : sum_ba)
  for (long i = 0; i < static_cast<long>(b.size()); ++i) sum_ba += nearest_distance(b[i], a);
  return 0.5 * (sum_ab / a.size() + sum_ba / b.size());
}

double f_score(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double threshold_m) {
  if (a.empty() || b.empty()) throw std::runtime_error("empty point set");
  long hits_a = 0, hits_b = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits_a)
  for (long i = 0; i < static_cast<long>(a.size()); ++i)
    if (nearest_distance(a[i], b) <= threshold_m) ++hits_a;
#pragma omp parallel for schedule(static) reduction(+ : hits_b)
  for (long i = 0; i < static_cast<long>(b.size()); ++i)
    if (nearest_distance(b[i], a) <= threshold_m) ++hits_b;
  const double precision = static_cast<double>(hits_a) / a.size();
  const double recall = static_cast<double>(hits_b) / b.size();
  if (precision + recall <= 0.0) return 0.0;
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

namespace {

// RMS nearest-neighbor residual of the current similarity; fills dst with the
// matched target point per source point when given.
double icp_measure(const IcpResult& res, const std::vector<Vec3>& source,
                   const std::vector<Vec3>& target, Eigen::MatrixXd* dst) {
  double sq_sum = 0.0;
  for (size_t i = 0; i < source.size(); ++i) {
    const Vec3 p = res.apply(source[i]);
    double best = std::numeric_limits<double>::infinity();
    size_t best_j = 0;
    for (size_t j = 0; j < target.size(); ++j) {
      const double d2 = (p - target[j]).squaredNorm();
      if (d2 < best) {
        best = d2;
        best_j = j;
      }
    }
    if (dst != nullptr) dst->col(i) = target[best_j];
    sq_sum += best;
  }
  return std::sqrt(sq_sum / source.size());
}

// Match -> closed-form similarity fit, repeated from the similarity already in
// res; stops at max_iters or when the residual improves by less than tol.
void icp_run(IcpResult& res, const std::vector<Vec3>& source, const std::vector<Vec3>& target,
             int max_iters, double tol) {
  Eigen::MatrixXd src(3, source.size());
  for (size_t i = 0; i < source.size(); ++i) src.col(i) = source[i];
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd dst(3, source.size());
    res.residual = icp_measure(res, source, target, &dst);
    res.iterations = it;
    if (prev - res.residual < tol) return;
    prev = res.residual;

    const Mat4 t = Eigen::umeyama(src, dst, true);
    const Mat3 sr = t.topLeftCorner<3, 3>();
    res.scale = std::cbrt(sr.determinant());
    res.rotation = sr / res.scale;
    res.translation = t.topRightCorner<3, 1>();
  }
  res.residual = icp_measure(res, source, target, nullptr);
  res.iterations = max_iters;
}

// The 24 proper rotations of the octahedral group: coarse orientation starts
// that keep plain nearest-neighbor iteration out of far-from-identity local
// minima. Identity comes first.
std::vector<Mat3> coarse_rotations() {
  std::vector<Mat3> out;
  int perm[3] = {0, 1, 2};
  std::sort(perm, perm + 3);
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 r = Mat3::Zero();
      for (int row = 0; row < 3; ++row)
        r(row, perm[row]) = (signs >> row) & 1 ? -1.0 : 1.0;
      if (r.determinant() > 0.5) out.push_back(r);
    }
  } while (std::next_permutation(perm, perm + 3));
  std::stable_sort(out.begin(), out.end(), [](const Mat3& a, const Mat3& b) {
    return (a - Mat3::Identity()).norm() < (b - Mat3::Identity()).norm();
  });
  return out;
}

std::vector<Vec3> stride_sample(const std::vector<Vec3>& pts, size_t cap) {
  if (pts.size() <= cap) return pts;
  const size_t step = (pts.size() + cap - 1) / cap;
  std::vector<Vec3> out;
  for (size_t i = 0; i < pts.size(); i += step) out.push_back(pts[i]);
  return out;
}

}  // namespace

IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target,
                    int max_iters, double tol) {
  if (source.size() < 3 || target.empty())
    throw std::runtime_error("degenerate source point set");
  Vec3 cs = Vec3::Zero();
  for (const Vec3& p : source) cs += p;
  cs /= source.size();
  {
    Eigen::MatrixXd centered(3, source.size());
    for (size_t i = 0; i < source.size(); ++i) centered.col(i) = source[i] - cs;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& sv = svd.singularValues();
    if (sv[1] <= 1e-9 * std::max(sv[0], 1e-12))
      throw std::runtime_error("degenerate source point set");
  }
  Vec3 ct = Vec3::Zero();
  for (const Vec3& p : target) ct += p;
  ct /= target.size();
  double rs = 0.0, rt = 0.0;
  for (const Vec3& p : source) rs += (p - cs).squaredNorm();
  for (const Vec3& p : target) rt += (p - ct).squaredNorm();
  rs = std::sqrt(rs / source.size());
  rt = std::sqrt(rt / target.size());
  const double s0 = rt > 0.0 && rs > 0.0 ? rt / rs : 1.0;

  // Identity start runs on the full clouds; the other coarse orientations run
  // on stride-subsampled clouds, every endpoint is re-measured on the full
  // clouds, and a coarse winner is polished at full resolution.
  const std::vector<Vec3> src_small = stride_sample(source, 400);
  const std::vector<Vec3> tgt_small = stride_sample(target, 400);
  const bool subsampled = src_small.size() < source.size() || tgt_small.size() < target.size();

  IcpResult best;
  double best_residual = std::numeric_limits<double>::infinity();
  size_t best_start = 0;
  const std::vector<Mat3> starts = coarse_rotations();
  for (size_t k = 0; k < starts.size(); ++k) {
    IcpResult cur;
    cur.rotation = starts[k];
    cur.scale = s0;
    cur.translation = ct - s0 * (starts[k] * cs);
    if (k == 0)
      icp_run(cur, source, target, max_iters, tol);
    else
      icp_run(cur, src_small, tgt_small, max_iters, tol);
    const double full = k == 0 || !subsampled ? cur.residual
                                              : icp_measure(cur, source, target, nullptr);
    if (full < best_residual) {
      best_residual = full;
      best = cur;
      best_start = k;
    }
  }
  if (best_start != 0 && subsampled) icp_run(best, source, target, max_iters, tol);
  best.residual = icp_measure(best, source, target, nullptr);
  return best;
}

double mpjpe(const std::vector<std::vector<Vec3>>& pred_joints,
             const std::vector<std::vector<Vec3>>& gt_joints) {
  if (pred_joints.size() != gt_joints.size())
    throw std::runtime_error("joint trajectory shape mismatch");
  double sum = 0.0;
  size_t count = 0;
  for (size_t t = 0; t < pred_joints.size(); ++t) {
    if (pred_joints[t].size() != gt_joints[t].size() || pred_joints[t].empty())
      throw std::runtime_error("joint trajectory shape mismatch");
    const Vec3 pr = pred_joints[t][0];
    const Vec3 gr = gt_joints[t][0];
    for (size_t j = 0; j < pred_joints[t].size(); ++j) {
      sum += ((pred_joints[t][j] - pr) - (gt_joints[t][j] - gr)).norm();
      ++count;
    }
  }
  return 1000.0 * sum / static_cast<double>(count);
}

double cd_hand_relative(const std::vector<std::vector<Vec3>>& pred_obj,
                        const std::vector<Vec3>& pred_hand_root,
                        const std::vector<std::vector<Vec3>>& gt_obj,
                        const std::vector<Vec3>& gt_hand_root) {
  const size_t n = pred_obj.size();
  if (gt_obj.size() != n || pred_hand_root.size() != n || gt_hand_root.size() != n)
    throw std::runtime_error("trajectory shape mismatch");
  if (n == 0) throw std::runtime_error("empty trajectory");
  double sum = 0.0;
  for (size_t t = 0; t < n; ++t) {
    std::vector<Vec3> a(pred_obj[t]), b(gt_obj[t]);
    for (Vec3& p : a) p -= pred_hand_root[t];
    for (Vec3& p : b) p -= gt_hand_root[t];
    sum += chamfer_distance(a, b);
  }
  return 100.0 * sum / static_cast<double>(n);
}

double acceleration_error(const std::vector<Vec3>& pred_traj, const std::vector<Vec3>& gt_traj,
                          double fps) {
  if (pred_traj.size() != gt_traj.size()) throw std::runtime_error("trajectory shape mismatch");
  if (pred_traj.size() < 3) throw std::runtime_error("trajectory too short for acceleration");
  double sum = 0.0;
  const double f2 = fps * fps;
  for (size_t t = 1; t + 1 < pred_traj.size(); ++t) {
    const Vec3 ap = (pred_traj[t + 1] - 2.0 * pred_traj[t] + pred_traj[t - 1]) * f2;
    const Vec3 ag = (gt_traj[t + 1] - 2.0 * gt_traj[t] + gt_traj[t - 1]) * f2;
    sum += (ap - ag).norm();
  }
  return sum / static_cast<double>(pred_traj.size() - 2);
}

double mrrpe(const std::vector<Vec3>& pred_hand_root, const std::vector<Vec3>& pred_obj_root,
             const std::vector<Vec3>& gt_hand_root, const std::vector<Vec3>& gt_obj_root) {
  const size_t n = pred_hand_root.size();
  if (pred_obj_root.size() != n || gt_hand_root.size() != n || gt_obj_root.size() != n)
    throw std::runtime_error("trajectory shape mismatch");
  if (n == 0) throw std::runtime_error("empty trajectory");
  double sum = 0.0;
  for (size_t t = 0; t < n; ++t)
    sum += ((pred_obj_root[t] - pred_hand_root[t]) - (gt_obj_root[t] - gt_hand_root[t])).norm();
  return 1000.0 * sum / static_cast<double>(n);
}

Vec3 centroid(const std::vector<Vec3>& points) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points) c += p;
  return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
}

}  // namespace sogtrack
