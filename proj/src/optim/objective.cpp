#include "optim/objective.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sogtrack {

void ParamBlocks::flatten(std::vector<double>& out) const {
  out.clear();
  out.reserve(dof());
  for (int t = 0; t < frames(); ++t) {
    for (int k = 0; k < 4; ++k) out.push_back(obj_rot[t][k]);
    for (int k = 0; k < 3; ++k) out.push_back(obj_trans[t][k]);
  }
  out.push_back(obj_log_scale);
  for (int t = 0; t < frames(); ++t) {
    for (int k = 0; k < 4; ++k) out.push_back(hand_rot[t][k]);
    for (int k = 0; k < 3; ++k) out.push_back(hand_trans[t][k]);
  }
  out.push_back(hand_log_scale);
}

void ParamBlocks::unflatten(std::span<const double> flat) {
  if (flat.size() != dof()) throw std::runtime_error("parameter vector size mismatch");
  size_t i = 0;
  for (int t = 0; t < frames(); ++t) {
    for (int k = 0; k < 4; ++k) obj_rot[t][k] = flat[i++];
    for (int k = 0; k < 3; ++k) obj_trans[t][k] = flat[i++];
  }
  obj_log_scale = flat[i++];
  for (int t = 0; t < frames(); ++t) {
    for (int k = 0; k < 4; ++k) hand_rot[t][k] = flat[i++];
    for (int k = 0; k < 3; ++k) hand_trans[t][k] = flat[i++];
  }
  hand_log_scale = flat[i++];
}

Pose ParamBlocks::object_pose(int t) const {
  Pose p;
  p.rotation = obj_rot[t];
  p.translation = obj_trans[t];
  p.scale = std::exp(obj_log_scale);
  return p;
}

Pose ParamBlocks::hand_pose(int t) const {
  Pose p;
  p.rotation = hand_rot[t];
  p.translation = hand_trans[t];
  p.scale = std::exp(hand_log_scale);
  return p;
}

std::vector<double> LearningRates::per_param(int frames) const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(frames) * 14 + 2);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < 4; ++k) out.push_back(object_rotation);
    for (int k = 0; k < 3; ++k) out.push_back(object_translation);
  }
  out.push_back(object_scale);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < 4; ++k) out.push_back(hand_rotation);
    for (int k = 0; k < 3; ++k) out.push_back(hand_translation);
  }
  out.push_back(hand_scale);
  return out;
}

namespace {

constexpr double kMinDepth = 1e-9;

struct PoseAccum {
  Vec4 rot = Vec4::Zero();
  Vec3 trans = Vec3::Zero();
  double log_scale = 0.0;
};

// Cached per-point forward quantities for one posed, projected point.
struct PointFwd {
  Vec3 rx;      // R(q_hat) * local
  Vec3 world;   // scale * rx + translation
  Vec3 cam;     // camera-space point
  bool in_front = false;
  Vec2 uv = Vec2::Zero();
};

PointFwd point_forward(const Vec4& q_hat, double scale, const Vec3& trans, const Camera& cam,
                       const Vec3& local) {
  PointFwd f;
  f.rx = quat_rotate(q_hat, local);
  f.world = scale * f.rx + trans;
  f.cam = cam.extrinsics.topLeftCorner<3, 3>() * f.world + cam.extrinsics.topRightCorner<3, 1>();
  f.in_front = f.cam.z() > kMinDepth;
  if (f.in_front)
    f.uv = Vec2(cam.fx() * f.cam.x() / f.cam.z() + cam.cx(),
                cam.fy() * f.cam.y() / f.cam.z() + cam.cy());
  return f;
}

// Reverse chain from (u, v, sigma2d, depth, world) gradients of one point to
// the raw pose parameters. sigma3d is 0 for plain points.
void point_backward(const Vec4& q_raw, const Vec4& q_hat, double scale, const Camera& cam,
                    const Vec3& local, const PointFwd& f, double sigma3d, double gu, double gv,
                    double gsigma, double gz, const Vec3& gworld, PoseAccum& acc) {
  const double z = f.cam.z();
  Vec3 gcam(0, 0, gz);
  double gscale = 0.0;
  if (gu != 0.0 || gv != 0.0 || gsigma != 0.0) {
    const double fx = cam.fx(), fy = cam.fy();
    gcam.x() += gu * fx / z;
    gcam.y() += gv * fy / z;
    gcam.z() += -(gu * fx * f.cam.x() + gv * fy * f.cam.y()) / (z * z);
    if (gsigma != 0.0) {
      gcam.z() += -gsigma * cam.favg() * scale * sigma3d / (z * z);
      gscale += gsigma * cam.favg() * sigma3d / z;
    }
  }
  const Vec3 gw = cam.extrinsics.topLeftCorner<3, 3>().transpose() * gcam + gworld;
  acc.trans += gw;
  gscale += gw.dot(f.rx);
  acc.log_scale += scale * gscale;

  const Vec3 grx = scale * gw;
  const double w = q_hat[0];
  const Vec3 v(q_hat[1], q_hat[2], q_hat[3]);
  const Vec3& x = local;
  Vec4 gq_hat;
  gq_hat[0] = 2.0 * w * x.dot(grx) + 2.0 * grx.dot(v.cross(x));
  const Vec3 gv_part = -2.0 * v * x.dot(grx) + 2.0 * x * v.dot(grx) + 2.0 * v.dot(x) * grx +
                       2.0 * w * x.cross(grx);
  gq_hat[1] = gv_part.x();
  gq_hat[2] = gv_part.y();
  gq_hat[3] = gv_part.z();
  // Through normalization: (I - q_hat q_hat^T) / |q_raw|.
  const double n = q_raw.norm();
  acc.rot += (gq_hat - q_hat * q_hat.dot(gq_hat)) / n;
}

double self_energy(const FrameObservation& obs, int i) {
  if (!obs.image_self_energy.empty()) return obs.image_self_energy[i];
  const Gaussian2D& g = obs.sog->gaussians[i];
  return g.weight * g.weight * M_PI * g.sigma * g.sigma;
}

struct FrameEval {
  Vec4 q_hat_o = Vec4(1, 0, 0, 0);
  std::vector<PointFwd> obj;      // per object Gaussian
  std::vector<double> sigma2d;    // per object Gaussian
  Vec4 q_hat_h = Vec4(1, 0, 0, 0);
  std::vector<PointFwd> hand_pts;   // hand_points(hand)
  std::vector<PointFwd> joints;     // 21 joints
  std::vector<Vec3> contact_local;  // contact points, hand-local
  std::vector<PointFwd> contacts;
};

// Forward evaluation of all posed points of one frame.
FrameEval eval_frame(const WindowProblem& problem, const ParamBlocks& params, int t) {
  const FrameObservation& obs = *problem.frames[t];
  const ObjectSoG& object = *problem.object;
  FrameEval ev;
  const Pose pose_o = params.object_pose(t);
  ev.q_hat_o = quat_normalize(pose_o.rotation);
  ev.obj.resize(object.gaussians.size());
  ev.sigma2d.resize(object.gaussians.size(), 0.0);
  const double favg = obs.cam->favg();
  for (size_t j = 0; j < object.gaussians.size(); ++j) {
    ev.obj[j] = point_forward(ev.q_hat_o, pose_o.scale, pose_o.translation, *obs.cam,
                              object.gaussians[j].mu);
    if (ev.obj[j].in_front)
      ev.sigma2d[j] = favg * pose_o.scale * object.gaussians[j].sigma / ev.obj[j].cam.z();
  }
  if (obs.hand != nullptr) {
    const Pose pose_h = params.hand_pose(t);
    ev.q_hat_h = quat_normalize(pose_h.rotation);
    const std::vector<Vec3>& hp = hand_points(*obs.hand);
    ev.hand_pts.resize(hp.size());
    for (size_t i = 0; i < hp.size(); ++i)
      ev.hand_pts[i] = point_forward(ev.q_hat_h, pose_h.scale, pose_h.translation, *obs.cam, hp[i]);
    ev.joints.resize(obs.hand->local_joints.size());
    for (size_t i = 0; i < obs.hand->local_joints.size(); ++i)
      ev.joints[i] = point_forward(ev.q_hat_h, pose_h.scale, pose_h.translation, *obs.cam,
                                   obs.hand->local_joints[i]);
    ev.contact_local = contact_points(*obs.hand, problem.config.contact_indices);
    ev.contacts.resize(ev.contact_local.size());
    for (size_t i = 0; i < ev.contact_local.size(); ++i)
      ev.contacts[i] = point_forward(ev.q_hat_h, pose_h.scale, pose_h.translation, *obs.cam,
                                     ev.contact_local[i]);
  }
  return ev;
}

std::vector<double> sil_sums_from_eval(const FrameEval& ev, const std::vector<std::uint8_t>& in_front,
                                       int out_w, int out_h, int d) {
  std::vector<Gaussian2D> gs;
  gs.reserve(ev.obj.size());
  for (size_t j = 0; j < ev.obj.size(); ++j) {
    if (!in_front[j]) continue;
    Gaussian2D g;
    g.mu = ev.obj[j].uv;
    g.sigma = ev.sigma2d[j];
    gs.push_back(g);
  }
  return silhouette_sums(gs, out_w, out_h, d);
}

bool round_in_mask(const Vec2& uv, const Mask& mask) {
  const long col = std::lround(uv.x());
  const long row = std::lround(uv.y());
  if (col < 0 || row < 0 || col >= mask.width || row >= mask.height) return false;
  return mask.at(static_cast<int>(row), static_cast<int>(col));
}

bool round_inside(const Vec2& uv, int width, int height) {
  const long col = std::lround(uv.x());
  const long row = std::lround(uv.y());
  return col >= 0 && row >= 0 && col < width && row < height;
}

int sil_out_w(const FrameObservation& obs, int d) { return (obs.cam->width + d - 1) / d; }
int sil_out_h(const FrameObservation& obs, int d) { return (obs.cam->height + d - 1) / d; }

double smooth_sequence(const std::vector<Vec4>& quats, const std::vector<Vec3>& trans,
                       const std::vector<double>& signs) {
  double acc = 0.0;
  for (size_t t = 1; t + 1 < quats.size(); ++t) {
    acc += (trans[t + 1] - 2.0 * trans[t] + trans[t - 1]).squaredNorm();
    const Vec4 a = signs[t + 1] * quat_normalize(quats[t + 1]) -
                   2.0 * signs[t] * quat_normalize(quats[t]) +
                   signs[t - 1] * quat_normalize(quats[t - 1]);
    acc += a.squaredNorm();
  }
  return acc;
}

std::vector<double> quat_signs(const std::vector<Vec4>& quats) {
  std::vector<double> signs(quats.size(), 1.0);
  for (size_t t = 1; t < quats.size(); ++t) {
    const double d = (signs[t - 1] * quats[t - 1]).dot(quats[t]);
    signs[t] = d < 0.0 ? -1.0 : 1.0;
  }
  return signs;
}

}  // namespace

FrozenWindow freeze_window(const WindowProblem& problem, const ParamBlocks& params) {
  const int nf = static_cast<int>(problem.frames.size());
  const ObjectiveConfig& cfg = problem.config;
  FrozenWindow fw;
  fw.frames.resize(nf);

  for (int t = 0; t < nf; ++t) {
    const FrameObservation& obs = *problem.frames[t];
    FrozenFrame& fr = fw.frames[t];
    const FrameEval ev = eval_frame(problem, params, t);
    const size_t m = ev.obj.size();

    fr.in_front.resize(m);
    fr.visible.resize(m);
    std::vector<Gaussian2D> projected(m);
    for (size_t j = 0; j < m; ++j) {
      fr.in_front[j] = ev.obj[j].in_front ? 1 : 0;
      bool vis = ev.obj[j].in_front && round_inside(ev.obj[j].uv, obs.cam->width, obs.cam->height);
      if (vis && cfg.gating && obs.mask_h != nullptr && round_in_mask(ev.obj[j].uv, *obs.mask_h))
        vis = false;
      fr.visible[j] = vis ? 1 : 0;
      if (vis) {
        projected[j].mu = ev.obj[j].uv;
        projected[j].sigma = ev.sigma2d[j];
        projected[j].color = problem.object->gaussians[j].color;
        projected[j].weight = problem.object->gaussians[j].weight;
      }
    }
    VisibilityFlags flags;
    flags.flags = fr.visible;

    if (cfg.weights.energy != 0.0) {
      fr.pairs = select_active_pairs(*obs.sog, projected, flags, cfg.energy);
      fw.terms.energy += -cfg.weights.energy * fr.pairs.value;
    }

    if (cfg.weights.sil != 0.0) {
      const int d = cfg.sil_downsample;
      const int ow = sil_out_w(obs, d), oh = sil_out_h(obs, d);
      const std::vector<double> sums = sil_sums_from_eval(ev, fr.in_front, ow, oh, d);
      fr.sil_saturated.resize(sums.size());
      double acc = 0.0;
      for (size_t i = 0; i < sums.size(); ++i) {
        fr.sil_saturated[i] = sums[i] > 1.0 ? 1 : 0;
        const double diff = std::min(1.0, sums[i]) - obs.mask_o_down->data[i];
        acc += diff * diff;
      }
      fw.terms.sil += cfg.weights.sil * acc / static_cast<double>(sums.size());
    }

    if (cfg.weights.depth != 0.0) {
      fr.depth_member.assign(m, 0);
      double sum = 0.0;
      size_t n = 0;
      for (size_t j = 0; j < m; ++j) {
        if (!fr.visible[j] || !round_in_mask(ev.obj[j].uv, *obs.mask_o_eroded)) continue;
        fr.depth_member[j] = 1;
        sum += ev.obj[j].cam.z();
        ++n;
      }
      if (n > 0 && obs.pm_median_o.has_value()) {
        const double diff = sum / static_cast<double>(n) - *obs.pm_median_o;
        fr.depth_sign_o = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        fw.terms.depth += cfg.weights.depth * std::abs(diff);
      }
      if (obs.hand != nullptr) {
        fr.hand_in_front.resize(ev.hand_pts.size());
        fr.hand_depth_member.assign(ev.hand_pts.size(), 0);
        double hsum = 0.0;
        size_t hn = 0;
        for (size_t i = 0; i < ev.hand_pts.size(); ++i) {
          fr.hand_in_front[i] = ev.hand_pts[i].in_front ? 1 : 0;
          if (!ev.hand_pts[i].in_front || !round_in_mask(ev.hand_pts[i].uv, *obs.mask_h_eroded))
            continue;
          fr.hand_depth_member[i] = 1;
          hsum += ev.hand_pts[i].cam.z();
          ++hn;
        }
        if (hn > 0 && obs.pm_median_h.has_value()) {
          const double diff = hsum / static_cast<double>(hn) - *obs.pm_median_h;
          fr.depth_sign_h = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          fw.terms.depth += cfg.weights.depth * std::abs(diff);
        }
      }
    }

    if (cfg.weights.j2d != 0.0 && obs.hand != nullptr) {
      fr.joint_in_front.resize(ev.joints.size());
      double acc = 0.0;
      for (size_t l = 0; l < ev.joints.size(); ++l) {
        fr.joint_in_front[l] = ev.joints[l].in_front ? 1 : 0;
        const double conf = obs.hand->detected_joints_2d[l].z();
        if (conf <= 0.0) continue;
        if (!ev.joints[l].in_front) {
          acc += conf * kBehindCameraPenalty;
          continue;
        }
        acc += conf * (ev.joints[l].uv - obs.hand->detected_joints_2d[l].head<2>()).squaredNorm();
      }
      fw.terms.j2d += cfg.weights.j2d * acc;
    }

    if (cfg.weights.contact != 0.0 && obs.hand != nullptr && obs.hand->contact_flag) {
      fr.contact_active = true;
      fr.contact_nn.assign(ev.contacts.size(), -1);
      double acc = 0.0;
      for (size_t i = 0; i < ev.contacts.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (size_t j = 0; j < m; ++j) {
          const double d2 = (ev.contacts[i].world - ev.obj[j].world).squaredNorm();
          if (d2 < best) {
            best = d2;
            best_j = static_cast<int>(j);
          }
        }
        fr.contact_nn[i] = best_j;
        acc += best;
      }
      if (!ev.contacts.empty())
        fw.terms.contact += cfg.weights.contact * acc / static_cast<double>(ev.contacts.size());
    }
  }

  if (cfg.weights.smooth != 0.0 && nf >= 3) {
    std::vector<Vec4> oq(nf), hq(nf);
    std::vector<Vec3> ot(nf), ht(nf);
    for (int t = 0; t < nf; ++t) {
      oq[t] = quat_normalize(params.obj_rot[t]);
      hq[t] = quat_normalize(params.hand_rot[t]);
      ot[t] = params.obj_trans[t];
      ht[t] = params.hand_trans[t];
    }
    fw.obj_qsign = quat_signs(oq);
    fw.hand_qsign = quat_signs(hq);
    fw.terms.smooth = cfg.weights.smooth * (smooth_sequence(oq, ot, fw.obj_qsign) +
                                            smooth_sequence(hq, ht, fw.hand_qsign));
  } else {
    fw.obj_qsign.assign(nf, 1.0);
    fw.hand_qsign.assign(nf, 1.0);
  }

  const double total = fw.terms.energy + fw.terms.j2d + fw.terms.depth + fw.terms.sil +
                       fw.terms.contact + fw.terms.smooth;
  if (!std::isfinite(total)) throw std::runtime_error("objective diverged");
  fw.value = total;
  return fw;
}

double frozen_objective(const WindowProblem& problem, const ParamBlocks& params,
                        const FrozenWindow& frozen) {
  const int nf = static_cast<int>(problem.frames.size());
  const ObjectiveConfig& cfg = problem.config;
  double total = 0.0;

  for (int t = 0; t < nf; ++t) {
    const FrameObservation& obs = *problem.frames[t];
    const FrozenFrame& fr = frozen.frames[t];
    const FrameEval ev = eval_frame(problem, params, t);
    const size_t m = ev.obj.size();
    for (size_t j = 0; j < m; ++j)
      if (fr.in_front[j] && !ev.obj[j].in_front)
        throw std::runtime_error("objective diverged");

    if (cfg.weights.energy != 0.0) {
      const double inv_sc2 = 1.0 / (cfg.energy.sigma_c * cfg.energy.sigma_c);
      double e = 0.0;
      const int n_img = static_cast<int>(obs.sog->gaussians.size());
      for (int i = 0; i < n_img; ++i) {
        if (fr.pairs.clamped[i]) {
          e += self_energy(obs, i);
          continue;
        }
        const Gaussian2D& gi = obs.sog->gaussians[i];
        const double s1 = gi.sigma * gi.sigma;
        for (int p = fr.pairs.offsets[i]; p < fr.pairs.offsets[i + 1]; ++p) {
          const int j = fr.pairs.model_index[p];
          const double s2 = ev.sigma2d[j] * ev.sigma2d[j];
          const double s = s1 + s2;
          const double expo = (gi.mu - ev.obj[j].uv).squaredNorm() / s +
                              (gi.color - problem.object->gaussians[j].color).squaredNorm() * inv_sc2;
          e += gi.weight * problem.object->gaussians[j].weight * 2.0 * M_PI * s1 * s2 / s *
               std::exp(-expo);
        }
      }
      total += -cfg.weights.energy * e;
    }

    if (cfg.weights.sil != 0.0) {
      const int d = cfg.sil_downsample;
      const int ow = sil_out_w(obs, d), oh = sil_out_h(obs, d);
      const std::vector<double> sums = sil_sums_from_eval(ev, fr.in_front, ow, oh, d);
      double acc = 0.0;
      for (size_t i = 0; i < sums.size(); ++i) {
        const double v = fr.sil_saturated[i] ? 1.0 : sums[i];
        const double diff = v - obs.mask_o_down->data[i];
        acc += diff * diff;
      }
      total += cfg.weights.sil * acc / static_cast<double>(sums.size());
    }

    if (cfg.weights.depth != 0.0) {
      if (fr.depth_sign_o != 0.0) {
        double sum = 0.0;
        size_t n = 0;
        for (size_t j = 0; j < m; ++j) {
          if (!fr.depth_member[j]) continue;
          sum += ev.obj[j].cam.z();
          ++n;
        }
        total += cfg.weights.depth * fr.depth_sign_o * (sum / static_cast<double>(n) - *obs.pm_median_o);
      }
      if (fr.depth_sign_h != 0.0) {
        double sum = 0.0;
        size_t n = 0;
        for (size_t i = 0; i < ev.hand_pts.size(); ++i) {
          if (!fr.hand_depth_member[i]) continue;
          sum += ev.hand_pts[i].cam.z();
          ++n;
        }
        total += cfg.weights.depth * fr.depth_sign_h * (sum / static_cast<double>(n) - *obs.pm_median_h);
      }
    }

    if (cfg.weights.j2d != 0.0 && obs.hand != nullptr) {
      double acc = 0.0;
      for (size_t l = 0; l < ev.joints.size(); ++l) {
        const double conf = obs.hand->detected_joints_2d[l].z();
        if (conf <= 0.0) continue;
        if (!fr.joint_in_front[l]) {
          acc += conf * kBehindCameraPenalty;
          continue;
        }
        acc += conf * (ev.joints[l].uv - obs.hand->detected_joints_2d[l].head<2>()).squaredNorm();
      }
      total += cfg.weights.j2d * acc;
    }

    if (fr.contact_active && cfg.weights.contact != 0.0) {
      double acc = 0.0;
      for (size_t i = 0; i < ev.contacts.size(); ++i)
        acc += (ev.contacts[i].world - ev.obj[fr.contact_nn[i]].world).squaredNorm();
      if (!ev.contacts.empty())
        total += cfg.weights.contact * acc / static_cast<double>(ev.contacts.size());
    }
  }

  if (cfg.weights.smooth != 0.0 && nf >= 3) {
    std::vector<Vec4> oq(nf), hq(nf);
    std::vector<Vec3> ot(nf), ht(nf);
    for (int t = 0; t < nf; ++t) {
      oq[t] = params.obj_rot[t];
      hq[t] = params.hand_rot[t];
      ot[t] = params.obj_trans[t];
      ht[t] = params.hand_trans[t];
    }
    total += cfg.weights.smooth * (smooth_sequence(oq, ot, frozen.obj_qsign) +
                                   smooth_sequence(hq, ht, frozen.hand_qsign));
  }

  if (!std::isfinite(total)) throw std::runtime_error("objective diverged");
  return total;
}

std::vector<double> frozen_gradient(const WindowProblem& problem, const ParamBlocks& params,
                                    const FrozenWindow& frozen) {
  const int nf = static_cast<int>(problem.frames.size());
  const ObjectiveConfig& cfg = problem.config;
  std::vector<PoseAccum> gobj(nf), ghand(nf);

  for (int t = 0; t < nf; ++t) {
    const FrameObservation& obs = *problem.frames[t];
    const FrozenFrame& fr = frozen.frames[t];
    const FrameEval ev = eval_frame(problem, params, t);
    const size_t m = ev.obj.size();
    const Pose pose_o = params.object_pose(t);
    const Pose pose_h = obs.hand != nullptr ? params.hand_pose(t) : Pose{};

    // Accumulated gradients per object Gaussian and hand point.
    std::vector<double> gmu_x(m, 0.0), gmu_y(m, 0.0), gsig(m, 0.0), gz(m, 0.0);
    std::vector<Vec3> gworld_obj(m, Vec3::Zero());

    if (cfg.weights.energy != 0.0) {
      const double inv_sc2 = 1.0 / (cfg.energy.sigma_c * cfg.energy.sigma_c);
      const int n_img = static_cast<int>(obs.sog->gaussians.size());
      for (int i = 0; i < n_img; ++i) {
        if (fr.pairs.clamped[i]) continue;
        const Gaussian2D& gi = obs.sog->gaussians[i];
        const double s1 = gi.sigma * gi.sigma;
        for (int p = fr.pairs.offsets[i]; p < fr.pairs.offsets[i + 1]; ++p) {
          const int j = fr.pairs.model_index[p];
          const double sj = ev.sigma2d[j];
          const double s2 = sj * sj;
          const double s = s1 + s2;
          const Vec2 dmu = ev.obj[j].uv - gi.mu;
          const double d2 = dmu.squaredNorm();
          const double expo = d2 / s +
                              (gi.color - problem.object->gaussians[j].color).squaredNorm() * inv_sc2;
          const double e = gi.weight * problem.object->gaussians[j].weight * 2.0 * M_PI * s1 * s2 /
                           s * std::exp(-expo);
          const double ge = -cfg.weights.energy * e;  // dL/dE_ij
          gmu_x[j] += ge * (-2.0 / s) * dmu.x();
          gmu_y[j] += ge * (-2.0 / s) * dmu.y();
          gsig[j] += ge * (2.0 / sj - 2.0 * sj / s + 2.0 * sj * d2 / (s * s));
        }
      }
    }

    if (cfg.weights.sil != 0.0) {
      const int d = cfg.sil_downsample;
      const int ow = sil_out_w(obs, d), oh = sil_out_h(obs, d);
      const std::vector<double> sums = sil_sums_from_eval(ev, fr.in_front, ow, oh, d);
      const double coef_scale = cfg.weights.sil * 2.0 / static_cast<double>(sums.size());
      std::vector<double> coef(sums.size(), 0.0);
      for (size_t i = 0; i < sums.size(); ++i)
        if (!fr.sil_saturated[i]) coef[i] = coef_scale * (sums[i] - obs.mask_o_down->data[i]);
      const double dd = d;
      for (size_t j = 0; j < m; ++j) {
        if (!fr.in_front[j]) continue;
        const double sigma = ev.sigma2d[j];
        const double radius = std::sqrt(2.0 * kSilExponentCutoff) * sigma;
        const Vec2 mu = ev.obj[j].uv;
        const int c0 = std::max(0, static_cast<int>(std::ceil((mu.x() - radius) / dd)));
        const int c1 = std::min(ow - 1, static_cast<int>(std::floor((mu.x() + radius) / dd)));
        const int r0 = std::max(0, static_cast<int>(std::ceil((mu.y() - radius) / dd)));
        const int r1 = std::min(oh - 1, static_cast<int>(std::floor((mu.y() + radius) / dd)));
        const double inv_s2 = 1.0 / (sigma * sigma);
        for (int r = r0; r <= r1; ++r) {
          const double dy = r * dd - mu.y();
          for (int c = c0; c <= c1; ++c) {
            const double g = coef[static_cast<size_t>(r) * ow + c];
            const double dx = c * dd - mu.x();
            const double dist2 = dx * dx + dy * dy;
            const double expo = 0.5 * dist2 * inv_s2;
            if (expo > kSilExponentCutoff || g == 0.0) continue;
            const double e = std::exp(-expo);
            gmu_x[j] += g * e * dx * inv_s2;
            gmu_y[j] += g * e * dy * inv_s2;
            gsig[j] += g * e * dist2 * inv_s2 / sigma;
          }
        }
      }
    }

    if (cfg.weights.depth != 0.0 && fr.depth_sign_o != 0.0) {
      size_t n = 0;
      for (size_t j = 0; j < m; ++j) n += fr.depth_member[j];
      const double coef = cfg.weights.depth * fr.depth_sign_o / static_cast<double>(n);
      for (size_t j = 0; j < m; ++j)
        if (fr.depth_member[j]) gz[j] += coef;
    }

    for (size_t j = 0; j < m; ++j) {
      if (!fr.in_front[j]) continue;
      if (gmu_x[j] == 0.0 && gmu_y[j] == 0.0 && gsig[j] == 0.0 && gz[j] == 0.0 &&
          gworld_obj[j].isZero())
        continue;
      point_backward(params.obj_rot[t], ev.q_hat_o, pose_o.scale, *obs.cam,
                     problem.object->gaussians[j].mu, ev.obj[j],
                     problem.object->gaussians[j].sigma, gmu_x[j], gmu_y[j], gsig[j], gz[j],
                     gworld_obj[j], gobj[t]);
    }

    if (obs.hand != nullptr) {
      if (cfg.weights.depth != 0.0 && fr.depth_sign_h != 0.0) {
        size_t n = 0;
        for (size_t i = 0; i < ev.hand_pts.size(); ++i) n += fr.hand_depth_member[i];
        const double coef = cfg.weights.depth * fr.depth_sign_h / static_cast<double>(n);
        const std::vector<Vec3>& hp = hand_points(*obs.hand);
        for (size_t i = 0; i < ev.hand_pts.size(); ++i) {
          if (!fr.hand_depth_member[i]) continue;
          point_backward(params.hand_rot[t], ev.q_hat_h, pose_h.scale, *obs.cam, hp[i],
                         ev.hand_pts[i], 0.0, 0.0, 0.0, 0.0, coef, Vec3::Zero(), ghand[t]);
        }
      }
      if (cfg.weights.j2d != 0.0) {
        for (size_t l = 0; l < ev.joints.size(); ++l) {
          const double conf = obs.hand->detected_joints_2d[l].z();
          if (conf <= 0.0 || !fr.joint_in_front[l]) continue;
          const Vec2 err = ev.joints[l].uv - obs.hand->detected_joints_2d[l].head<2>();
          const double gu = cfg.weights.j2d * conf * 2.0 * err.x();
          const double gv = cfg.weights.j2d * conf * 2.0 * err.y();
          point_backward(params.hand_rot[t], ev.q_hat_h, pose_h.scale, *obs.cam,
                         obs.hand->local_joints[l], ev.joints[l], 0.0, gu, gv, 0.0, 0.0,
                         Vec3::Zero(), ghand[t]);
        }
      }
      if (fr.contact_active && cfg.weights.contact != 0.0 && !ev.contacts.empty()) {
        const double coef = cfg.weights.contact * 2.0 / static_cast<double>(ev.contacts.size());
        for (size_t i = 0; i < ev.contacts.size(); ++i) {
          const int j = fr.contact_nn[i];
          const Vec3 diff = ev.contacts[i].world - ev.obj[j].world;
          point_backward(params.hand_rot[t], ev.q_hat_h, pose_h.scale, *obs.cam, ev.contact_local[i],
                         ev.contacts[i], 0.0, 0.0, 0.0, 0.0, 0.0, coef * diff, ghand[t]);
          point_backward(params.obj_rot[t], ev.q_hat_o, pose_o.scale, *obs.cam,
                         problem.object->gaussians[j].mu, ev.obj[j],
                         problem.object->gaussians[j].sigma, 0.0, 0.0, 0.0, 0.0, -coef * diff,
                         gobj[t]);
        }
      }
    }
  }

  // Smoothness over both pose sequences.
  if (cfg.weights.smooth != 0.0 && nf >= 3) {
    auto add_sequence = [&](const std::vector<Vec4>& rot_raw,
                            std::function<Vec3(int)> trans_of, const std::vector<double>& signs,
                            std::vector<PoseAccum>& out) {
      std::vector<Vec4> qh(nf);
      for (int t = 0; t < nf; ++t) qh[t] = quat_normalize(rot_raw[t]);
      std::vector<Vec4> gq(nf, Vec4::Zero());
      std::vector<Vec3> gt(nf, Vec3::Zero());
      for (int t = 1; t + 1 < nf; ++t) {
        const Vec3 at = trans_of(t + 1) - 2.0 * trans_of(t) + trans_of(t - 1);
        gt[t + 1] += cfg.weights.smooth * 2.0 * at;
        gt[t] += cfg.weights.smooth * -4.0 * at;
        gt[t - 1] += cfg.weights.smooth * 2.0 * at;
        const Vec4 aq = signs[t + 1] * qh[t + 1] - 2.0 * signs[t] * qh[t] + signs[t - 1] * qh[t - 1];
        gq[t + 1] += cfg.weights.smooth * 2.0 * signs[t + 1] * aq;
        gq[t] += cfg.weights.smooth * -4.0 * signs[t] * aq;
        gq[t - 1] += cfg.weights.smooth * 2.0 * signs[t - 1] * aq;
      }
      for (int t = 0; t < nf; ++t) {
        const double n = rot_raw[t].norm();
        out[t].rot += (gq[t] - qh[t] * qh[t].dot(gq[t])) / n;
        out[t].trans += gt[t];
      }
    };
    add_sequence(params.obj_rot, [&](int t) { return params.obj_trans[t]; }, frozen.obj_qsign, gobj);
    add_sequence(params.hand_rot, [&](int t) { return params.hand_trans[t]; }, frozen.hand_qsign,
                 ghand);
  }

  ParamBlocks grads;
  grads.obj_rot.resize(nf);
  grads.obj_trans.resize(nf);
  grads.hand_rot.resize(nf);
  grads.hand_trans.resize(nf);
  grads.obj_log_scale = 0.0;
  grads.hand_log_scale = 0.0;
  for (int t = 0; t < nf; ++t) {
    grads.obj_rot[t] = gobj[t].rot;
    grads.obj_trans[t] = gobj[t].trans;
    grads.obj_log_scale += gobj[t].log_scale;
    grads.hand_rot[t] = ghand[t].rot;
    grads.hand_trans[t] = ghand[t].trans;
    grads.hand_log_scale += ghand[t].log_scale;
  }
  std::vector<double> flat;
  grads.flatten(flat);
  return flat;
}

std::vector<double> finite_difference_gradient(const WindowProblem& problem,
                                               const ParamBlocks& params,
                                               const FrozenWindow& frozen, double h) {
  std::vector<double> flat;
  params.flatten(flat);
  std::vector<double> grad(flat.size(), 0.0);
  ParamBlocks work = params;
  for (size_t k = 0; k < flat.size(); ++k) {
    const double saved = flat[k];
    flat[k] = saved + h;
    work.unflatten(flat);
    const double fp = frozen_objective(problem, work, frozen);
    flat[k] = saved - h;
    work.unflatten(flat);
    const double fm = frozen_objective(problem, work, frozen);
    flat[k] = saved;
    grad[k] = (fp - fm) / (2.0 * h);
  }
  work.unflatten(flat);
  return grad;
}

}  // namespace sogtrack
