#include "pipeline/tracker.hpp"

#include <chrono>
#include <cmath>

namespace sogtrack {

std::vector<Vec3> pose_points(const std::vector<Vec3>& points, const Pose& pose) {
  const Vec4 q = quat_normalize(pose.rotation);
  std::vector<Vec3> out(points.size());
  for (size_t i = 0; i < points.size(); ++i)
    out[i] = pose.scale * quat_rotate(q, points[i]) + pose.translation;
  return out;
}

namespace {

// Immutable per-frame data backing the FrameObservation pointers.
struct FrameStore {
  ImageSoG sog;
  Mask mask_o_eroded;
  Mask mask_h_eroded;
  DownsampledMask mask_o_down;
  std::vector<double> self_energy;
};

ParamBlocks params_from_trajectory(const TrajectoryData& traj) {
  ParamBlocks p;
  const int n = traj.frame_count();
  p.obj_rot.resize(n);
  p.obj_trans.resize(n);
  p.hand_rot.resize(n);
  p.hand_trans.resize(n);
  for (int t = 0; t < n; ++t) {
    p.obj_rot[t] = traj.object[t].rotation;
    p.obj_trans[t] = traj.object[t].translation;
    p.hand_rot[t] = traj.hand[t].rotation;
    p.hand_trans[t] = traj.hand[t].translation;
  }
  p.obj_log_scale = std::log(traj.object_scale);
  p.hand_log_scale = std::log(traj.hand_scale);
  return p;
}

}  // namespace

TrajectoryData run_tracking(const Sequence& seq, const TrackConfig& config,
                            TrackDiagnostics* diagnostics) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = seq.frame_count();
  TrackDiagnostics local_diag;
  TrackDiagnostics& diag = diagnostics != nullptr ? *diagnostics : local_diag;

  // Per-frame image SoGs and derived masks. A frame whose image model cannot
  // be built (e.g. fully occluded object) keeps an empty SoG and contributes
  // no appearance term instead of aborting the run.
  std::vector<FrameStore> store(n);
  std::vector<std::string> frame_warnings(n);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < n; ++t) {
    try {
      store[t].sog = build_image_sog(seq.images[t], seq.object_masks[t], config.quadtree, t);
    } catch (const std::exception& e) {
      store[t].sog = ImageSoG{};
      store[t].sog.source_frame = t;
      frame_warnings[t] = "frame " + std::to_string(t) + " image model failed: " + e.what();
    }
    store[t].mask_o_eroded = erode_mask(seq.object_masks[t], config.depth_erosion_iterations);
    store[t].mask_h_eroded = erode_mask(seq.hand_masks[t], config.depth_erosion_iterations);
    store[t].mask_o_down = downsample_mask(seq.object_masks[t], config.sil_downsample);
    store[t].self_energy.resize(store[t].sog.gaussians.size());
    for (size_t i = 0; i < store[t].sog.gaussians.size(); ++i) {
      const Gaussian2D& g = store[t].sog.gaussians[i];
      store[t].self_energy[i] = g.weight * g.weight * M_PI * g.sigma * g.sigma;
    }
  }
  for (int t = 0; t < n; ++t) {
    diag.image_sog_sizes.push_back(store[t].sog.gaussians.size());
    if (!frame_warnings[t].empty()) diag.warnings.push_back(frame_warnings[t]);
  }

  // Canonical object SoG; assets smaller than the requested count keep every
  // Gaussian surviving the opacity filter.
  int population = 0;
  for (double op : seq.asset.opacities) population += op >= config.min_opacity;
  if (population < 1) throw std::runtime_error("no object surface samples");
  const ObjectSoG object = to_object_sog(seq.asset, std::min(config.object_count, population),
                                         config.sigma_factor, config.min_opacity);
  diag.object_sog_size = object.gaussians.size();

  // Initialization.
  TrajectoryData init = seq.initial.has_value() ? *seq.initial : default_initial_trajectory(seq);
  if (init.contact.empty())
    for (int t = 0; t < n; ++t) init.contact.push_back(seq.hand.frames[t].contact_flag ? 1 : 0);

  // One-time hand depth alignment.
  try {
    std::vector<Pose> hand_poses;
    for (int t = 0; t < n; ++t) {
      Pose p = init.hand[t];
      p.scale = init.hand_scale;
      hand_poses.push_back(p);
    }
    diag.alignment =
        hand_depth_align(seq.hand.frames, hand_poses, seq.pointmaps, seq.hand_masks, seq.cameras);
    init.hand_scale *= diag.alignment.scale;
    for (int t = 0; t < n; ++t) init.hand[t].translation += diag.alignment.translation;
    diag.alignment_applied = true;
  } catch (const std::exception& e) {
    diag.warnings.push_back(std::string("hand depth alignment skipped: ") + e.what());
  }

  // Frame observations.
  std::vector<FrameObservation> obs(n);
  for (int t = 0; t < n; ++t) {
    obs[t].sog = &store[t].sog;
    obs[t].mask_h = &seq.hand_masks[t];
    obs[t].mask_o_eroded = &store[t].mask_o_eroded;
    obs[t].mask_h_eroded = &store[t].mask_h_eroded;
    obs[t].mask_o_down = &store[t].mask_o_down;
    obs[t].cam = &seq.cameras[t];
    obs[t].hand = &seq.hand.frames[t];
    obs[t].pm_median_o = pointmap_depth_median(seq.pointmaps[t], store[t].mask_o_eroded,
                                               seq.cameras[t]);
    obs[t].pm_median_h = pointmap_depth_median(seq.pointmaps[t], store[t].mask_h_eroded,
                                               seq.cameras[t]);
    obs[t].image_self_energy = store[t].self_energy;
  }

  ObjectiveConfig ocfg;
  ocfg.weights = config.weights;
  ocfg.energy = config.energy;
  ocfg.sil_downsample = config.sil_downsample;
  ocfg.gating = config.gating;
  ocfg.contact_indices = seq.hand.contact_vertex_indices;

  // Sliding windows with per-window failure isolation; frames of a failed
  // window keep their previous values and are marked failed unless a later
  // window succeeds on them.
  ParamBlocks traj_params = params_from_trajectory(init);
  std::vector<std::uint8_t> failed(n, 0);
  const int w = std::min(config.window.window_size, n);
  for (int start = 0; start + w <= n; start += config.window.stride) {
    WindowProblem problem;
    problem.object = &object;
    problem.config = ocfg;
    for (int k = 0; k < w; ++k) problem.frames.push_back(&obs[start + k]);

    ParamBlocks win;
    win.obj_rot.assign(traj_params.obj_rot.begin() + start, traj_params.obj_rot.begin() + start + w);
    win.obj_trans.assign(traj_params.obj_trans.begin() + start,
                         traj_params.obj_trans.begin() + start + w);
    win.hand_rot.assign(traj_params.hand_rot.begin() + start,
                        traj_params.hand_rot.begin() + start + w);
    win.hand_trans.assign(traj_params.hand_trans.begin() + start,
                          traj_params.hand_trans.begin() + start + w);
    win.obj_log_scale = traj_params.obj_log_scale;
    win.hand_log_scale = traj_params.hand_log_scale;

    try {
      WindowResult res =
          optimize_window(problem, win, config.optimizer, config.lr, config.window.iterations);
      for (int k = 0; k < w; ++k) {
        traj_params.obj_rot[start + k] = res.params.obj_rot[k];
        traj_params.obj_trans[start + k] = res.params.obj_trans[k];
        traj_params.hand_rot[start + k] = res.params.hand_rot[k];
        traj_params.hand_trans[start + k] = res.params.hand_trans[k];
        failed[start + k] = 0;
      }
      traj_params.obj_log_scale = res.params.obj_log_scale;
      traj_params.hand_log_scale = res.params.hand_log_scale;
      diag.window_starts.push_back(start);
      diag.window_traces.push_back(std::move(res.trace));
      diag.window_terms.push_back(std::move(res.terms));
    } catch (const std::exception& e) {
      for (int k = 0; k < w; ++k) failed[start + k] = 1;
      diag.warnings.push_back("window at frame " + std::to_string(start) + " failed: " + e.what());
    }
  }
  fix_quaternion_trajectory(traj_params.obj_rot);
  fix_quaternion_trajectory(traj_params.hand_rot);

  const auto t_end = std::chrono::steady_clock::now();
  diag.runtime_seconds = std::chrono::duration<double>(t_end - t_start).count();
  diag.hours_per_100_frames = diag.runtime_seconds / 3600.0 * 100.0 / std::max(1, n);

  TrajectoryData out;
  out.object_scale = std::exp(traj_params.obj_log_scale);
  out.hand_scale = std::exp(traj_params.hand_log_scale);
  for (int t = 0; t < n; ++t) {
    Pose po;
    po.rotation = traj_params.obj_rot[t];
    po.translation = traj_params.obj_trans[t];
    po.scale = out.object_scale;
    out.object.push_back(po);
    Pose ph;
    ph.rotation = traj_params.hand_rot[t];
    ph.translation = traj_params.hand_trans[t];
    ph.scale = out.hand_scale;
    out.hand.push_back(ph);
    out.contact.push_back(seq.hand.frames[t].contact_flag ? 1 : 0);
    out.failed.push_back(failed[t]);
  }
  out.diagnostics = Json{{"runtime_seconds", diag.runtime_seconds},
                         {"hours_per_100_frames", diag.hours_per_100_frames},
                         {"object_sog_size", diag.object_sog_size},
                         {"windows", diag.window_starts.size()},
                         {"warnings", diag.warnings}};
  return out;
}

MetricReport run_eval(const TrajectoryData& pred, const TrajectoryData& gt,
                      const std::vector<Vec3>& object_points, const HandTrack& hand, double fps,
                      const std::vector<Vec3>* pred_template, const std::vector<Vec3>* gt_template) {
  MetricReport report;
  const int n = pred.frame_count();
  if (gt.frame_count() != n) throw std::runtime_error("trajectory shape mismatch");

  // Template quality: similarity-ICP then CD / F10.
  try {
    std::vector<Vec3> a, b;
    if (pred_template != nullptr && gt_template != nullptr) {
      a = *pred_template;
      b = *gt_template;
    } else {
      a = object_points;
      for (Vec3& p : a) p *= pred.object_scale;
      b = object_points;
      for (Vec3& p : b) p *= gt.object_scale;
    }
    const IcpResult icp = icp_align(a, b);
    for (Vec3& p : a) p = icp.apply(p);
    report.cd_cm = 100.0 * chamfer_distance(a, b);
    report.f10_pct = f_score(a, b, kFScoreThresholdM);
  } catch (const std::exception&) {
    report.success = false;
  }

  // Per-frame posed geometry.
  std::vector<std::vector<Vec3>> pred_obj(n), gt_obj(n), pred_joints(n), gt_joints(n);
  std::vector<Vec3> pred_hand_root(n), gt_hand_root(n), pred_obj_root(n), gt_obj_root(n);
  for (int t = 0; t < n; ++t) {
    pred_obj[t] = pose_points(object_points, pred.object[t]);
    gt_obj[t] = pose_points(object_points, gt.object[t]);
    pred_joints[t] = pose_points(hand.frames[t].local_joints, pred.hand[t]);
    gt_joints[t] = pose_points(hand.frames[t].local_joints, gt.hand[t]);
    pred_hand_root[t] = pred_joints[t][0];
    gt_hand_root[t] = gt_joints[t][0];
    pred_obj_root[t] = centroid(pred_obj[t]);
    gt_obj_root[t] = centroid(gt_obj[t]);
  }

  try {
    report.mpjpe_mm = mpjpe(pred_joints, gt_joints);
  } catch (const std::exception&) {
    report.success = false;
  }
  try {
    report.cd_h_cm = cd_hand_relative(pred_obj, pred_hand_root, gt_obj, gt_hand_root);
    if (report.cd_h_cm >= 1000.0) report.success = false;
  } catch (const std::exception&) {
    report.success = false;
  }
  try {
    report.acc_h = acceleration_error(pred_hand_root, gt_hand_root, fps);
    report.acc_o = acceleration_error(pred_obj_root, gt_obj_root, fps);
  } catch (const std::exception&) {
    report.success = false;
  }
  try {
    report.mrrpe_mm = mrrpe(pred_hand_root, pred_obj_root, gt_hand_root, gt_obj_root);
  } catch (const std::exception&) {
    report.success = false;
  }
  return report;
}

}  // namespace sogtrack
