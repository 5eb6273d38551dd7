#include "optim/window.hpp"

#include <stdexcept>

namespace sogtrack {

double total_objective(const WindowProblem& problem, const ParamBlocks& params) {
  return freeze_window(problem, params).value;
}

WindowResult optimize_window(const WindowProblem& problem, const ParamBlocks& init,
                             const AdamWConfig& opt_config, const LearningRates& lrs,
                             int iterations) {
  WindowResult res;
  res.params = init;
  const int nf = res.params.frames();
  const std::vector<double> lr_table = lrs.per_param(nf);
  OptimState state;
  state.config = opt_config;
  state.init(res.params.dof());
  std::vector<double> flat;
  res.trace.reserve(iterations + 1);

  for (int it = 0; it < iterations; ++it) {
    const FrozenWindow fw = freeze_window(problem, res.params);
    res.trace.push_back(fw.value);
    res.terms.push_back(fw.terms);
    const std::vector<double> grad = frozen_gradient(problem, res.params, fw);
    res.params.flatten(flat);
    adamw_step(state, flat, grad, lr_table);
    res.params.unflatten(flat);
    for (int t = 0; t < nf; ++t) {
      res.params.obj_rot[t] = quat_normalize(res.params.obj_rot[t]);
      res.params.hand_rot[t] = quat_normalize(res.params.hand_rot[t]);
    }
  }
  const FrozenWindow final_fw = freeze_window(problem, res.params);
  res.trace.push_back(final_fw.value);
  res.terms.push_back(final_fw.terms);
  res.non_improvement = res.trace.back() > res.trace.front();
  return res;
}

namespace {

ParamBlocks slice_params(const ParamBlocks& full, int start, int count) {
  ParamBlocks p;
  p.obj_rot.assign(full.obj_rot.begin() + start, full.obj_rot.begin() + start + count);
  p.obj_trans.assign(full.obj_trans.begin() + start, full.obj_trans.begin() + start + count);
  p.obj_log_scale = full.obj_log_scale;
  p.hand_rot.assign(full.hand_rot.begin() + start, full.hand_rot.begin() + start + count);
  p.hand_trans.assign(full.hand_trans.begin() + start, full.hand_trans.begin() + start + count);
  p.hand_log_scale = full.hand_log_scale;
  return p;
}

}  // namespace

ParamBlocks slide_windows(const std::vector<const FrameObservation*>& frames,
                          const ObjectSoG& object, const ObjectiveConfig& obj_config,
                          const AdamWConfig& opt_config, const LearningRates& lrs,
                          const WindowConfig& window_config, const ParamBlocks& init,
                          std::vector<WindowResult>* window_results) {
  const int n = static_cast<int>(frames.size());
  if (init.frames() != n) throw std::runtime_error("trajectory length mismatch");
  ParamBlocks traj = init;
  const int w = std::min(window_config.window_size, n);
  for (int start = 0; start + w <= n; start += window_config.stride) {
    WindowProblem problem;
    problem.frames.assign(frames.begin() + start, frames.begin() + start + w);
    problem.object = &object;
    problem.config = obj_config;
    WindowResult res = optimize_window(problem, slice_params(traj, start, w), opt_config, lrs,
                                       window_config.iterations);
    for (int k = 0; k < w; ++k) {
      traj.obj_rot[start + k] = res.params.obj_rot[k];
      traj.obj_trans[start + k] = res.params.obj_trans[k];
      traj.hand_rot[start + k] = res.params.hand_rot[k];
      traj.hand_trans[start + k] = res.params.hand_trans[k];
    }
    traj.obj_log_scale = res.params.obj_log_scale;
    traj.hand_log_scale = res.params.hand_log_scale;
    if (window_results != nullptr) window_results->push_back(std::move(res));
  }
  fix_quaternion_trajectory(traj.obj_rot);
  fix_quaternion_trajectory(traj.hand_rot);
  return traj;
}

std::vector<double> temporal_guidance(const std::vector<double>& v, const std::vector<double>& x_t,
                                      const std::vector<double>& x_prev, double lambda_temp) {
  if (v.size() != x_t.size() || v.size() != x_prev.size())
    throw std::runtime_error("latent length mismatch");
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lambda_temp * (x_t[i] - x_prev[i]);
  return out;
}

}  // namespace sogtrack
