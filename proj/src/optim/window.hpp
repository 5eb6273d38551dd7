#pragma once

#include "optim/adamw.hpp"
#include "optim/objective.hpp"

namespace sogtrack {

struct WindowConfig {
  int window_size = 8;
  int stride = 1;
  int iterations = 100;
};

struct WindowResult {
  ParamBlocks params;
  std::vector<double> trace;         // objective value at iteration 0..iterations
  std::vector<TermBreakdown> terms;  // aligned with trace
  bool non_improvement = false;      // final objective exceeded the initial one
};

// Objective value at params (all discrete branches taken at params itself).
double total_objective(const WindowProblem& problem, const ParamBlocks& params);

// Freeze -> gradient -> AdamW step -> renormalize quaternions, repeated
// `iterations` times. The trace has iterations+1 entries.
WindowResult optimize_window(const WindowProblem& problem, const ParamBlocks& init,
                             const AdamWConfig& opt_config, const LearningRates& lrs,
                             int iterations);

// Optimizes overlapping windows over the whole clip. Frames covered by several
// windows keep the values written by the latest window; global scales carry
// forward between windows. Ends with the quaternion sign fix on both pose
// tracks. Windows start at 0, stride apart, while start + window fits; clips
// shorter than the window get one full-clip window.
ParamBlocks slide_windows(const std::vector<const FrameObservation*>& frames,
                          const ObjectSoG& object, const ObjectiveConfig& obj_config,
                          const AdamWConfig& opt_config, const LearningRates& lrs,
                          const WindowConfig& window_config, const ParamBlocks& init,
                          std::vector<WindowResult>* window_results = nullptr);

// Guided latent velocity: v - lambda * (x_t - x_prev).
std::vector<double> temporal_guidance(const std::vector<double>& v, const std::vector<double>& x_t,
                                      const std::vector<double>& x_prev, double lambda_temp);

inline constexpr double kLambdaTempDefault = 0.2;

}  // namespace sogtrack
