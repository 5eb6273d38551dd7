#include "optim/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace sogtrack {

void adamw_step(OptimState& state, std::span<double> params, std::span<const double> grads,
                std::span<const double> lrs) {
  if (params.size() != state.m.size() || grads.size() != params.size() || lrs.size() != params.size())
    throw std::runtime_error("optimizer state shape mismatch");
  ++state.step_count;
  const AdamWConfig& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lrs[i] * (mhat / (std::sqrt(vhat) + c.epsilon) + c.weight_decay * params[i]);
  }
}

}  // namespace sogtrack
