#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sogtrack {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

// Decoupled-weight-decay adaptive moment state over a flat parameter vector.
struct OptimState {
  AdamWConfig config;
  std::vector<double> m;
  std::vector<double> v;
  long step_count = 0;

  void init(size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    step_count = 0;
  }
};

// One bias-corrected update with a per-parameter learning rate.
void adamw_step(OptimState& state, std::span<double> params, std::span<const double> grads,
                std::span<const double> lrs);

}  // namespace sogtrack
