#include "keyframes/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sogtrack {

namespace {

Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo <= 0.0) return Eigen::VectorXd::Zero(v.size());
  return (v.array() - lo) / (hi - lo);
}

}  // namespace

ScoreResult compute_scores(const FrameFeatures& features) {
  const Eigen::MatrixXd& f = features.descriptors;
  if (!f.allFinite()) throw std::runtime_error("features contain NaN");
  const int n = static_cast<int>(f.rows());
  if (n < 1) throw std::runtime_error("empty feature set");

  Eigen::VectorXd norms(n);
  Eigen::MatrixXd unit = f;
  for (int i = 0; i < n; ++i) {
    norms[i] = f.row(i).norm();
    if (norms[i] > 0.0) unit.row(i) /= norms[i];
  }
  ScoreResult out;
  out.similarity = unit * unit.transpose();

  Eigen::VectorXd mean_sim(n), variance(n);
  for (int i = 0; i < n; ++i) {
    mean_sim[i] = n > 1 ? (out.similarity.row(i).sum() - out.similarity(i, i)) / (n - 1) : 0.0;
    const double mu = f.row(i).mean();
    variance[i] = (f.row(i).array() - mu).square().mean();
  }
  out.scores.mean_similarity = min_max_normalize(mean_sim);
  out.scores.magnitude = min_max_normalize(norms);
  out.scores.variance = min_max_normalize(variance);
  return out;
}

double balance_term(const KeyframeScores& scores, int t) {
  return std::abs(scores.mean_similarity[t] - 0.5) + std::abs(scores.magnitude[t] - 0.5) +
         std::abs(scores.variance[t] - 0.5);
}

double keyframe_objective(const ScoreResult& sr, const std::vector<int>& subset, double lambda_div) {
  double obj = 0.0;
  for (int t : subset) obj += balance_term(sr.scores, t);
  if (subset.size() >= 2) {
    for (int t : subset) {
      double max_sim = -std::numeric_limits<double>::infinity();
      for (int u : subset)
        if (u != t) max_sim = std::max(max_sim, sr.similarity(t, u));
      obj += lambda_div * max_sim;
    }
  }
  return obj;
}

std::vector<int> greedy_select(const FrameFeatures& features, int k, double lambda_div) {
  const int n = features.count();
  if (k > n) throw std::runtime_error("keyframe count exceeds frame count");
  if (k < 1) throw std::runtime_error("keyframe count must be positive");
  const ScoreResult sr = compute_scores(features);

  std::vector<int> selected;
  std::vector<char> used(n, 0);
  int seed = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    const double b = balance_term(sr.scores, t);
    if (b < best) {
      best = b;
      seed = t;
    }
  }
  selected.push_back(seed);
  used[seed] = 1;

  while (static_cast<int>(selected.size()) < k) {
    int pick = -1;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      if (used[t]) continue;
      double max_sim = -std::numeric_limits<double>::infinity();
      for (int s : selected) max_sim = std::max(max_sim, sr.similarity(t, s));
      const double cost = balance_term(sr.scores, t) + lambda_div * max_sim;
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = t;
      }
    }
    selected.push_back(pick);
    used[pick] = 1;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<int> brute_force_select(const FrameFeatures& features, int k, double lambda_div) {
  const int n = features.count();
  if (k > n) throw std::runtime_error("keyframe count exceeds frame count");
  if (k < 1) throw std::runtime_error("keyframe count must be positive");
  double combos = 1.0;
  for (int i = 0; i < k; ++i) combos = combos * (n - i) / (i + 1);
  if (combos > 1e6) throw std::runtime_error("combinatorial budget exceeded");
  const ScoreResult sr = compute_scores(features);

  std::vector<int> subset(k), best_subset;
  for (int i = 0; i < k; ++i) subset[i] = i;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    const double obj = keyframe_objective(sr, subset, lambda_div);
    if (obj < best) {
      best = obj;
      best_subset = subset;
    }
    // Next combination in lexicographic order.
    int i = k - 1;
    while (i >= 0 && subset[i] == n - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return best_subset;
}

std::vector<int> random_select(int frame_count, int k, std::uint64_t seed) {
  if (k > frame_count) throw std::runtime_error("keyframe count exceeds frame count");
  std::vector<int> idx(frame_count);
  for (int i = 0; i < frame_count; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> dist(i, frame_count - 1);
    std::swap(idx[i], idx[dist(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace sogtrack
