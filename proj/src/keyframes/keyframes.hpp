#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sogtrack {

// Per-frame global descriptors, one row per frame.
struct FrameFeatures {
  Eigen::MatrixXd descriptors;  // N x d
  int count() const { return static_cast<int>(descriptors.rows()); }
};

// Balance channels of the selection objective, each min-max normalized to
// [0,1]; a constant channel normalizes to all zeros.
struct KeyframeScores {
  Eigen::VectorXd mean_similarity;  // off-diagonal mean cosine similarity
  Eigen::VectorXd magnitude;        // pre-normalization row norm
  Eigen::VectorXd variance;         // variance across feature dimensions
};

struct ScoreResult {
  Eigen::MatrixXd similarity;  // N x N, dot products of re-normalized rows
  KeyframeScores scores;
};

ScoreResult compute_scores(const FrameFeatures& features);

// Balance term |s-1/2| + |n-1/2| + |v-1/2| of one frame.
double balance_term(const KeyframeScores& scores, int t);

// Full selection objective of a subset: sum of balance terms plus
// lambda_div * sum over members of their max similarity to the other members
// (diversity term skipped for singleton subsets).
double keyframe_objective(const ScoreResult& sr, const std::vector<int>& subset, double lambda_div);

// Greedy: seed = most balanced frame, then repeatedly add the frame minimizing
// balance + lambda_div * max similarity to the selected set. Ties to the
// lowest index; result sorted ascending.
std::vector<int> greedy_select(const FrameFeatures& features, int k, double lambda_div);

// Exhaustive argmin of keyframe_objective over all k-subsets; ties to the
// lexicographically smallest index set. Errors when C(N,k) > 1e6.
std::vector<int> brute_force_select(const FrameFeatures& features, int k, double lambda_div);

// Ablation mode: k distinct frames drawn with the given seed, sorted.
std::vector<int> random_select(int frame_count, int k, std::uint64_t seed);

inline constexpr double kLambdaDivDefault = 1.0;
inline constexpr int kKeyframeCountDefault = 4;

}  // namespace sogtrack
