#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "keyframes/keyframes.hpp"

using namespace sogtrack;

namespace {

FrameFeatures features_from(const std::vector<std::vector<double>>& rows) {
  FrameFeatures f;
  f.descriptors.resize(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) f.descriptors(i, j) = rows[i][j];
  return f;
}

FrameFeatures random_features(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  FrameFeatures f;
  f.descriptors.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) f.descriptors(i, j) = g(rng);
  return f;
}

// A small instance where the duplicate pair makes diversity decisive while
// three well-balanced frames clearly dominate the rest.
FrameFeatures duplicate_pair_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.02);
  std::vector<std::vector<double>> rows = {
      {1.0, 0.1, 0.0, 0.0},  // near-orthogonal, moderate norms
      {0.1, 1.0, 0.1, 0.0},
      {0.0, 0.1, 1.0, 0.1},
      {0.7, 0.7, 0.0, 0.1},  // duplicate pair below
      {0.7, 0.7, 0.0, 0.1},
      {3.0, 3.0, 3.0, 3.0},  // extreme norm, poorly balanced
  };
  for (auto& row : rows)
    for (auto& v : row) v += g(rng);
  rows[4] = rows[3];  // keep the duplicate exact
  return features_from(rows);
}

}  // namespace

TEST_CASE("score computation") {
  const FrameFeatures same = features_from({{1, 0, 0}, {1, 0, 0}});
  const ScoreResult sr = compute_scores(same);
  CHECK(sr.similarity(0, 1) == doctest::Approx(1.0));
  CHECK(sr.similarity(1, 0) == doctest::Approx(1.0));

  const FrameFeatures ortho = features_from({{1, 0, 0}, {0, 1, 0}});
  CHECK(compute_scores(ortho).similarity(0, 1) == doctest::Approx(0.0));

  std::mt19937_64 rng(2);
  const ScoreResult rs = compute_scores(random_features(rng, 12, 6));
  for (int t = 0; t < 12; ++t) {
    CHECK(rs.scores.mean_similarity(t) >= 0.0);
    CHECK(rs.scores.mean_similarity(t) <= 1.0);
    CHECK(rs.scores.magnitude(t) >= 0.0);
    CHECK(rs.scores.magnitude(t) <= 1.0);
    CHECK(rs.scores.variance(t) >= 0.0);
    CHECK(rs.scores.variance(t) <= 1.0);
  }

  FrameFeatures bad = random_features(rng, 3, 4);
  bad.descriptors(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(compute_scores(bad), "features contain NaN", std::runtime_error);
}

TEST_CASE("constant channels normalize to zero") {
  // Rows are permutations of {1,1,0,0} with every pairwise dot equal, so all
  // three channels are bit-exactly constant (every per-row reduction sees the
  // same multiset of exactly-representable addends) and must normalize to
  // zeros.
  const FrameFeatures f = features_from({{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 1, 0}});
  const ScoreResult sr = compute_scores(f);
  for (int t = 0; t < 3; ++t) {
    CHECK(sr.scores.magnitude(t) == 0.0);
    CHECK(sr.scores.mean_similarity(t) == 0.0);
    CHECK(sr.scores.variance(t) == 0.0);
  }
}

TEST_CASE("greedy selection boundaries") {
  std::mt19937_64 rng(5);
  const FrameFeatures f = random_features(rng, 6, 5);
  std::vector<int> all = greedy_select(f, 6, 1.0);
  CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5});

  const ScoreResult sr = compute_scores(f);
  int best = 0;
  for (int t = 1; t < 6; ++t)
    if (balance_term(sr.scores, t) < balance_term(sr.scores, best)) best = t;
  CHECK(greedy_select(f, 1, 1.0) == std::vector<int>{best});

  CHECK_THROWS_WITH_AS(greedy_select(f, 7, 1.0), "keyframe count exceeds frame count",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(greedy_select(f, 0, 1.0), "keyframe count must be positive",
                       std::runtime_error);
}

TEST_CASE("duplicate pair instances solved exactly") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const FrameFeatures f = duplicate_pair_instance(seed);
    const ScoreResult sr = compute_scores(f);
    const std::vector<int> greedy = greedy_select(f, 3, 1.0);
    const std::vector<int> brute = brute_force_select(f, 3, 1.0);
    CHECK(keyframe_objective(sr, greedy, 1.0) ==
          doctest::Approx(keyframe_objective(sr, brute, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("zero diversity weight selects the most balanced frames") {
  std::mt19937_64 rng(8);
  const FrameFeatures f = random_features(rng, 9, 5);
  const ScoreResult sr = compute_scores(f);
  std::vector<int> order(9);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return balance_term(sr.scores, a) < balance_term(sr.scores, b);
  });
  std::vector<int> expected(order.begin(), order.begin() + 4);
  std::sort(expected.begin(), expected.end());
  CHECK(brute_force_select(f, 4, 0.0) == expected);
  CHECK(greedy_select(f, 4, 0.0) == expected);
}

TEST_CASE("greedy never beats brute force") {
  std::mt19937_64 rng(31);
  int equal = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const FrameFeatures f = random_features(rng, 8, 5);
    const ScoreResult sr = compute_scores(f);
    const double g = keyframe_objective(sr, greedy_select(f, 3, 1.0), 1.0);
    const double b = keyframe_objective(sr, brute_force_select(f, 3, 1.0), 1.0);
    CHECK(g >= b - 1e-12);
    if (g <= b + 1e-12) ++equal;
  }
  CHECK(equal >= 1);  // the heuristic matches the optimum at least sometimes
}

TEST_CASE("selection invariant to uniform descriptor scaling") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const FrameFeatures f = random_features(rng, 10, 6);
    FrameFeatures scaled = f;
    scaled.descriptors *= 7.5;
    CHECK(greedy_select(f, 4, 1.0) == greedy_select(scaled, 4, 1.0));
  }
}

TEST_CASE("combinatorial budget enforced") {
  std::mt19937_64 rng(3);
  const FrameFeatures f = random_features(rng, 40, 4);
  CHECK_THROWS_WITH_AS(brute_force_select(f, 20, 1.0), "combinatorial budget exceeded",
                       std::runtime_error);
}

TEST_CASE("random selection is seeded and sorted") {
  const std::vector<int> a = random_select(20, 5, 99);
  const std::vector<int> b = random_select(20, 5, 99);
  const std::vector<int> c = random_select(20, 5, 100);
  CHECK(a == b);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());  // distinct
  CHECK(a.size() == 5);
  CHECK(a != c);
  for (int idx : a) {
    CHECK(idx >= 0);
    CHECK(idx < 20);
  }
}
