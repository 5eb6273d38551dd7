#include <doctest.h>

#include <cmath>

#include "optim/window.hpp"
#include "scene_fixture.hpp"

using namespace sogtrack;
using sogtest::make_scene;
using sogtest::perturb_params;
using sogtest::SceneSpec;

TEST_CASE("zero iterations is a no-op") {
  auto scene = make_scene(SceneSpec{});
  const WindowResult r =
      optimize_window(scene->problem, scene->gt, AdamWConfig{}, LearningRates{}, 0);
  REQUIRE(r.trace.size() == 1);
  for (int t = 0; t < scene->gt.frames(); ++t) {
    CHECK((r.params.obj_rot[t] - scene->gt.obj_rot[t]).norm() == 0.0);
    CHECK((r.params.obj_trans[t] - scene->gt.obj_trans[t]).norm() == 0.0);
  }
}

TEST_CASE("stationary window stays put") {
  SceneSpec spec;
  spec.constant_pose = true;
  auto scene = make_scene(spec);
  // AdamW moves parameters at ~lr for *any* nonzero gradient, so only terms whose
  // gradient vanishes exactly at the optimum can hold still.  At the ground truth the
  // joint reprojection residuals are bit-for-bit zero, the constant pose zeroes the
  // smoothness term, and every energy row sits on its clamped self-energy plateau.
  // The silhouette term is not minimized at the optimum, the pointmap medians differ
  // from the rendered means by rounding ulps (making the frozen depth sign noise),
  // and the contact round-trip leaves sub-ulp residuals that the epsilon floor in
  // Adam amplifies into visible drift -- disable those three.
  scene->problem.config.weights.sil = 0.0;
  scene->problem.config.weights.contact = 0.0;
  for (auto& obs : scene->obs) {
    obs.pm_median_o.reset();
    obs.pm_median_h.reset();
  }
  const double v0 = total_objective(scene->problem, scene->gt);
  const WindowResult r =
      optimize_window(scene->problem, scene->gt, AdamWConfig{}, LearningRates{}, 20);
  REQUIRE(r.trace.size() == 21);
  CHECK(std::abs(r.trace.back() - v0) <= 1e-6 * std::abs(v0));
  CHECK_FALSE(r.non_improvement);
  for (int t = 0; t < scene->gt.frames(); ++t)
    CHECK((r.params.obj_trans[t] - scene->gt.obj_trans[t]).norm() < 1e-12);
}

TEST_CASE("perturbed window improves") {
  SceneSpec spec;
  spec.seed = 23;
  auto scene = make_scene(spec);
  const ParamBlocks init = perturb_params(scene->gt, 5, 0.02, 0.005, 0.0);
  const WindowResult r =
      optimize_window(scene->problem, init, AdamWConfig{}, LearningRates{}, 40);
  CHECK(r.trace.front() > r.trace.back());
  CHECK_FALSE(r.non_improvement);
  for (double v : r.trace) CHECK(std::isfinite(v));
  CHECK(r.terms.size() == r.trace.size());
}

TEST_CASE("sliding windows cover ten frames with three windows") {
  SceneSpec spec;
  spec.frames = 10;
  spec.n_obj = 12;
  auto scene = make_scene(spec);
  WindowConfig wc;
  wc.window_size = 8;
  wc.stride = 1;
  wc.iterations = 0;
  std::vector<WindowResult> results;
  const ParamBlocks out = slide_windows(scene->problem.frames, scene->object,
                                        scene->problem.config, AdamWConfig{}, LearningRates{}, wc,
                                        scene->gt, &results);
  CHECK(results.size() == 3);  // starts 0, 1, 2
  for (int t = 0; t < 10; ++t) {
    const double d = std::min((out.obj_rot[t] - scene->gt.obj_rot[t]).norm(),
                              (out.obj_rot[t] + scene->gt.obj_rot[t]).norm());
    CHECK(d < 1e-12);  // zero iterations: values unchanged up to the sign fix
    CHECK((out.obj_trans[t] - scene->gt.obj_trans[t]).norm() == 0.0);
  }
}

TEST_CASE("short clips get one full window") {
  SceneSpec spec;
  spec.frames = 4;
  spec.n_obj = 12;
  auto scene = make_scene(spec);
  WindowConfig wc;
  wc.window_size = 8;
  wc.stride = 1;
  wc.iterations = 2;
  std::vector<WindowResult> results;
  slide_windows(scene->problem.frames, scene->object, scene->problem.config, AdamWConfig{},
                LearningRates{}, wc, scene->gt, &results);
  CHECK(results.size() == 1);
}

TEST_CASE("single covering window equals direct optimization") {
  SceneSpec spec;
  spec.frames = 3;
  auto scene = make_scene(spec);
  const ParamBlocks init = perturb_params(scene->gt, 3, 0.02, 0.004, 0.01);
  WindowConfig wc;
  wc.window_size = 3;
  wc.stride = 1;
  wc.iterations = 5;
  const ParamBlocks slid = slide_windows(scene->problem.frames, scene->object,
                                         scene->problem.config, AdamWConfig{}, LearningRates{}, wc,
                                         init, nullptr);
  const WindowResult direct =
      optimize_window(scene->problem, init, AdamWConfig{}, LearningRates{}, 5);
  for (int t = 0; t < 3; ++t) {
    const double d = std::min((slid.obj_rot[t] - direct.params.obj_rot[t]).norm(),
                              (slid.obj_rot[t] + direct.params.obj_rot[t]).norm());
    CHECK(d < 1e-12);
    CHECK((slid.obj_trans[t] - direct.params.obj_trans[t]).norm() < 1e-12);
  }
  CHECK(slid.obj_log_scale == doctest::Approx(direct.params.obj_log_scale).epsilon(1e-15));
}

TEST_CASE("trajectory length mismatch rejected") {
  SceneSpec spec;
  spec.frames = 3;
  auto scene = make_scene(spec);
  ParamBlocks wrong = scene->gt;
  wrong.obj_rot.pop_back();
  wrong.obj_trans.pop_back();
  WindowConfig wc;
  CHECK_THROWS_WITH_AS(slide_windows(scene->problem.frames, scene->object, scene->problem.config,
                                     AdamWConfig{}, LearningRates{}, wc, wrong, nullptr),
                       "trajectory length mismatch", std::runtime_error);
}

TEST_CASE("temporal guidance") {
  CHECK(temporal_guidance({1, 1}, {2, 0}, {0, 0}, 0.5) == std::vector<double>{0, 1});
  CHECK(temporal_guidance({1, 1}, {2, 0}, {0, 0}, 0.0) == std::vector<double>{1, 1});
  CHECK(temporal_guidance({3, -2}, {5, 5}, {5, 5}, 0.7) == std::vector<double>{3, -2});
  CHECK_THROWS_WITH_AS(temporal_guidance({1}, {1, 2}, {1, 2}, 0.5), "latent length mismatch",
                       std::runtime_error);
}
