#include "sogtrack/sogtrack.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "pipeline/overlay.hpp"
#include "pipeline/synth.hpp"
#include "pipeline/tracker.hpp"

namespace {

thread_local std::string g_last_error;

sogtrack_status fail(const char* message) {
  g_last_error = message;
  return SOGTRACK_ERROR;
}

sogtrack_status fail(const std::exception& e) {
  g_last_error = e.what();
  return SOGTRACK_ERROR;
}

sogtrack_status bad_arg(const char* message) {
  g_last_error = message;
  return SOGTRACK_INVALID_ARGUMENT;
}

sogtrack_status copy_out(const std::string& s, char* buffer, size_t capacity, size_t* required) {
  if (required != nullptr) *required = s.size() + 1;
  if (buffer == nullptr) return SOGTRACK_OK;
  if (capacity < s.size() + 1) {
    g_last_error = "output buffer too small";
    return SOGTRACK_BUFFER_TOO_SMALL;
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
  return SOGTRACK_OK;
}

sogtrack::TrackConfig parse_config(const char* config_json) {
  if (config_json == nullptr || config_json[0] == '\0') return sogtrack::TrackConfig{};
  return sogtrack::config_from_json(sogtrack::Json::parse(config_json));
}

void write_trace_csvs(const sogtrack::TrackDiagnostics& diag, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (size_t w = 0; w < diag.window_traces.size(); ++w) {
    char name[48];
    std::snprintf(name, sizeof(name), "window_%04d.csv", diag.window_starts[w]);
    std::ofstream out(std::filesystem::path(dir) / name);
    out << "iteration,total,energy,j2d,depth,sil,contact,smooth\n";
    for (size_t i = 0; i < diag.window_traces[w].size(); ++i) {
      const sogtrack::TermBreakdown& t = diag.window_terms[w][i];
      out << i << ',' << diag.window_traces[w][i] << ',' << t.energy << ',' << t.j2d << ','
          << t.depth << ',' << t.sil << ',' << t.contact << ',' << t.smooth << '\n';
    }
  }
}

}  // namespace

struct sogtrack_sequence {
  sogtrack::Sequence seq;
};

struct sogtrack_trajectory {
  sogtrack::TrajectoryData traj;
};

extern "C" {

const char* sogtrack_version(void) { return "1.0.0"; }

const char* sogtrack_last_error(void) { return g_last_error.c_str(); }

sogtrack_status sogtrack_default_config(char* buffer, size_t capacity, size_t* required) {
  try {
    return copy_out(sogtrack::config_json(sogtrack::TrackConfig{}).dump(2), buffer, capacity,
                    required);
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_sequence_open(const char* manifest_path, sogtrack_sequence** out) {
  if (manifest_path == nullptr || out == nullptr) return bad_arg("null argument");
  try {
    auto* handle = new sogtrack_sequence{sogtrack::load_sequence(manifest_path)};
    *out = handle;
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

void sogtrack_sequence_close(sogtrack_sequence* seq) { delete seq; }

sogtrack_status sogtrack_sequence_frame_count(const sogtrack_sequence* seq, int* out) {
  if (seq == nullptr || out == nullptr) return bad_arg("null argument");
  *out = seq->seq.frame_count();
  return SOGTRACK_OK;
}

sogtrack_status sogtrack_track(const sogtrack_sequence* seq, const char* config_json,
                               const char* diagnostics_dir, sogtrack_trajectory** out) {
  if (seq == nullptr || out == nullptr) return bad_arg("null argument");
  try {
    const sogtrack::TrackConfig config = parse_config(config_json);
    sogtrack::TrackDiagnostics diag;
    auto* handle = new sogtrack_trajectory{sogtrack::run_tracking(seq->seq, config, &diag)};
    if (diagnostics_dir != nullptr && diagnostics_dir[0] != '\0')
      write_trace_csvs(diag, diagnostics_dir);
    *out = handle;
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_trajectory_open(const char* path, sogtrack_trajectory** out) {
  if (path == nullptr || out == nullptr) return bad_arg("null argument");
  try {
    *out = new sogtrack_trajectory{sogtrack::read_trajectory(path)};
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_trajectory_save(const sogtrack_trajectory* traj, const char* path) {
  if (traj == nullptr || path == nullptr) return bad_arg("null argument");
  try {
    sogtrack::write_trajectory(path, traj->traj);
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

void sogtrack_trajectory_close(sogtrack_trajectory* traj) { delete traj; }

sogtrack_status sogtrack_trajectory_frame_count(const sogtrack_trajectory* traj, int* out) {
  if (traj == nullptr || out == nullptr) return bad_arg("null argument");
  *out = traj->traj.frame_count();
  return SOGTRACK_OK;
}

sogtrack_status sogtrack_trajectory_object_pose(const sogtrack_trajectory* traj, int frame,
                                                double quat_wxyz[4], double translation[3],
                                                double* scale) {
  if (traj == nullptr) return bad_arg("null argument");
  if (frame < 0 || frame >= traj->traj.frame_count()) return bad_arg("frame out of range");
  const sogtrack::Pose& p = traj->traj.object[frame];
  if (quat_wxyz != nullptr)
    for (int k = 0; k < 4; ++k) quat_wxyz[k] = p.rotation[k];
  if (translation != nullptr)
    for (int k = 0; k < 3; ++k) translation[k] = p.translation[k];
  if (scale != nullptr) *scale = traj->traj.object_scale;
  return SOGTRACK_OK;
}

sogtrack_status sogtrack_evaluate(const sogtrack_sequence* seq, const sogtrack_trajectory* pred,
                                  const char* gt_trajectory_path, const char* report_path) {
  if (seq == nullptr || pred == nullptr || gt_trajectory_path == nullptr ||
      report_path == nullptr)
    return bad_arg("null argument");
  try {
    const sogtrack::TrajectoryData gt = sogtrack::read_trajectory(gt_trajectory_path);
    const sogtrack::TrackConfig config;
    int population = 0;
    for (double op : seq->seq.asset.opacities) population += op >= config.min_opacity;
    if (population < 1) return fail("no object surface samples");
    const sogtrack::ObjectSoG object =
        sogtrack::to_object_sog(seq->seq.asset, std::min(config.object_count, population),
                                config.sigma_factor, config.min_opacity);
    std::vector<sogtrack::Vec3> points;
    for (const auto& g : object.gaussians) points.push_back(g.mu);
    const sogtrack::MetricReport report =
        sogtrack::run_eval(pred->traj, gt, points, seq->seq.hand, seq->seq.manifest.fps);
    sogtrack::write_metric_report(report_path, report);
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_synth(const char* spec_json, const char* out_dir, char* manifest_path,
                               size_t capacity) {
  if (out_dir == nullptr) return bad_arg("null argument");
  try {
    sogtrack::SynthSpec spec;
    if (spec_json != nullptr && spec_json[0] != '\0')
      spec = sogtrack::synth_spec_from_json(sogtrack::Json::parse(spec_json));
    const sogtrack::SynthResult result = sogtrack::synth_scene(spec, out_dir);
    if (manifest_path != nullptr)
      return copy_out(result.manifest_path, manifest_path, capacity, nullptr);
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_keyframes(const char* features_path, int k, double lambda_div,
                                   const char* mode, unsigned long long seed, int* indices,
                                   size_t capacity, size_t* count) {
  if (features_path == nullptr || mode == nullptr || count == nullptr)
    return bad_arg("null argument");
  try {
    const sogtrack::FeatureFile ff = sogtrack::read_features(features_path);
    std::vector<int> selected;
    const std::string m(mode);
    if (m == "greedy")
      selected = sogtrack::greedy_select(ff.features, k, lambda_div);
    else if (m == "brute")
      selected = sogtrack::brute_force_select(ff.features, k, lambda_div);
    else if (m == "random")
      selected = sogtrack::random_select(ff.features.count(), k, seed);
    else
      return fail("unknown keyframe mode");
    *count = selected.size();
    if (indices != nullptr) {
      if (capacity < selected.size()) {
        g_last_error = "output buffer too small";
        return SOGTRACK_BUFFER_TOO_SMALL;
      }
      for (size_t i = 0; i < selected.size(); ++i) indices[i] = selected[i];
    }
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

sogtrack_status sogtrack_overlay(const sogtrack_sequence* seq, const sogtrack_trajectory* traj,
                                 const char* config_json, const char* out_dir) {
  if (seq == nullptr || traj == nullptr || out_dir == nullptr) return bad_arg("null argument");
  try {
    sogtrack::run_overlay(seq->seq, traj->traj, parse_config(config_json), out_dir);
    return SOGTRACK_OK;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

}  // extern "C"
