#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sogtrack/sogtrack.h"

namespace {

using Json = nlohmann::json;

[[noreturn]] void die(const std::string& message) {
  std::cerr << Json{{"error", message}}.dump() << "\n";
  std::exit(1);
}

void check(sogtrack_status status) {
  if (status != SOGTRACK_OK) die(sogtrack_last_error());
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) die("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    die(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

// Dotted-path override: "weights.depth=500".
void apply_set(Json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) die("override must be key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  Json* node = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) die("bad override path: " + path);
    if (dot == std::string::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string config_with_overrides(const std::string& config_path,
                                  const std::vector<std::string>& sets) {
  Json j;
  if (!config_path.empty()) {
    j = load_json_file(config_path);
  } else {
    size_t required = 0;
    check(sogtrack_default_config(nullptr, 0, &required));
    std::string buf(required, '\0');
    check(sogtrack_default_config(buf.data(), buf.size(), &required));
    buf.resize(required - 1);
    j = Json::parse(buf);
  }
  for (const std::string& s : sets) apply_set(j, s);
  return j.dump();
}

struct SequenceGuard {
  sogtrack_sequence* handle = nullptr;
  ~SequenceGuard() { sogtrack_sequence_close(handle); }
};

struct TrajectoryGuard {
  sogtrack_trajectory* handle = nullptr;
  ~TrajectoryGuard() { sogtrack_trajectory_close(handle); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-of-Gaussians object pose tracker"};
  app.require_subcommand(1);

  // keyframes
  auto* kf = app.add_subcommand("keyframes", "Select keyframes from a feature file");
  std::string kf_features, kf_mode = "greedy", kf_out;
  int kf_k = 4;
  double kf_lambda = 1.0;
  unsigned long long kf_seed = 0;
  kf->add_option("--features", kf_features, "Feature manifest JSON")->required();
  kf->add_option("-k,--count", kf_k, "Number of keyframes");
  kf->add_option("--lambda-div", kf_lambda, "Diversity weight");
  kf->add_option("--mode", kf_mode, "greedy | brute | random");
  kf->add_option("--seed", kf_seed, "Seed for random mode");
  kf->add_option("--out", kf_out, "Output JSON path (stdout when omitted)");

  // track
  auto* tr = app.add_subcommand("track", "Track a sequence");
  std::string tr_sequence, tr_config, tr_out = "trajectory.json", tr_diag;
  std::vector<std::string> tr_sets;
  tr->add_option("--sequence", tr_sequence, "Sequence manifest JSON")->required();
  tr->add_option("--config", tr_config, "Config JSON (defaults when omitted)");
  tr->add_option("--set", tr_sets, "Dotted config override, e.g. weights.depth=500");
  tr->add_option("--out", tr_out, "Output trajectory path");
  tr->add_option("--diagnostics", tr_diag, "Directory for objective-trace CSVs");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a trajectory against ground truth");
  std::string ev_sequence, ev_pred, ev_gt, ev_out = "report.json";
  ev->add_option("--sequence", ev_sequence, "Sequence manifest JSON")->required();
  ev->add_option("--pred", ev_pred, "Predicted trajectory JSON")->required();
  ev->add_option("--gt", ev_gt, "Ground-truth trajectory JSON")->required();
  ev->add_option("--out", ev_out, "Metric report output path");

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a synthetic sequence");
  std::string sy_spec, sy_out;
  std::vector<std::string> sy_sets;
  sy->add_option("--spec", sy_spec, "Scene spec JSON (defaults when omitted)");
  sy->add_option("--set", sy_sets, "Dotted spec override, e.g. occluder.mode=parked");
  sy->add_option("--out", sy_out, "Output directory")->required();

  // overlay
  auto* ov = app.add_subcommand("overlay", "Render projected-model overlays");
  std::string ov_sequence, ov_traj, ov_config, ov_out;
  std::vector<std::string> ov_sets;
  ov->add_option("--sequence", ov_sequence, "Sequence manifest JSON")->required();
  ov->add_option("--trajectory", ov_traj, "Trajectory JSON")->required();
  ov->add_option("--config", ov_config, "Config JSON");
  ov->add_option("--set", ov_sets, "Dotted config override");
  ov->add_option("--out", ov_out, "Output directory")->required();

  // config
  auto* cf = app.add_subcommand("config", "Print the default configuration");

  CLI11_PARSE(app, argc, argv);

  if (kf->parsed()) {
    std::vector<int> indices(1024);
    size_t count = 0;
    check(sogtrack_keyframes(kf_features.c_str(), kf_k, kf_lambda, kf_mode.c_str(), kf_seed,
                             indices.data(), indices.size(), &count));
    indices.resize(count);
    const Json out{{"mode", kf_mode}, {"k", kf_k}, {"lambda_div", kf_lambda}, {"indices", indices}};
    if (kf_out.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      std::ofstream f(kf_out);
      f << out.dump(2) << "\n";
    }
    return 0;
  }

  if (tr->parsed()) {
    const std::string config = config_with_overrides(tr_config, tr_sets);
    SequenceGuard seq;
    check(sogtrack_sequence_open(tr_sequence.c_str(), &seq.handle));
    TrajectoryGuard traj;
    check(sogtrack_track(seq.handle, config.c_str(), tr_diag.empty() ? nullptr : tr_diag.c_str(),
                         &traj.handle));
    check(sogtrack_trajectory_save(traj.handle, tr_out.c_str()));
    int frames = 0;
    check(sogtrack_trajectory_frame_count(traj.handle, &frames));
    std::cout << Json{{"trajectory", tr_out}, {"frames", frames}}.dump() << "\n";
    return 0;
  }

  if (ev->parsed()) {
    SequenceGuard seq;
    check(sogtrack_sequence_open(ev_sequence.c_str(), &seq.handle));
    TrajectoryGuard pred;
    check(sogtrack_trajectory_open(ev_pred.c_str(), &pred.handle));
    check(sogtrack_evaluate(seq.handle, pred.handle, ev_gt.c_str(), ev_out.c_str()));
    std::cout << load_json_file(ev_out).dump(2) << "\n";
    return 0;
  }

  if (sy->parsed()) {
    Json spec = sy_spec.empty() ? Json::object() : load_json_file(sy_spec);
    for (const std::string& s : sy_sets) apply_set(spec, s);
    std::string manifest(4096, '\0');
    check(sogtrack_synth(spec.dump().c_str(), sy_out.c_str(), manifest.data(), manifest.size()));
    manifest.resize(std::string(manifest.c_str()).size());
    std::cout << Json{{"manifest", manifest}}.dump() << "\n";
    return 0;
  }

  if (ov->parsed()) {
    const std::string config = config_with_overrides(ov_config, ov_sets);
    SequenceGuard seq;
    check(sogtrack_sequence_open(ov_sequence.c_str(), &seq.handle));
    TrajectoryGuard traj;
    check(sogtrack_trajectory_open(ov_traj.c_str(), &traj.handle));
    check(sogtrack_overlay(seq.handle, traj.handle, config.c_str(), ov_out.c_str()));
    std::cout << Json{{"overlays", ov_out}}.dump() << "\n";
    return 0;
  }

  if (cf->parsed()) {
    size_t required = 0;
    check(sogtrack_default_config(nullptr, 0, &required));
    std::string buf(required, '\0');
    check(sogtrack_default_config(buf.data(), buf.size(), &required));
    std::cout << buf.c_str() << "\n";
    return 0;
  }
  return 0;
}
