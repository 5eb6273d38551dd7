#include "pipeline/config.hpp"

#include <stdexcept>

namespace sogtrack {

Json config_json(const TrackConfig& c) {
  return Json{
      {"quadtree",
       {{"max_depth", c.quadtree.max_depth},
        {"color_variance_threshold", c.quadtree.color_variance_threshold},
        {"min_cell_size", c.quadtree.min_cell_size},
        {"bbox_padding", c.quadtree.bbox_padding},
        {"min_valid_mask_ratio", c.quadtree.min_valid_mask_ratio}}},
      {"object_sog",
       {{"count", c.object_count}, {"sigma_factor", c.sigma_factor}, {"min_opacity", c.min_opacity}}},
      {"energy", {{"sigma_c", c.energy.sigma_c}, {"top_k", c.energy.top_k}}},
      {"weights",
       {{"energy", c.weights.energy},
        {"j2d", c.weights.j2d},
        {"depth", c.weights.depth},
        {"sil", c.weights.sil},
        {"contact", c.weights.contact},
        {"smooth", c.weights.smooth}}},
      {"window",
       {{"size", c.window.window_size},
        {"stride", c.window.stride},
        {"iterations", c.window.iterations}}},
      {"optimizer",
       {{"beta1", c.optimizer.beta1},
        {"beta2", c.optimizer.beta2},
        {"epsilon", c.optimizer.epsilon},
        {"weight_decay", c.optimizer.weight_decay},
        {"lr",
         {{"object_rotation", c.lr.object_rotation},
          {"object_translation", c.lr.object_translation},
          {"object_scale", c.lr.object_scale},
          {"hand_rotation", c.lr.hand_rotation},
          {"hand_translation", c.lr.hand_translation},
          {"hand_scale", c.lr.hand_scale}}}}},
      {"silhouette", {{"downsample", c.sil_downsample}}},
      {"depth", {{"erosion_iterations", c.depth_erosion_iterations}}},
      {"temporal", {{"lambda_temp", c.lambda_temp}}},
      {"gating", {{"enabled", c.gating}}},
      {"keyframes", {{"count", c.keyframe_count}, {"lambda_div", c.lambda_div}}}};
}

namespace {

template <typename T>
void get_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

TrackConfig config_from_json(const Json& j) {
  TrackConfig c;
  if (j.contains("quadtree")) {
    const Json& q = j.at("quadtree");
    get_if(q, "max_depth", c.quadtree.max_depth);
    get_if(q, "color_variance_threshold", c.quadtree.color_variance_threshold);
    get_if(q, "min_cell_size", c.quadtree.min_cell_size);
    get_if(q, "bbox_padding", c.quadtree.bbox_padding);
    get_if(q, "min_valid_mask_ratio", c.quadtree.min_valid_mask_ratio);
  }
  if (j.contains("object_sog")) {
    const Json& o = j.at("object_sog");
    get_if(o, "count", c.object_count);
    get_if(o, "sigma_factor", c.sigma_factor);
    get_if(o, "min_opacity", c.min_opacity);
  }
  if (j.contains("energy")) {
    get_if(j.at("energy"), "sigma_c", c.energy.sigma_c);
    get_if(j.at("energy"), "top_k", c.energy.top_k);
  }
  if (j.contains("weights")) {
    const Json& w = j.at("weights");
    get_if(w, "energy", c.weights.energy);
    get_if(w, "j2d", c.weights.j2d);
    get_if(w, "depth", c.weights.depth);
    get_if(w, "sil", c.weights.sil);
    get_if(w, "contact", c.weights.contact);
    get_if(w, "smooth", c.weights.smooth);
  }
  if (j.contains("window")) {
    const Json& w = j.at("window");
    get_if(w, "size", c.window.window_size);
    get_if(w, "stride", c.window.stride);
    get_if(w, "iterations", c.window.iterations);
  }
  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    get_if(o, "beta1", c.optimizer.beta1);
    get_if(o, "beta2", c.optimizer.beta2);
    get_if(o, "epsilon", c.optimizer.epsilon);
    get_if(o, "weight_decay", c.optimizer.weight_decay);
    if (o.contains("lr")) {
      const Json& l = o.at("lr");
      get_if(l, "object_rotation", c.lr.object_rotation);
      get_if(l, "object_translation", c.lr.object_translation);
      get_if(l, "object_scale", c.lr.object_scale);
      get_if(l, "hand_rotation", c.lr.hand_rotation);
      get_if(l, "hand_translation", c.lr.hand_translation);
      get_if(l, "hand_scale", c.lr.hand_scale);
    }
  }
  if (j.contains("silhouette")) get_if(j.at("silhouette"), "downsample", c.sil_downsample);
  if (j.contains("depth")) get_if(j.at("depth"), "erosion_iterations", c.depth_erosion_iterations);
  if (j.contains("temporal")) get_if(j.at("temporal"), "lambda_temp", c.lambda_temp);
  if (j.contains("gating")) get_if(j.at("gating"), "enabled", c.gating);
  if (j.contains("keyframes")) {
    get_if(j.at("keyframes"), "count", c.keyframe_count);
    get_if(j.at("keyframes"), "lambda_div", c.lambda_div);
  }
  return c;
}

void apply_override(Json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override must be key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  Json* node = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw std::runtime_error("bad override path: " + path);
    if (dot == std::string::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace sogtrack
