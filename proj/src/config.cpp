#include "farpn/config.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace farpn {

using nlohmann::json;

std::vector<double> default_scales() {
  std::vector<double> scales;
  for (int i = 0; i <= 10; ++i) {
    scales.push_back(16.0 * std::pow(2.0, 0.5 * i));
  }
  return scales;
}

RunConfig::RunConfig() {
  anchor.scales = default_scales();
  anchor.ratios = {1.0};
  anchor.image_width = 1024.0;
  anchor.image_height = 1024.0;
}

namespace {

json mode_to_json(NmsConfig::Mode mode) {
  switch (mode) {
    case NmsConfig::Mode::Soft: return "soft";
    case NmsConfig::Mode::Hard: return "hard";
    case NmsConfig::Mode::None: return "none";
  }
  return "soft";
}

NmsConfig::Mode mode_from_json(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "soft") return NmsConfig::Mode::Soft;
  if (s == "hard") return NmsConfig::Mode::Hard;
  if (s == "none") return NmsConfig::Mode::None;
  throw std::runtime_error("unknown nms_mode: " + s);
}

json snip_max_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

double snip_max_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::runtime_error("snip_max must be a number or \"inf\"");
  }
  return j.get<double>();
}

json to_flat_json(const RunConfig& c) {
  return json{{"scales", c.anchor.scales},
              {"ratios", c.anchor.ratios},
              {"min_stride", c.anchor.min_stride},
              {"stride_divisor", c.anchor.stride_divisor},
              {"image_width", c.anchor.image_width},
              {"image_height", c.anchor.image_height},
              {"bins", c.pool.bins},
              {"classes", c.pool.classes},
              {"samples_per_bin", c.pool.samples_per_bin},
              {"pos_iou", c.assign.pos_iou},
              {"neg_iou", c.assign.neg_iou},
              {"max_pos", c.assign.max_pos},
              {"max_neg", c.assign.max_neg},
              {"hard_neg", c.assign.hard_neg},
              {"hard_neg_min_iou", c.assign.hard_neg_min_iou},
              {"roi_cap", c.assign.roi_cap},
              {"iterations", c.refine.iterations},
              {"top_k", c.refine.top_k},
              {"output_n", c.refine.output_n},
              {"sigma", c.nms.sigma},
              {"score_floor", c.nms.score_floor},
              {"hard_iou", c.nms.hard_iou},
              {"max_keep", c.nms.max_keep},
              {"nms_mode", mode_to_json(c.nms.mode)},
              {"snip_min", c.snip.min_side},
              {"snip_max", snip_max_to_json(c.snip.max_side)},
              {"stride", c.feature_stride},
              {"noise_sd", c.noise_sd},
              {"n_images", c.n_images},
              {"n_boxes_min", c.n_boxes_min},
              {"n_boxes_max", c.n_boxes_max},
              {"side_min", c.side_min},
              {"side_max", c.side_max},
              {"iou_ceiling", c.iou_ceiling},
              {"margin", c.scene_margin},
              {"seed", c.seed},
              {"workers", c.workers}};
}

void set_key(RunConfig& c, const std::string& key, const json& v) {
  if (key == "scales") c.anchor.scales = v.get<std::vector<double>>();
  else if (key == "ratios") c.anchor.ratios = v.get<std::vector<double>>();
  else if (key == "min_stride") c.anchor.min_stride = v.get<double>();
  else if (key == "stride_divisor") c.anchor.stride_divisor = v.get<double>();
  else if (key == "image_width") c.anchor.image_width = v.get<double>();
  else if (key == "image_height") c.anchor.image_height = v.get<double>();
  else if (key == "bins") c.pool.bins = v.get<int>();
  else if (key == "classes") c.pool.classes = v.get<int>();
  else if (key == "samples_per_bin") c.pool.samples_per_bin = v.get<int>();
  else if (key == "pos_iou") c.assign.pos_iou = v.get<double>();
  else if (key == "neg_iou") c.assign.neg_iou = v.get<double>();
  else if (key == "max_pos") c.assign.max_pos = v.get<int>();
  else if (key == "max_neg") c.assign.max_neg = v.get<int>();
  else if (key == "hard_neg") c.assign.hard_neg = v.get<int>();
  else if (key == "hard_neg_min_iou") c.assign.hard_neg_min_iou = v.get<double>();
  else if (key == "roi_cap") c.assign.roi_cap = v.get<int>();
  else if (key == "iterations") c.refine.iterations = v.get<int>();
  else if (key == "top_k") c.refine.top_k = v.get<int>();
  else if (key == "output_n") c.refine.output_n = v.get<int>();
  else if (key == "sigma") c.nms.sigma = v.get<double>();
  else if (key == "score_floor") c.nms.score_floor = v.get<double>();
  else if (key == "hard_iou") c.nms.hard_iou = v.get<double>();
  else if (key == "max_keep") c.nms.max_keep = v.get<int>();
  else if (key == "nms_mode") c.nms.mode = mode_from_json(v);
  else if (key == "snip_min") c.snip.min_side = v.get<double>();
  else if (key == "snip_max") c.snip.max_side = snip_max_from_json(v);
  else if (key == "stride") c.feature_stride = v.get<double>();
  else if (key == "noise_sd") c.noise_sd = v.get<double>();
  else if (key == "n_images") c.n_images = v.get<int>();
  else if (key == "n_boxes_min") c.n_boxes_min = v.get<int>();
  else if (key == "n_boxes_max") c.n_boxes_max = v.get<int>();
  else if (key == "side_min") c.side_min = v.get<double>();
  else if (key == "side_max") c.side_max = v.get<double>();
  else if (key == "iou_ceiling") c.iou_ceiling = v.get<double>();
  else if (key == "margin") c.scene_margin = v.get<double>();
  else if (key == "seed") c.seed = v.get<std::uint64_t>();
  else if (key == "workers") c.workers = v.get<int>();
  else throw std::runtime_error("unknown config key: " + key);
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) set_key(cfg, key, value);
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  return to_flat_json(cfg).dump(2);
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
  const std::size_t eq = key_value.find('=');
  if (eq == std::string::npos) {
    throw std::runtime_error("--set expects key=value, got: " + key_value);
  }
  const std::string key = key_value.substr(0, eq);
  const std::string raw = key_value.substr(eq + 1);
  json v = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (v.is_discarded()) v = raw;  // bare word, treat as string
  set_key(cfg, key, v);
}

}  // namespace farpn
