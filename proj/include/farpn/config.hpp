#pragma once

#include <string>
#include <vector>

#include "farpn/anchors.hpp"
#include "farpn/nms.hpp"
#include "farpn/psroi.hpp"
#include "farpn/refine.hpp"
#include "farpn/synth.hpp"
#include "farpn/targets.hpp"

namespace farpn {

// Flat key-value run configuration backing every CLI subcommand. Unknown
// keys are rejected; defaults follow the library modules.
struct RunConfig {
  AnchorConfig anchor;
  PoolConfig pool;
  AssignConfig assign;
  RefineConfig refine;
  NmsConfig nms;
  ScaleRange snip;

  double feature_stride = 16.0;
  double noise_sd = 0.0;
  int n_images = 1;
  int n_boxes_min = 10;
  int n_boxes_max = 50;
  double side_min = 16.0;
  double side_max = 512.0;
  double iou_ceiling = 0.3;
  double scene_margin = 32.0;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = available parallelism

  RunConfig();
};

// Default anchor scale set: one aspect ratio, scales spaced by sqrt(2)
// from 16 to 512 pixels.
std::vector<double> default_scales();

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);

// Apply one `key=value` override; the value is parsed as JSON (bare words
// fall back to strings). Unknown keys are rejected.
void apply_override(RunConfig& cfg, const std::string& key_value);

}  // namespace farpn
