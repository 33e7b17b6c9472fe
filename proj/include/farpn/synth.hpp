#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "farpn/geometry.hpp"
#include "farpn/psroi.hpp"
#include "farpn/tensor.hpp"

namespace farpn {

// A synthetic ground-truth layout standing in for an annotated image.
struct Scene {
  double image_width = 0.0;
  double image_height = 0.0;
  std::vector<Box> gts;
  std::uint64_t seed = 0;
};

struct SceneConfig {
  std::uint64_t seed = 0;
  double image_width = 1024.0;
  double image_height = 1024.0;
  int n_boxes = 10;
  double min_side = 16.0;
  double max_side = 512.0;
  double iou_ceiling = 0.3;  // max pairwise IoU between planted boxes
  double margin = 32.0;      // keep boxes this far from the image border
  int max_attempts_per_box = 2000;
};

// Seeded rejection sampling: box sides drawn log-uniformly from
// [min_side, max_side], positions uniform inside the margin; a candidate is
// rejected when its intersection with an accepted box exceeds the ceiling
// fraction of the smaller box's area (which bounds pairwise IoU by the
// ceiling and also excludes near-nested pairs). Throws
// std::runtime_error("placement infeasible") when the attempt budget runs
// out.
Scene synth_scene(const SceneConfig& cfg);

// Analytic position-sensitive feature maps for a scene.
//
// Score branch: each ground truth splats its 49 bin centers into the
// matching face channels with tent weights whose radius tracks the bin size
// (at least one cell), scaled per ground truth so that pooling the exactly
// aligned RoI yields 1.0; background channels are 1 where the face channel
// has no support and 0 elsewhere.
//
// Regression branch: at cells inside the nearest ground truth dilated by one
// stride, dx/dy channels carry the normalized offset of the cell's footprint
// center toward that ground truth's center; the dw/dh channels carry
// per-column (per-row) linear ramps that a box of width w pools to
// 1 - w/gt_width, a first-order estimate of log(gt_width/w), so refinement
// corrects size as well as position. Zero outside every ground truth.
//
// Seeded zero-mean Gaussian noise with standard deviation noise_sd is added
// to all channels of both maps.
std::pair<FeatureMap, FeatureMap> synth_features(const Scene& scene,
                                                 double stride,
                                                 const PoolConfig& cfg,
                                                 double noise_sd);

}  // namespace farpn
