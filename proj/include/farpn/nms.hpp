#pragma once

#include <vector>

#include "farpn/geometry.hpp"
#include "farpn/refine_types.hpp"

namespace farpn {

struct NmsConfig {
  enum class Mode { Soft, Hard, None };
  double sigma = 0.35;        // Gaussian decay parameter
  double score_floor = 0.001; // proposals decayed below this are dropped
  double hard_iou = 0.5;      // suppression threshold for hard NMS
  int max_keep = 0;           // stop after this many selections, 0 = unlimited
  Mode mode = Mode::Soft;
};

// Gaussian Soft-NMS: repeatedly select the highest-scoring proposal (ties by
// original index), decay every remaining score by exp(-iou^2/sigma), drop
// scores below the floor. Output is in selection order.
std::vector<Proposal> soft_nms(std::vector<Proposal> proposals,
                               const NmsConfig& cfg);

// Classic greedy suppression at hard_iou.
std::vector<Proposal> hard_nms(std::vector<Proposal> proposals,
                               const NmsConfig& cfg);

// Dispatch on cfg.mode; Mode::None ranks by score without suppression.
std::vector<Proposal> run_nms(std::vector<Proposal> proposals,
                              const NmsConfig& cfg);

}  // namespace farpn
