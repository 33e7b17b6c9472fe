#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "farpn/anchors.hpp"
#include "farpn/geometry.hpp"

namespace farpn {

struct AssignConfig {
  double pos_iou = 0.5;
  double neg_iou = 0.4;
  int max_pos = 128;
  int max_neg = 128;
  int hard_neg = 32;             // counted inside the negative budget
  double hard_neg_min_iou = 0.1;
  int roi_cap = 50000;
  std::uint64_t rng_seed = 0;
};

// Per-image valid object-size interval, half-open [min_side, max_side).
struct ScaleRange {
  double min_side = 0.0;
  double max_side = std::numeric_limits<double>::infinity();
};

enum class Label { Positive, Negative, Ignored };

struct LabelSet {
  std::vector<Label> labels;
  std::vector<int> matched_gt;   // gt index for positives, -1 otherwise
  std::vector<double> max_iou;   // max IoU over gts, 0 when no gts
};

// Threshold assignment over max IoU: > pos_iou positive (argmax gt, ties to
// the lowest gt index), < neg_iou negative, otherwise ignored. With no gts
// every anchor is negative.
LabelSet assign(const AnchorSet& anchors, const std::vector<Box>& gts,
                const AssignConfig& cfg);

struct SampledBatch {
  std::vector<int> positives;
  std::vector<int> negatives;       // includes the hard negatives
  std::vector<int> hard_negatives;  // subset of negatives
};

// Seeded uniform sampling without replacement: up to max_pos positives; up
// to hard_neg negatives restricted to IoU in [hard_neg_min_iou, neg_iou)
// first, then the remaining negative budget from the rest.
SampledBatch sample(const LabelSet& labels, const AssignConfig& cfg);

// Cap the RoI count: anchors with max IoU >= hard_neg_min_iou are kept
// first (truncated by descending IoU if they alone exceed the cap), the
// remainder is filled by seeded uniform sampling.
AnchorSet cap_rois(const AnchorSet& anchors, const std::vector<Box>& gts,
                   const AssignConfig& cfg);

// Validity mask: box valid iff sqrt(area) in [min_side, max_side).
std::vector<bool> snip_filter(const std::vector<Box>& boxes,
                              const ScaleRange& range);

}  // namespace farpn
