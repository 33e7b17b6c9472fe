#include "farpn/targets.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace farpn {

LabelSet assign(const AnchorSet& anchors, const std::vector<Box>& gts,
                const AssignConfig& cfg) {
  if (!(cfg.neg_iou >= 0.0 && cfg.neg_iou <= cfg.pos_iou && cfg.pos_iou <= 1.0)) {
    throw std::invalid_argument("invalid assign thresholds");
  }
  const std::int64_t n = static_cast<std::int64_t>(anchors.size());
  LabelSet out;
  out.labels.assign(anchors.size(), Label::Negative);
  out.matched_gt.assign(anchors.size(), -1);
  out.max_iou.assign(anchors.size(), 0.0);
  if (gts.empty()) return out;

#pragma omp parallel for schedule(static)
  for (std::int64_t a = 0; a < n; ++a) {
    double best = 0.0;
    int best_gt = -1;
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
      const double ov = iou(anchors.boxes[a], gts[g]);
      if (ov > best) {
        best = ov;
        best_gt = g;
      }
    }
    out.max_iou[a] = best;
    if (best > cfg.pos_iou) {
      out.labels[a] = Label::Positive;
      out.matched_gt[a] = best_gt;
    } else if (best < cfg.neg_iou) {
      out.labels[a] = Label::Negative;
    } else {
      out.labels[a] = Label::Ignored;
    }
  }
  return out;
}

namespace {

// Seeded uniform draw of up to `budget` indices from `pool`, without
// replacement, returned in draw order.
std::vector<int> draw(std::vector<int> pool, int budget, std::mt19937_64& rng) {
  if (budget < 0) budget = 0;
  std::shuffle(pool.begin(), pool.end(), rng);
  if (static_cast<int>(pool.size()) > budget) pool.resize(budget);
  return pool;
}

}  // namespace

SampledBatch sample(const LabelSet& labels, const AssignConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<int> pos_pool, hard_pool, easy_pool;
  for (int i = 0; i < static_cast<int>(labels.labels.size()); ++i) {
    switch (labels.labels[i]) {
      case Label::Positive:
        pos_pool.push_back(i);
        break;
      case Label::Negative:
        if (labels.max_iou[i] >= cfg.hard_neg_min_iou &&
            labels.max_iou[i] < cfg.neg_iou) {
          hard_pool.push_back(i);
        } else {
          easy_pool.push_back(i);
        }
        break;
      case Label::Ignored:
        break;
    }
  }

  SampledBatch batch;
  batch.positives = draw(std::move(pos_pool), cfg.max_pos, rng);
  batch.hard_negatives = draw(std::move(hard_pool), cfg.hard_neg, rng);
  batch.negatives = batch.hard_negatives;
  const int remaining = cfg.max_neg - static_cast<int>(batch.negatives.size());
  for (int i : draw(std::move(easy_pool), remaining, rng)) {
    batch.negatives.push_back(i);
  }
  return batch;
}

AnchorSet cap_rois(const AnchorSet& anchors, const std::vector<Box>& gts,
                   const AssignConfig& cfg) {
  const int n = static_cast<int>(anchors.size());
  if (n <= cfg.roi_cap) return anchors;

  std::vector<double> max_iou(anchors.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t a = 0; a < n; ++a) {
    for (const Box& gt : gts) {
      max_iou[a] = std::max(max_iou[a], iou(anchors.boxes[a], gt));
    }
  }

  std::vector<int> priority, rest;
  for (int i = 0; i < n; ++i) {
    (max_iou[i] >= cfg.hard_neg_min_iou ? priority : rest).push_back(i);
  }

  std::vector<int> selected;
  if (static_cast<int>(priority.size()) >= cfg.roi_cap) {
    std::stable_sort(priority.begin(), priority.end(),
                     [&](int a, int b) { return max_iou[a] > max_iou[b]; });
    priority.resize(cfg.roi_cap);
    selected = std::move(priority);
  } else {
    selected = std::move(priority);
    std::mt19937_64 rng(cfg.rng_seed);
    for (int i : draw(std::move(rest),
                      cfg.roi_cap - static_cast<int>(selected.size()), rng)) {
      selected.push_back(i);
    }
  }
  std::sort(selected.begin(), selected.end());

  AnchorSet out;
  out.boxes.reserve(selected.size());
  for (int i : selected) {
    out.push_back(anchors.boxes[i], anchors.provenance[i]);
  }
  return out;
}

std::vector<bool> snip_filter(const std::vector<Box>& boxes,
                              const ScaleRange& range) {
  if (!(range.min_side >= 0.0 && range.min_side < range.max_side)) {
    throw std::invalid_argument("invalid scale range");
  }
  std::vector<bool> valid(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double side = boxes[i].side_scale();
    valid[i] = side >= range.min_side && side < range.max_side;
  }
  return valid;
}

}  // namespace farpn
