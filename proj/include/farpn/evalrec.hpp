#pragma once

#include <string>
#include <vector>

#include "farpn/geometry.hpp"
#include "farpn/refine_types.hpp"

namespace farpn {

struct DatasetEntry {
  std::string image_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<Box> gts;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  int dropped_zero_area = 0;  // degenerate annotations removed while parsing

  std::size_t total_gts() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.gts.size();
    return n;
  }
};

// Annotation text format: repeated blocks
//   image_id
//   W H
//   n
//   x y w h   (n lines)
// Boxes are converted to corner form and clipped to the stated size;
// zero-area boxes are dropped and counted. Malformed blocks raise a parse
// error naming the line.
Dataset parse_annotations(const std::string& text);
std::string format_annotations(const Dataset& dataset);

struct RecallCell {
  int top_n = 0;
  double iou_thresh = 0.0;
  double recall = 0.0;
};

struct RecallReport {
  std::vector<RecallCell> cells;
  std::vector<int> matched_per_image;  // at the first (top_n, iou) pair
  std::size_t total_gts = 0;
  std::size_t total_proposals = 0;
};

// Rank-greedy one-to-one matching: proposals are visited in rank order and
// each claims the unmatched ground truth with the highest IoU >= threshold.
// Recall is matched/total over the dataset, computed per (top_n, threshold).
RecallReport recall_at(const std::vector<std::vector<Proposal>>& per_image,
                       const Dataset& dataset,
                       const std::vector<double>& iou_thresholds,
                       const std::vector<int>& top_ns);

// Stable column order `top_n,iou_thresh,recall`; JSON mirrors the CSV.
std::string emit_report_csv(const RecallReport& report);
std::string emit_report_json(const RecallReport& report);
RecallReport parse_report_csv(const std::string& text);

}  // namespace farpn
