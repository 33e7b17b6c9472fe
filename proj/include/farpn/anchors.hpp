#pragma once

#include <string>
#include <vector>

#include "farpn/geometry.hpp"

namespace farpn {

// Floating-anchor grid configuration. Anchors of scale s are placed on a
// square lattice of pitch max(min_stride, s / stride_divisor).
struct AnchorConfig {
  std::vector<double> scales;        // anchor side lengths, pixels
  std::vector<double> ratios{1.0};   // aspect ratios height/width
  double min_stride = 16.0;          // c
  double stride_divisor = 5.0;       // d
  double image_width = 0.0;
  double image_height = 0.0;
};

struct AnchorProvenance {
  int scale_idx = -1;
  int ratio_idx = -1;
  int grid_x = -1;
  int grid_y = -1;
  bool from_ground_truth = false;
};

struct AnchorSet {
  std::vector<Box> boxes;
  std::vector<AnchorProvenance> provenance;

  std::size_t size() const { return boxes.size(); }
  void push_back(const Box& b, const AnchorProvenance& p) {
    boxes.push_back(b);
    provenance.push_back(p);
  }
};

// Stride of the anchor lattice for anchor scale s: max(c, s/d).
double scale_stride(double s, double c, double d);

// Scale-dependent strided placement. Centers sit on a lattice of pitch
// scale_stride(s) starting at pitch/2; boxes are clipped to the image and
// post-clip boxes narrower than one pixel in either dimension are dropped.
// Ordering is scale-major, then ratio, then row-major over the grid.
AnchorSet place(const AnchorConfig& config);

// Same enumerator with one uniform lattice pitch for every scale; used for
// naive-vs-strided comparison and inference-time stride changes.
AnchorSet place_dense(const AnchorConfig& config, double uniform_stride);

// Append ground-truth boxes verbatim (fractional coordinates preserved)
// with ground-truth provenance.
AnchorSet augment_with_ground_truth(AnchorSet set, const std::vector<Box>& gts);

// CSV export: one line per anchor `x1,y1,x2,y2,scale_idx,ratio_idx`.
std::string anchors_to_csv(const AnchorSet& set);

}  // namespace farpn
