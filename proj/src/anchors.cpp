#include "farpn/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace farpn {

double scale_stride(double s, double c, double d) { return std::max(c, s / d); }

namespace {

void check_config(const AnchorConfig& cfg) {
  if (cfg.image_width < 1.0 || cfg.image_height < 1.0) {
    throw std::invalid_argument("image smaller than 1 pixel");
  }
  if (cfg.min_stride <= 0.0 || cfg.stride_divisor <= 0.0) {
    throw std::invalid_argument("anchor stride parameters must be positive");
  }
  for (double s : cfg.scales) {
    if (!(s > 0.0)) throw std::invalid_argument("anchor scales must be positive");
  }
  for (double r : cfg.ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("aspect ratios must be positive");
  }
}

// Lattice of centers at pitch/2 + i*pitch, kept while the center lies
// strictly inside the image.
void place_lattice(const AnchorConfig& cfg, int scale_idx, int ratio_idx,
                   double pitch, AnchorSet& out) {
  const double s = cfg.scales[scale_idx];
  const double r = cfg.ratios[ratio_idx];
  const double w = s / std::sqrt(r);
  const double h = s * std::sqrt(r);
  for (int gy = 0;; ++gy) {
    const double cy = 0.5 * pitch + gy * pitch;
    if (cy >= cfg.image_height) break;
    for (int gx = 0;; ++gx) {
      const double cx = 0.5 * pitch + gx * pitch;
      if (cx >= cfg.image_width) break;
      Box b = clip(Box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h},
                   cfg.image_width, cfg.image_height);
      if (b.width() < 1.0 || b.height() < 1.0) continue;
      out.push_back(b, AnchorProvenance{scale_idx, ratio_idx, gx, gy, false});
    }
  }
}

}  // namespace

AnchorSet place(const AnchorConfig& cfg) {
  check_config(cfg);
  AnchorSet out;
  for (int si = 0; si < static_cast<int>(cfg.scales.size()); ++si) {
    const double pitch =
        scale_stride(cfg.scales[si], cfg.min_stride, cfg.stride_divisor);
    for (int ri = 0; ri < static_cast<int>(cfg.ratios.size()); ++ri) {
      place_lattice(cfg, si, ri, pitch, out);
    }
  }
  return out;
}

AnchorSet place_dense(const AnchorConfig& cfg, double uniform_stride) {
  check_config(cfg);
  if (!(uniform_stride > 0.0)) {
    throw std::invalid_argument("uniform stride must be positive");
  }
  AnchorSet out;
  for (int si = 0; si < static_cast<int>(cfg.scales.size()); ++si) {
    for (int ri = 0; ri < static_cast<int>(cfg.ratios.size()); ++ri) {
      place_lattice(cfg, si, ri, uniform_stride, out);
    }
  }
  return out;
}

AnchorSet augment_with_ground_truth(AnchorSet set, const std::vector<Box>& gts) {
  for (const Box& gt : gts) {
    set.push_back(gt, AnchorProvenance{-1, -1, -1, -1, true});
  }
  return set;
}

std::string anchors_to_csv(const AnchorSet& set) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Box& b = set.boxes[i];
    const AnchorProvenance& p = set.provenance[i];
    os << b.x1 << ',' << b.y1 << ',' << b.x2 << ',' << b.y2 << ','
       << p.scale_idx << ',' << p.ratio_idx << '\n';
  }
  return os.str();
}

}  // namespace farpn
