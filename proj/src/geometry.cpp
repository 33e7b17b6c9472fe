#include "farpn/geometry.hpp"

#include <algorithm>

namespace farpn {

double iou(const Box& a, const Box& b) {
  const double ix1 = std::max(a.x1, b.x1);
  const double iy1 = std::max(a.y1, b.y1);
  const double ix2 = std::min(a.x2, b.x2);
  const double iy2 = std::min(a.y2, b.y2);
  const double iw = std::max(0.0, ix2 - ix1);
  const double ih = std::max(0.0, iy2 - iy1);
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

Box clip(const Box& b, double width, double height) {
  return Box{std::clamp(b.x1, 0.0, width), std::clamp(b.y1, 0.0, height),
             std::clamp(b.x2, 0.0, width), std::clamp(b.y2, 0.0, height)};
}

namespace {
void require_usable_anchor(const Box& anchor) {
  if (!(anchor.width() >= 1.0 && anchor.height() >= 1.0)) {
    throw std::invalid_argument("degenerate anchor");
  }
}
}  // namespace

Delta encode(const Box& anchor, const Box& target) {
  require_usable_anchor(anchor);
  const double aw = anchor.width();
  const double ah = anchor.height();
  return Delta{(target.center_x() - anchor.center_x()) / aw,
               (target.center_y() - anchor.center_y()) / ah,
               std::log(target.width() / aw), std::log(target.height() / ah)};
}

Box decode(const Box& anchor, const Delta& delta, double delta_clamp) {
  require_usable_anchor(anchor);
  // Exact fixed point: the zero delta reproduces the anchor bit-for-bit,
  // which keeps refinement idempotent when regression channels are zero.
  if (delta.zero()) return anchor;
  const double aw = anchor.width();
  const double ah = anchor.height();
  const double cx = anchor.center_x() + delta.dx * aw;
  const double cy = anchor.center_y() + delta.dy * ah;
  const double w = aw * std::exp(std::clamp(delta.dw, -delta_clamp, delta_clamp));
  const double h = ah * std::exp(std::clamp(delta.dh, -delta_clamp, delta_clamp));
  return Box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

}  // namespace farpn
