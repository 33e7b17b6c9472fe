#pragma once

#include <cmath>
#include <stdexcept>

namespace farpn {

// Axis-aligned box in continuous pixel coordinates, half-open
// [x1,x2) x [y1,y2). width = x2-x1, height = y2-y1.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  // Square-root of the area; the scale s used by anchor striding and
  // scale-range filtering.
  double side_scale() const { return std::sqrt(area()); }

  bool finite() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2);
  }
  bool valid() const { return finite() && x2 >= x1 && y2 >= y1; }
  bool degenerate() const { return width() <= 0.0 || height() <= 0.0; }

  bool operator==(const Box&) const = default;
};

// Center shift normalized by anchor size plus log-scale size ratios.
struct Delta {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;

  bool zero() const { return dx == 0.0 && dy == 0.0 && dw == 0.0 && dh == 0.0; }
  bool operator==(const Delta&) const = default;
};

// Intersection over union. Degenerate boxes contribute zero area, so a
// fully degenerate pair yields 0 rather than NaN.
double iou(const Box& a, const Box& b);

// Clamp every coordinate into [0,width] x [0,height]. The result may be
// degenerate; callers filter.
Box clip(const Box& b, double width, double height);

// Standard R-CNN box regression parameterization. Both throw
// std::invalid_argument("degenerate anchor") when the anchor has width or
// height below one pixel. decode clamps dw/dh to +-delta_clamp before
// exponentiation.
Delta encode(const Box& anchor, const Box& target);
Box decode(const Box& anchor, const Delta& delta, double delta_clamp = 4.0);

}  // namespace farpn
