#pragma once

#include "farpn/geometry.hpp"

namespace farpn {

// A scored candidate box. `iteration` records the refinement round that
// produced it (0 = raw anchor scoring).
struct Proposal {
  Box box;
  double score = 0.0;
  int iteration = 0;
};

}  // namespace farpn
