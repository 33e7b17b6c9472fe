#pragma once

#include <span>
#include <vector>

#include "farpn/anchors.hpp"
#include "farpn/geometry.hpp"
#include "farpn/tensor.hpp"

namespace farpn {

// Position-sensitive pooling configuration. The score branch expects
// classes*bins^2 channels, the regression branch 4*bins^2.
struct PoolConfig {
  int bins = 7;             // k, bins per side
  int classes = 2;          // background = channel group 0, face = group 1
  int samples_per_bin = 2;  // sampling grid per side within each bin

  int score_channels() const { return classes * bins * bins; }
  int regress_channels() const { return 4 * bins * bins; }
};

enum class Branch { Score, Regress };

// Raw pooled values for one RoI: unnormalized per-class scores plus the
// bin-averaged regression delta.
struct PooledResult {
  std::vector<double> class_scores;
  Delta delta;
};

// Position-sensitive RoI pooling. The RoI (image coordinates) is mapped to
// feature coordinates with u/stride - 0.5 so that a feature cell is sampled
// at its image-space footprint center, split into bins x bins equal bins;
// bin (i,j) of output o reads only channel o*bins^2 + i*bins + j, averaging
// samples_per_bin^2 bilinear samples at uniform interior points. Each output
// is the mean over all bins. Returns `classes` values for the score branch
// and 4 (dx,dy,dw,dh) for the regression branch.
std::vector<double> psroi_pool(const FeatureMap& map, const Box& roi,
                               const PoolConfig& cfg, Branch branch);

// Gradient of sum(upstream[o] * psroi_pool(map, roi)[o]) with respect to the
// map values: upstream/(bins^2 * samples_per_bin^2) pushed through the
// bilinear weights into the (output,bin)-specific channels.
FeatureMap psroi_pool_grad(const FeatureMap& map, const Box& roi,
                           const PoolConfig& cfg, Branch branch,
                           std::span<const double> upstream);

// Pool both branches for every RoI. The OpenMP version fans out across
// RoIs and collects results in input order; the serial version is the
// reference used by tests and benchmarks.
std::vector<PooledResult> batch_pool(const FeatureMap& score_map,
                                     const FeatureMap& regress_map,
                                     const std::vector<Box>& rois,
                                     const PoolConfig& cfg);
std::vector<PooledResult> batch_pool_serial(const FeatureMap& score_map,
                                            const FeatureMap& regress_map,
                                            const std::vector<Box>& rois,
                                            const PoolConfig& cfg);

// Softmax over the pooled class scores; index 1 is the face class.
double face_probability(const PooledResult& pooled);

}  // namespace farpn
