#include "farpn/psroi.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace farpn {

namespace {

int branch_outputs(const PoolConfig& cfg, Branch branch) {
  return branch == Branch::Score ? cfg.classes : 4;
}

void check_inputs(const FeatureMap& map, const Box& roi, const PoolConfig& cfg,
                  Branch branch) {
  const int expected = branch == Branch::Score ? cfg.score_channels()
                                               : cfg.regress_channels();
  if (map.channels != expected) {
    throw std::invalid_argument("branch/channel mismatch");
  }
  if (!roi.valid() || roi.degenerate()) {
    throw std::invalid_argument("degenerate roi");
  }
  if (cfg.bins < 1 || cfg.classes < 2 || cfg.samples_per_bin < 1) {
    throw std::invalid_argument("invalid pool config");
  }
}

// Walks every (output, bin, sample) triple of the pooling pattern and hands
// the callback the channel plus feature-space sample position. Shared by the
// forward pass and the gradient so the two cannot drift apart.
template <typename Fn>
void for_each_sample(const FeatureMap& map, const Box& roi,
                     const PoolConfig& cfg, int n_out, Fn&& fn) {
  const int k = cfg.bins;
  const int spp = cfg.samples_per_bin;
  const double bin_w = roi.width() / k;
  const double bin_h = roi.height() / k;
  const double inv_stride = 1.0 / map.stride;
  for (int o = 0; o < n_out; ++o) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const int channel = o * k * k + i * k + j;
        const double bx = roi.x1 + j * bin_w;
        const double by = roi.y1 + i * bin_h;
        for (int sy = 0; sy < spp; ++sy) {
          const double py = by + (sy + 0.5) * bin_h / spp;
          const double fy = py * inv_stride - 0.5;
          for (int sx = 0; sx < spp; ++sx) {
            const double px = bx + (sx + 0.5) * bin_w / spp;
            const double fx = px * inv_stride - 0.5;
            fn(o, channel, fx, fy);
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<double> psroi_pool(const FeatureMap& map, const Box& roi,
                               const PoolConfig& cfg, Branch branch) {
  check_inputs(map, roi, cfg, branch);
  const int n_out = branch_outputs(cfg, branch);
  std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
  for_each_sample(map, roi, cfg, n_out,
                  [&](int o, int channel, double fx, double fy) {
                    out[o] += bilinear_sample(map, fx, fy, channel);
                  });
  const double norm =
      1.0 / (static_cast<double>(cfg.bins) * cfg.bins * cfg.samples_per_bin *
             cfg.samples_per_bin);
  for (double& v : out) v *= norm;
  return out;
}

FeatureMap psroi_pool_grad(const FeatureMap& map, const Box& roi,
                           const PoolConfig& cfg, Branch branch,
                           std::span<const double> upstream) {
  check_inputs(map, roi, cfg, branch);
  const int n_out = branch_outputs(cfg, branch);
  if (static_cast<int>(upstream.size()) != n_out) {
    throw std::invalid_argument("upstream size mismatch");
  }
  FeatureMap grad =
      FeatureMap::zeros(map.height, map.width, map.channels, map.stride);
  const double norm =
      1.0 / (static_cast<double>(cfg.bins) * cfg.bins * cfg.samples_per_bin *
             cfg.samples_per_bin);
  for_each_sample(map, roi, cfg, n_out,
                  [&](int o, int channel, double fx, double fy) {
                    const double g = upstream[o] * norm;
                    const int x0 = static_cast<int>(std::floor(fx));
                    const int y0 = static_cast<int>(std::floor(fy));
                    const double wx = fx - x0;
                    const double wy = fy - y0;
                    auto add = [&](int ix, int iy, double w) {
                      if (ix < 0 || iy < 0 || ix >= map.width ||
                          iy >= map.height) {
                        return;
                      }
                      grad.at(iy, ix, channel) += g * w;
                    };
                    add(x0, y0, (1.0 - wx) * (1.0 - wy));
                    add(x0 + 1, y0, wx * (1.0 - wy));
                    add(x0, y0 + 1, (1.0 - wx) * wy);
                    add(x0 + 1, y0 + 1, wx * wy);
                  });
  return grad;
}

namespace {

PooledResult pool_one(const FeatureMap& score_map, const FeatureMap& regress_map,
                      const Box& roi, const PoolConfig& cfg) {
  PooledResult r;
  r.class_scores = psroi_pool(score_map, roi, cfg, Branch::Score);
  const std::vector<double> d = psroi_pool(regress_map, roi, cfg, Branch::Regress);
  r.delta = Delta{d[0], d[1], d[2], d[3]};
  return r;
}

// Validates everything up front so the parallel loop cannot throw from
// inside an OpenMP region.
void check_batch(const FeatureMap& score_map, const FeatureMap& regress_map,
                 const std::vector<Box>& rois, const PoolConfig& cfg) {
  if (score_map.stride != regress_map.stride) {
    throw std::invalid_argument("branch stride mismatch");
  }
  if (score_map.channels != cfg.score_channels() ||
      regress_map.channels != cfg.regress_channels()) {
    throw std::invalid_argument("branch/channel mismatch");
  }
  for (const Box& roi : rois) {
    if (!roi.valid() || roi.degenerate()) {
      throw std::invalid_argument("degenerate roi");
    }
  }
}

}  // namespace

std::vector<PooledResult> batch_pool(const FeatureMap& score_map,
                                     const FeatureMap& regress_map,
                                     const std::vector<Box>& rois,
                                     const PoolConfig& cfg) {
  check_batch(score_map, regress_map, rois, cfg);
  std::vector<PooledResult> out(rois.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(rois.size()); ++i) {
    out[i] = pool_one(score_map, regress_map, rois[i], cfg);
  }
  return out;
}

std::vector<PooledResult> batch_pool_serial(const FeatureMap& score_map,
                                            const FeatureMap& regress_map,
                                            const std::vector<Box>& rois,
                                            const PoolConfig& cfg) {
  check_batch(score_map, regress_map, rois, cfg);
  std::vector<PooledResult> out;
  out.reserve(rois.size());
  for (const Box& roi : rois) {
    out.push_back(pool_one(score_map, regress_map, roi, cfg));
  }
  return out;
}

double face_probability(const PooledResult& pooled) {
  const double bg = pooled.class_scores[0];
  const double face = pooled.class_scores[1];
  const double m = std::max(bg, face);
  const double eb = std::exp(bg - m);
  const double ef = std::exp(face - m);
  return ef / (eb + ef);
}

}  // namespace farpn
