#include "farpn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace farpn {

Scene synth_scene(const SceneConfig& cfg) {
  if (!(cfg.min_side > 0.0 && cfg.min_side <= cfg.max_side)) {
    throw std::invalid_argument("invalid side range");
  }
  const double room = std::min(cfg.image_width, cfg.image_height) -
                      2.0 * cfg.margin;
  if (room < cfg.min_side) {
    throw std::invalid_argument("side range does not fit the image");
  }
  const double max_side = std::min(cfg.max_side, room);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(cfg.min_side);
  const double log_hi = std::log(max_side);

  Scene scene;
  scene.image_width = cfg.image_width;
  scene.image_height = cfg.image_height;
  scene.seed = cfg.seed;

  for (int b = 0; b < cfg.n_boxes; ++b) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts_per_box; ++attempt) {
      const double side = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
      const double cx =
          cfg.margin + 0.5 * side +
          unit(rng) * (cfg.image_width - 2.0 * cfg.margin - side);
      const double cy =
          cfg.margin + 0.5 * side +
          unit(rng) * (cfg.image_height - 2.0 * cfg.margin - side);
      const Box cand{cx - 0.5 * side, cy - 0.5 * side, cx + 0.5 * side,
                     cy + 0.5 * side};
      bool ok = true;
      for (const Box& gt : scene.gts) {
        // Ceiling on intersection over the smaller area, which bounds IoU
        // from above and additionally rejects near-nested pairs of unequal
        // scale that plain IoU lets through; those make matching ambiguous.
        const double ix = std::min(cand.x2, gt.x2) - std::max(cand.x1, gt.x1);
        const double iy = std::min(cand.y2, gt.y2) - std::max(cand.y1, gt.y1);
        const double inter = std::max(0.0, ix) * std::max(0.0, iy);
        if (inter > cfg.iou_ceiling * std::min(cand.area(), gt.area())) {
          ok = false;
          break;
        }
      }
      if (ok) {
        scene.gts.push_back(cand);
        placed = true;
        break;
      }
    }
    if (!placed) throw std::runtime_error("placement infeasible");
  }
  return scene;
}

namespace {

// Unit tent weight of a bin-center splat evaluated at feature coordinate d
// away from the splat position, with radius r cells. The radius tracks the
// bin size (at least one cell) so coarse anchors over large objects still
// pool a usable signal while sub-cell objects keep a sharp peak.
double tent(double d, double r) { return std::max(0.0, 1.0 - std::abs(d) / r); }

double tent_radius(double bin_size, double stride) {
  return std::max(1.0, bin_size / stride);
}

// Pooled face response of an RoI equal to `gt` over the unit splat field of
// that gt alone, mirroring the psroi sampling rule. The planted amplitude is
// the reciprocal, so an exactly aligned RoI pools 1.0 at any object scale.
double aligned_unit_response(const Box& gt, double stride, const PoolConfig& cfg) {
  const int k = cfg.bins;
  const int spp = cfg.samples_per_bin;
  const double bw = gt.width() / k;
  const double bh = gt.height() / k;
  const double rx = tent_radius(bw, stride);
  const double ry = tent_radius(bh, stride);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double bcy = (gt.y1 + (i + 0.5) * bh) / stride - 0.5;
    for (int j = 0; j < k; ++j) {
      const double bcx = (gt.x1 + (j + 0.5) * bw) / stride - 0.5;
      for (int sy = 0; sy < spp; ++sy) {
        const double fy = (gt.y1 + i * bh + (sy + 0.5) * bh / spp) / stride - 0.5;
        for (int sx = 0; sx < spp; ++sx) {
          const double fx =
              (gt.x1 + j * bw + (sx + 0.5) * bw / spp) / stride - 0.5;
          const int x0 = static_cast<int>(std::floor(fx));
          const int y0 = static_cast<int>(std::floor(fy));
          for (int dy = 0; dy <= 1; ++dy) {
            for (int dx = 0; dx <= 1; ++dx) {
              const double wx = dx ? fx - x0 : 1.0 - (fx - x0);
              const double wy = dy ? fy - y0 : 1.0 - (fy - y0);
              total += wx * wy * tent(x0 + dx - bcx, rx) * tent(y0 + dy - bcy, ry);
            }
          }
        }
      }
    }
  }
  return total / (static_cast<double>(k) * k * spp * spp);
}

}  // namespace

std::pair<FeatureMap, FeatureMap> synth_features(const Scene& scene,
                                                 double stride,
                                                 const PoolConfig& cfg,
                                                 double noise_sd) {
  if (!(stride > 0.0)) throw std::invalid_argument("stride must be positive");
  const int k = cfg.bins;
  const int fh = static_cast<int>(std::ceil(scene.image_height / stride));
  const int fw = static_cast<int>(std::ceil(scene.image_width / stride));
  FeatureMap score = FeatureMap::zeros(fh, fw, cfg.score_channels(), stride);
  FeatureMap regress = FeatureMap::zeros(fh, fw, cfg.regress_channels(), stride);

  // Per-gt amplitude calibrating the pooled response of the aligned RoI
  // to 1.0; without it small objects whose bins are below the cell pitch
  // would pool a heavily diluted face signal.
  std::vector<double> amplitude(scene.gts.size(), 0.0);
  for (std::size_t g = 0; g < scene.gts.size(); ++g) {
    const double r = aligned_unit_response(scene.gts[g], stride, cfg);
    amplitude[g] = 1.0 / std::max(r, 1e-4);
  }

#pragma omp parallel for schedule(static)
  for (std::int64_t cy = 0; cy < fh; ++cy) {
    for (int cx = 0; cx < fw; ++cx) {
      const double px = (cx + 0.5) * stride;
      const double py = (cy + 0.5) * stride;

      // Face channels: each ground truth splats its bin (i,j) center onto
      // the surrounding cells of channel (i,j) with bilinear tent weights.
      // The correlation of this field with the pooling kernel peaks exactly
      // at the aligned box, so pooled face response strictly decreases with
      // misalignment in position *and* size, even for sub-cell objects.
      for (std::size_t g = 0; g < scene.gts.size(); ++g) {
        const Box& gt = scene.gts[g];
        const double bw = gt.width() / k;
        const double bh = gt.height() / k;
        const double rx = tent_radius(bw, stride);
        const double ry = tent_radius(bh, stride);
        const double reach_x = rx * stride;
        const double reach_y = ry * stride;
        if (px < gt.x1 - reach_x || px >= gt.x2 + reach_x ||
            py < gt.y1 - reach_y || py >= gt.y2 + reach_y) {
          continue;
        }
        for (int i = 0; i < k; ++i) {
          const double wy =
              tent(cy - ((gt.y1 + (i + 0.5) * bh) / stride - 0.5), ry);
          if (wy == 0.0) continue;
          for (int j = 0; j < k; ++j) {
            const double wx =
                tent(cx - ((gt.x1 + (j + 0.5) * bw) / stride - 0.5), rx);
            if (wx == 0.0) continue;
            double& v = score.at(static_cast<int>(cy), cx, k * k + i * k + j);
            v = std::max(v, amplitude[g] * wx * wy);
          }
        }
      }
      // Background channels complement the support of the face channels.
      // A graded complement would penalize the tent fringe that the outer
      // bins of a correctly sized box sample, inverting the score ordering
      // against slightly shrunken boxes; the calibrated face response alone
      // already peaks at the aligned box.
      for (int b = 0; b < k * k; ++b) {
        score.at(static_cast<int>(cy), cx, b) =
            score.at(static_cast<int>(cy), cx, k * k + b) > 0.0 ? 0.0 : 1.0;
      }

      // Regression field: inside the (dilated) nearest ground truth, the
      // delta that moves a same-size box centered here onto that gt.
      const Box* target = nullptr;
      double best_d2 = 0.0;
      for (const Box& gt : scene.gts) {
        if (px < gt.x1 - stride || px > gt.x2 + stride ||
            py < gt.y1 - stride || py > gt.y2 + stride) {
          continue;
        }
        const double dx = gt.center_x() - px;
        const double dy = gt.center_y() - py;
        const double d2 = dx * dx + dy * dy;
        if (target == nullptr || d2 < best_d2) {
          target = &gt;
          best_d2 = d2;
        }
      }
      if (target != nullptr) {
        const double dx = (target->center_x() - px) / target->width();
        const double dy = (target->center_y() - py) / target->height();
        // Size channels: a per-column (per-row) linear ramp that a box of
        // width w pools to 1 - w/gw ≈ log(gw/w). Bilinear sampling is exact
        // on linear fields and the center-offset terms cancel across the
        // symmetric columns, so anchors of the wrong scale shrink or grow
        // onto the planted box instead of competing with it at a fixed size.
        const double gamma =
            static_cast<double>(k) / std::max(1, k - (k % 2));
        for (int b = 0; b < k * k; ++b) {
          const int i = b / k;
          const int j = b % k;
          const double aj = (j + 0.5) / k - 0.5;  // column center offset
          const double ai = (i + 0.5) / k - 0.5;  // row center offset
          regress.at(static_cast<int>(cy), cx, 0 * k * k + b) = dx;
          regress.at(static_cast<int>(cy), cx, 1 * k * k + b) = dy;
          regress.at(static_cast<int>(cy), cx, 2 * k * k + b) =
              aj == 0.0 ? 1.0
                        : 1.0 + gamma * (target->center_x() - px) /
                                    (target->width() * aj);
          regress.at(static_cast<int>(cy), cx, 3 * k * k + b) =
              ai == 0.0 ? 1.0
                        : 1.0 + gamma * (target->center_y() - py) /
                                    (target->height() * ai);
        }
      }
    }
  }

  if (noise_sd > 0.0) {
    std::mt19937_64 rng(scene.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (double& v : score.data) v += noise(rng);
    for (double& v : regress.data) v += noise(rng);
  }
  return {std::move(score), std::move(regress)};
}

}  // namespace farpn
