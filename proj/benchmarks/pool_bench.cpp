// Compares the OpenMP batch pooling kernel against the serial reference.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "farpn/psroi.hpp"

using namespace farpn;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double median_seconds(F&& fn) {
  std::vector<double> times;
  for (int r = 0; r < 5; ++r) {
    const auto t0 = Clock::now();
    fn();
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[2];
}

}  // namespace

int main(int argc, char** argv) {
  const int n_rois = argc > 1 ? std::atoi(argv[1]) : 50000;
  PoolConfig cfg;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 800.0), len(16.0, 200.0),
      val(-2.0, 2.0);
  FeatureMap score = FeatureMap::zeros(64, 64, cfg.score_channels(), 16.0);
  FeatureMap regress = FeatureMap::zeros(64, 64, cfg.regress_channels(), 16.0);
  for (double& v : score.data) v = val(rng);
  for (double& v : regress.data) v = val(rng);
  std::vector<Box> rois;
  for (int i = 0; i < n_rois; ++i) {
    const double x = pos(rng), y = pos(rng);
    rois.push_back({x, y, x + len(rng), y + len(rng)});
  }

  const double serial = median_seconds(
      [&] { batch_pool_serial(score, regress, rois, cfg); });
  const double parallel =
      median_seconds([&] { batch_pool(score, regress, rois, cfg); });
  std::printf("rois=%d threads=%d\n", n_rois, omp_get_max_threads());
  std::printf("serial   median %.3fs (%.1f us/roi)\n", serial,
              1e6 * serial / n_rois);
  std::printf("parallel median %.3fs (%.1f us/roi)  speedup %.2fx\n", parallel,
              1e6 * parallel / n_rois, serial / parallel);

  // Sanity: both kernels agree bit-for-bit.
  const auto a = batch_pool_serial(score, regress, rois, cfg);
  const auto b = batch_pool(score, regress, rois, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].class_scores != b[i].class_scores) {
      std::printf("MISMATCH at roi %zu\n", i);
      return 1;
    }
  }
  std::printf("kernels agree on all %zu rois\n", a.size());
  return 0;
}
