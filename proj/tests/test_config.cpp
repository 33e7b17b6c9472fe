#include <doctest/doctest.h>

#include <cmath>
#include <limits>

#include "farpn/config.hpp"

using namespace farpn;

TEST_CASE("defaults are the documented pipeline values") {
  const RunConfig c;
  CHECK(c.anchor.scales.size() == 11);
  CHECK(c.anchor.scales.front() == doctest::Approx(16.0));
  CHECK(c.anchor.scales.back() == doctest::Approx(512.0));
  CHECK(c.anchor.ratios == std::vector<double>{1.0});
  CHECK(c.anchor.min_stride == 16.0);
  CHECK(c.anchor.stride_divisor == 5.0);
  CHECK(c.pool.bins == 7);
  CHECK(c.pool.classes == 2);
  CHECK(c.assign.pos_iou == 0.5);
  CHECK(c.assign.neg_iou == 0.4);
  CHECK(c.assign.max_pos == 128);
  CHECK(c.assign.max_neg == 128);
  CHECK(c.assign.hard_neg == 32);
  CHECK(c.assign.roi_cap == 50000);
  CHECK(c.refine.top_k == 20000);
  CHECK(c.nms.sigma == 0.35);
  CHECK(c.feature_stride == 16.0);
}

TEST_CASE("config JSON round-trips") {
  RunConfig c;
  c.anchor.scales = {32.0, 64.0};
  c.refine.iterations = 3;
  c.nms.mode = NmsConfig::Mode::Hard;
  c.nms.max_keep = 77;
  c.snip.max_side = std::numeric_limits<double>::infinity();
  c.noise_sd = 0.125;
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back.anchor.scales == c.anchor.scales);
  CHECK(back.refine.iterations == 3);
  CHECK(back.nms.mode == NmsConfig::Mode::Hard);
  CHECK(back.nms.max_keep == 77);
  CHECK(std::isinf(back.snip.max_side));
  CHECK(back.noise_sd == 0.125);
}

TEST_CASE("partial JSON keeps defaults for unset keys") {
  const RunConfig c = config_from_json(R"({"bins": 5, "sigma": 0.5})");
  CHECK(c.pool.bins == 5);
  CHECK(c.nms.sigma == 0.5);
  CHECK(c.assign.pos_iou == 0.5);           // untouched default
  CHECK(c.anchor.scales.size() == 11);      // untouched default
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(config_from_json(R"({"binz": 5})"), std::runtime_error);
  RunConfig c;
  CHECK_THROWS_AS(apply_override(c, "nope=1"), std::runtime_error);
}

TEST_CASE("overrides parse values as JSON with bare-word fallback") {
  RunConfig c;
  apply_override(c, "iterations=4");
  CHECK(c.refine.iterations == 4);
  apply_override(c, "scales=[8, 16]");
  CHECK(c.anchor.scales == std::vector<double>{8.0, 16.0});
  apply_override(c, "nms_mode=none");  // bare word
  CHECK(c.nms.mode == NmsConfig::Mode::None);
  apply_override(c, "snip_max=inf");
  CHECK(std::isinf(c.snip.max_side));
  CHECK_THROWS_AS(apply_override(c, "iterations"), std::runtime_error);
  CHECK_THROWS_AS(apply_override(c, "nms_mode=sideways"), std::runtime_error);
}
