#include <doctest/doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "farpn/nms.hpp"

using namespace farpn;

namespace {

// Brute-force reference: literal select/decay/drop loop with no shortcuts.
std::vector<Proposal> soft_nms_reference(std::vector<Proposal> in,
                                         const NmsConfig& cfg) {
  std::vector<Proposal> out;
  std::vector<bool> dead(in.size(), false);
  while (true) {
    if (cfg.max_keep > 0 && static_cast<int>(out.size()) >= cfg.max_keep) break;
    int best = -1;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (!dead[i] && (best < 0 || in[i].score > in[best].score)) best = static_cast<int>(i);
    if (best < 0) break;
    dead[best] = true;
    out.push_back(in[best]);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (dead[i]) continue;
      const double v = iou(in[best].box, in[i].box);
      in[i].score *= std::exp(-v * v / cfg.sigma);
      if (in[i].score < cfg.score_floor) dead[i] = true;
    }
  }
  return out;
}

std::vector<Proposal> random_proposals(std::uint64_t seed, int n,
                                       double extent = 200.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, extent * 0.7);
  std::uniform_real_distribution<double> len(5.0, extent * 0.3);
  std::uniform_real_distribution<double> sc(0.01, 1.0);
  std::vector<Proposal> out;
  for (int i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    out.push_back({Box{x, y, x + len(rng), y + len(rng)}, sc(rng), 0});
  }
  return out;
}

}  // namespace

TEST_CASE("soft nms two-box decay example") {
  // Identical boxes: the runner-up decays by exp(-1/0.35).
  const Box b{0, 0, 10, 10};
  const auto out = soft_nms({{b, 1.0, 0}, {b, 0.8, 0}}, {});
  REQUIRE(out.size() == 2);
  CHECK(out[0].score == doctest::Approx(1.0));
  CHECK(out[1].score == doctest::Approx(0.8 * std::exp(-1.0 / 0.35)));
  CHECK(out[1].score == doctest::Approx(0.04593).epsilon(1e-3));
}

TEST_CASE("disjoint boxes are untouched and ranked by score") {
  std::vector<Proposal> in{{Box{0, 0, 10, 10}, 0.3, 0},
                           {Box{50, 50, 60, 60}, 0.9, 0},
                           {Box{100, 0, 110, 10}, 0.6, 0}};
  const auto out = soft_nms(in, {});
  REQUIRE(out.size() == 3);
  CHECK(out[0].score == doctest::Approx(0.9));
  CHECK(out[1].score == doctest::Approx(0.6));
  CHECK(out[2].score == doctest::Approx(0.3));
  CHECK(out[0].box == in[1].box);
}

TEST_CASE("score floor drops decayed proposals") {
  const Box b{0, 0, 10, 10};
  NmsConfig cfg;
  cfg.score_floor = 0.05;  // 0.8 * exp(-1/0.35) = 0.0459 < floor
  const auto out = soft_nms({{b, 1.0, 0}, {b, 0.8, 0}}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].score == doctest::Approx(1.0));
}

TEST_CASE("soft nms matches the brute-force reference") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const auto in = random_proposals(seed, 120);
    for (int max_keep : {0, 17}) {
      NmsConfig cfg;
      cfg.max_keep = max_keep;
      const auto got = soft_nms(in, cfg);
      const auto want = soft_nms_reference(in, cfg);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].box == want[i].box);
        CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("output order is non-increasing in decayed score") {
  const auto out = soft_nms(random_proposals(9, 200), {});
  for (std::size_t i = 1; i < out.size(); ++i)
    CHECK(out[i].score <= out[i - 1].score + 1e-12);
}

TEST_CASE("input permutation does not change the result") {
  auto in = random_proposals(10, 80);
  const auto base = soft_nms(in, {});
  std::mt19937_64 rng(11);
  std::shuffle(in.begin(), in.end(), rng);
  const auto shuffled = soft_nms(in, {});
  REQUIRE(base.size() == shuffled.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].box == shuffled[i].box);
    CHECK(base[i].score == doctest::Approx(shuffled[i].score).epsilon(1e-12));
  }
}

TEST_CASE("tiny sigma approaches hard suppression") {
  // Clusters of mutually well-overlapped boxes, disjoint across clusters:
  // extreme soft decay and hard suppression both keep one box per cluster.
  std::vector<Proposal> in;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> sc(0.1, 1.0);
  for (double ox : {0.0, 100.0, 200.0})
    for (double jitter : {0.0, 1.0, 2.0, 3.0})
      in.push_back({Box{ox + jitter, 0, ox + jitter + 30, 30}, sc(rng), 0});
  NmsConfig soft;
  soft.sigma = 1e-6;
  soft.score_floor = 0.01;
  NmsConfig hard;
  hard.mode = NmsConfig::Mode::Hard;
  const auto s = soft_nms(in, soft);
  const auto h = hard_nms(in, hard);
  REQUIRE(s.size() == 3);
  REQUIRE(h.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s[i].box == h[i].box);
}

TEST_CASE("hard nms keeps the max and drops overlaps above threshold") {
  std::vector<Proposal> in{{Box{0, 0, 10, 10}, 0.9, 0},
                           {Box{1, 0, 11, 10}, 0.8, 0},    // iou 9/11 > 0.5
                           {Box{8, 0, 18, 10}, 0.7, 0}};   // iou vs first 2/18
  const auto out = hard_nms(in, {});
  REQUIRE(out.size() == 2);
  CHECK(out[0].box == in[0].box);
  CHECK(out[1].box == in[2].box);
  CHECK(out[0].score == doctest::Approx(0.9));  // survivors keep their score
  CHECK(out[1].score == doctest::Approx(0.7));
}

TEST_CASE("max_keep truncates the selection") {
  const auto in = random_proposals(13, 100);
  NmsConfig cfg;
  cfg.max_keep = 5;
  CHECK(soft_nms(in, cfg).size() == 5);
  cfg.mode = NmsConfig::Mode::Hard;
  CHECK(hard_nms(in, cfg).size() <= 5);
}

TEST_CASE("run_nms dispatches on mode") {
  const auto in = random_proposals(14, 50);
  NmsConfig cfg;
  cfg.mode = NmsConfig::Mode::None;
  const auto ranked = run_nms(in, cfg);
  REQUIRE(ranked.size() == in.size());
  for (std::size_t i = 1; i < ranked.size(); ++i)
    CHECK(ranked[i].score <= ranked[i - 1].score);
  double total_in = 0.0, total_out = 0.0;
  for (const auto& p : in) total_in += p.score;
  for (const auto& p : ranked) total_out += p.score;
  CHECK(total_out == doctest::Approx(total_in));  // no decay in Mode::None

  cfg.mode = NmsConfig::Mode::Soft;
  const auto s = run_nms(in, cfg);
  const auto s2 = soft_nms(in, cfg);
  REQUIRE(s.size() == s2.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].box == s2[i].box);
}

TEST_CASE("empty and single inputs") {
  CHECK(soft_nms({}, {}).empty());
  const auto one = soft_nms({{Box{0, 0, 5, 5}, 0.4, 0}}, {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].score == doctest::Approx(0.4));
}
