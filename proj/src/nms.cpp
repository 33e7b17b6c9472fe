#include "farpn/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace farpn {

namespace {

// Index of the highest-scoring live entry, ties resolved toward the lowest
// original index.
std::size_t argmax_live(const std::vector<Proposal>& props,
                        const std::vector<bool>& dead) {
  std::size_t best = props.size();
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (dead[i]) continue;
    if (best == props.size() || props[i].score > props[best].score) best = i;
  }
  return best;
}

void check(const NmsConfig& cfg) {
  if (!(cfg.sigma > 0.0) || cfg.score_floor < 0.0) {
    throw std::invalid_argument("invalid nms config");
  }
}

}  // namespace

std::vector<Proposal> soft_nms(std::vector<Proposal> proposals,
                               const NmsConfig& cfg) {
  check(cfg);
  std::vector<bool> dead(proposals.size(), false);
  std::vector<Proposal> kept;
  for (;;) {
    if (cfg.max_keep > 0 && static_cast<int>(kept.size()) >= cfg.max_keep) break;
    const std::size_t m = argmax_live(proposals, dead);
    if (m == proposals.size()) break;
    dead[m] = true;
    kept.push_back(proposals[m]);
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (dead[i]) continue;
      const double ov = iou(proposals[m].box, proposals[i].box);
      proposals[i].score *= std::exp(-(ov * ov) / cfg.sigma);
      if (proposals[i].score < cfg.score_floor) dead[i] = true;
    }
  }
  return kept;
}

std::vector<Proposal> hard_nms(std::vector<Proposal> proposals,
                               const NmsConfig& cfg) {
  check(cfg);
  std::vector<bool> dead(proposals.size(), false);
  std::vector<Proposal> kept;
  for (;;) {
    if (cfg.max_keep > 0 && static_cast<int>(kept.size()) >= cfg.max_keep) break;
    const std::size_t m = argmax_live(proposals, dead);
    if (m == proposals.size()) break;
    dead[m] = true;
    kept.push_back(proposals[m]);
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (!dead[i] && iou(proposals[m].box, proposals[i].box) > cfg.hard_iou) {
        dead[i] = true;
      }
    }
  }
  return kept;
}

std::vector<Proposal> run_nms(std::vector<Proposal> proposals,
                              const NmsConfig& cfg) {
  switch (cfg.mode) {
    case NmsConfig::Mode::Soft:
      return soft_nms(std::move(proposals), cfg);
    case NmsConfig::Mode::Hard:
      return hard_nms(std::move(proposals), cfg);
    case NmsConfig::Mode::None: {
      std::vector<std::size_t> order(proposals.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return proposals[a].score > proposals[b].score;
                       });
      std::vector<Proposal> out;
      out.reserve(proposals.size());
      for (std::size_t i : order) out.push_back(proposals[i]);
      return out;
    }
  }
  return proposals;
}

}  // namespace farpn
