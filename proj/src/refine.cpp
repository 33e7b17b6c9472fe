#include "farpn/refine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace farpn {

std::vector<ScoredProposal> score_all(const FeatureMap& score_map,
                                      const FeatureMap& regress_map,
                                      const AnchorSet& anchors,
                                      const PoolConfig& pool_cfg) {
  const std::vector<PooledResult> pooled =
      batch_pool(score_map, regress_map, anchors.boxes, pool_cfg);
  std::vector<ScoredProposal> out(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    out[i].proposal = Proposal{anchors.boxes[i], face_probability(pooled[i]), 0};
    out[i].delta = pooled[i].delta;
  }
  return out;
}

namespace {

// Indices of the top_k highest scores, stable ties by index.
std::vector<std::size_t> top_indices(const std::vector<ScoredProposal>& props,
                                     int top_k) {
  std::vector<std::size_t> order(props.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return props[a].proposal.score > props[b].proposal.score;
                   });
  if (static_cast<int>(order.size()) > top_k) order.resize(top_k);
  return order;
}

}  // namespace

std::vector<ScoredProposal> refine_step(const FeatureMap& score_map,
                                        const FeatureMap& regress_map,
                                        const std::vector<ScoredProposal>& in,
                                        const RefineConfig& cfg,
                                        const PoolConfig& pool_cfg,
                                        double image_width,
                                        double image_height) {
  std::vector<Box> boxes;
  std::vector<const ScoredProposal*> parent;
  boxes.reserve(std::min<std::size_t>(in.size(), cfg.top_k));
  for (std::size_t idx : top_indices(in, cfg.top_k)) {
    const ScoredProposal& sp = in[idx];
    Box b = clip(decode(sp.proposal.box, sp.delta), image_width, image_height);
    if (b.width() < 1.0 || b.height() < 1.0) continue;
    boxes.push_back(b);
    parent.push_back(&sp);
  }

  const std::vector<PooledResult> pooled =
      batch_pool(score_map, regress_map, boxes, pool_cfg);
  std::vector<ScoredProposal> out(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double s = face_probability(pooled[i]);
    if (s < parent[i]->proposal.score) {
      // Greedy guard: a move that lowers the score (typically pooling a
      // neighbouring object's regression field) is rejected and the box
      // stays put for this round.
      out[i] = *parent[i];
      out[i].proposal.iteration = parent[i]->proposal.iteration + 1;
    } else {
      out[i].proposal =
          Proposal{boxes[i], s, parent[i]->proposal.iteration + 1};
      out[i].delta = pooled[i].delta;
    }
  }
  return out;
}

std::vector<Proposal> propose_from_anchors(const FeatureMap& score_map,
                                           const FeatureMap& regress_map,
                                           const AnchorSet& anchors,
                                           const RefineConfig& cfg,
                                           const PoolConfig& pool_cfg,
                                           double image_width,
                                           double image_height) {
  if (!(cfg.top_k >= cfg.output_n && cfg.output_n >= 1 && cfg.iterations >= 0)) {
    throw std::invalid_argument("invalid refine config");
  }
  std::vector<ScoredProposal> current =
      score_all(score_map, regress_map, anchors, pool_cfg);
  // Every round's boxes stay in the candidate pool: a later round can drift
  // a converged box off target, so ranking considers all iterations.
  std::vector<ScoredProposal> pool = current;
  for (int it = 0; it < cfg.iterations; ++it) {
    current = refine_step(score_map, regress_map, current, cfg, pool_cfg,
                          image_width, image_height);
    pool.insert(pool.end(), current.begin(), current.end());
  }
  std::vector<Proposal> out;
  out.reserve(std::min<std::size_t>(pool.size(), cfg.output_n));
  for (std::size_t idx : top_indices(pool, cfg.output_n)) {
    out.push_back(pool[idx].proposal);
  }
  return out;
}

std::vector<Proposal> propose(const FeatureMap& score_map,
                              const FeatureMap& regress_map,
                              const AnchorConfig& anchor_cfg,
                              const RefineConfig& cfg,
                              const PoolConfig& pool_cfg) {
  return propose_from_anchors(score_map, regress_map, place(anchor_cfg), cfg,
                              pool_cfg, anchor_cfg.image_width,
                              anchor_cfg.image_height);
}

std::string proposals_to_csv(const std::vector<Proposal>& proposals) {
  std::ostringstream os;
  os.precision(17);
  for (const Proposal& p : proposals) {
    os << p.box.x1 << ',' << p.box.y1 << ',' << p.box.x2 << ',' << p.box.y2
       << ',' << p.score << ',' << p.iteration << '\n';
  }
  return os.str();
}

std::vector<Proposal> proposals_from_csv(const std::string& text) {
  std::vector<Proposal> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Proposal p;
    if (!(ls >> p.box.x1 >> p.box.y1 >> p.box.x2 >> p.box.y2 >> p.score >>
          p.iteration)) {
      throw std::runtime_error("malformed proposal CSV at line " +
                               std::to_string(lineno));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace farpn
