#pragma once

#include <string>
#include <vector>

#include "farpn/anchors.hpp"
#include "farpn/psroi.hpp"
#include "farpn/refine_types.hpp"

namespace farpn {

struct RefineConfig {
  int iterations = 1;    // extra re-pooling rounds after the initial scoring
  int top_k = 20000;     // proposals carried into each refinement round
  int output_n = 1000;   // proposals returned
};

// A proposal together with the regression delta pooled for it, the unit
// carried between refinement rounds.
struct ScoredProposal {
  Proposal proposal;
  Delta delta;
};

// Pool both branches for every anchor. Scores are the softmax face
// probability; output is in anchor order with iteration 0.
std::vector<ScoredProposal> score_all(const FeatureMap& score_map,
                                      const FeatureMap& regress_map,
                                      const AnchorSet& anchors,
                                      const PoolConfig& pool_cfg);

// One refinement round: take the top_k by score (stable ties by index),
// apply each proposal's delta, clip to the image, drop degenerate boxes and
// re-pool from the same feature maps. A move that lowers the score is
// rejected and the input proposal is carried forward unchanged.
std::vector<ScoredProposal> refine_step(const FeatureMap& score_map,
                                        const FeatureMap& regress_map,
                                        const std::vector<ScoredProposal>& in,
                                        const RefineConfig& cfg,
                                        const PoolConfig& pool_cfg,
                                        double image_width,
                                        double image_height);

// Full pipeline: place anchors, score, run cfg.iterations refinement
// rounds, then rank the union of all rounds' proposals by score (stable,
// ties by index) and truncate to output_n.
std::vector<Proposal> propose(const FeatureMap& score_map,
                              const FeatureMap& regress_map,
                              const AnchorConfig& anchor_cfg,
                              const RefineConfig& cfg,
                              const PoolConfig& pool_cfg);

// Like propose but over a caller-supplied anchor set (used for uniform
// stride experiments and ground-truth diagnostics).
std::vector<Proposal> propose_from_anchors(const FeatureMap& score_map,
                                           const FeatureMap& regress_map,
                                           const AnchorSet& anchors,
                                           const RefineConfig& cfg,
                                           const PoolConfig& pool_cfg,
                                           double image_width,
                                           double image_height);

// CSV export: one line per proposal `x1,y1,x2,y2,score,iteration`.
std::string proposals_to_csv(const std::vector<Proposal>& proposals);
std::vector<Proposal> proposals_from_csv(const std::string& text);

}  // namespace farpn
