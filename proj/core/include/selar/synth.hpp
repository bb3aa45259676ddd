#pragma once

#include <cstdint>
#include <vector>

#include "selar/graph.hpp"
#include "selar/labels.hpp"
#include "selar/metapath.hpp"

namespace selar {

// Synthetic heterogeneous graph with a planted relational signal. Node
// types form a cycle: edge type k runs from type (k mod m) to type
// (k+1 mod m), so consecutive edge-type ids always compose. Primary pairs
// are drawn 1:1 from chain-connected and unconnected candidates; labels are
// Bernoulli with rate base_positive_rate, lifted to
// base + signal_strength * (1 - base) when the pair is connected along the
// planted chain; signal_strength 0 gives labels independent of structure.
// Nodes carry one-hot identity features, the usual featureless-graph stand-in.
struct SynthConfig {
  int64_t n_per_type = 100;
  int32_t n_node_types = 2;
  int32_t n_edge_types = 2;
  double edge_prob = 0.03;
  std::vector<int32_t> planted_edge_seq = {0, 1};
  double signal_strength = 0.8;
  double base_positive_rate = 0.12;
  int64_t n_primary_pairs = 2000;
  uint64_t seed = 1;

  void validate() const;
};

struct SynthDataset {
  HeteroGraph graph;
  PairLabelSet primary;
  MetaPathSpec planted;
};

SynthDataset synth_hetero(const SynthConfig& cfg);

}  // namespace selar
