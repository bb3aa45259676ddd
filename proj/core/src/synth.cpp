#include "selar/synth.hpp"

#include <string>

#include "selar/error.hpp"
#include "selar/rng.hpp"

namespace selar {

void SynthConfig::validate() const {
  if (n_per_type < 2) throw Error::config("synth: need at least 2 nodes per type");
  if (n_node_types < 1 || n_edge_types < 1) {
    throw Error::config("synth: need at least one node and edge type");
  }
  if (n_node_types == 1 && n_edge_types == 1) {
    throw Error::config("synth: degenerate schema is homogeneous; add a type");
  }
  if (edge_prob < 0.0 || edge_prob > 1.0) throw Error::config("synth: edge_prob outside [0,1]");
  if (signal_strength < 0.0 || signal_strength > 1.0) {
    throw Error::config("synth: signal_strength outside [0,1]");
  }
  if (base_positive_rate < 0.0 || base_positive_rate >= 1.0) {
    throw Error::config("synth: base_positive_rate outside [0,1)");
  }
  if (n_primary_pairs < 2) throw Error::config("synth: need at least 2 primary pairs");
  if (planted_edge_seq.empty()) throw Error::config("synth: planted chain is empty");
  for (int32_t e : planted_edge_seq) {
    if (e < 0 || e >= n_edge_types) {
      throw Error::config("synth: planted chain references edge type " + std::to_string(e));
    }
  }
  const int32_t m = n_node_types;
  for (size_t i = 0; i + 1 < planted_edge_seq.size(); ++i) {
    if ((planted_edge_seq[i] + 1) % m != planted_edge_seq[i + 1] % m) {
      throw Error::config("synth: planted chain does not compose in the cyclic schema");
    }
  }
}

SynthDataset synth_hetero(const SynthConfig& cfg) {
  cfg.validate();
  const int32_t m = cfg.n_node_types;

  HeteroGraphBuilder b;
  for (int32_t t = 0; t < m; ++t) {
    b.add_node_type("T" + std::to_string(t));
    }
  for (int32_t t = 0; t < m; ++t) b.add_nodes(t, cfg.n_per_type);
  auto first_of = [&](int32_t t) { return static_cast<int64_t>(t) * cfg.n_per_type; };

  auto edges_rng = substream(cfg.seed, "synth.edges");
  for (int32_t e = 0; e < cfg.n_edge_types; ++e) {
    const int32_t src = e % m;
    const int32_t dst = (e + 1) % m;
    b.add_edge_type("E" + std::to_string(e), src, dst);
    for (int64_t i = 0; i < cfg.n_per_type; ++i) {
      for (int64_t j = 0; j < cfg.n_per_type; ++j) {
        const int64_t u = first_of(src) + i;
        const int64_t v = first_of(dst) + j;
        if (u == v) continue;
        if (rand_uniform(edges_rng) < cfg.edge_prob) b.add_edge(e, u, v);
      }
    }
  }

  SynthDataset ds;
  ds.graph = b.build();
  {
    const int64_t n = ds.graph.num_nodes();
    Tensor eye({n, n});
    for (int64_t i = 0; i < n; ++i) eye.at(i, i) = 1.0;
    ds.graph.features = std::move(eye);
  }
  ds.planted = MetaPathSpec{cfg.planted_edge_seq};

  const SparseBool reach = compose_adjacency(ds.graph, ds.planted);
  const int32_t src_t = spec_src_type(ds.graph, ds.planted);
  const int32_t dst_t = spec_dst_type(ds.graph, ds.planted);

  // Pairs are drawn 1:1 from chain-connected and unconnected candidates (the
  // usual interacting/non-interacting balance for link prediction); when one
  // side runs short the other fills in.
  std::vector<std::pair<int64_t, int64_t>> linked, unlinked;
  for (int64_t i = 0; i < cfg.n_per_type; ++i) {
    for (int64_t j = 0; j < cfg.n_per_type; ++j) {
      const int64_t u = first_of(src_t) + i;
      const int64_t v = first_of(dst_t) + j;
      if (u == v) continue;
      (reach.has(u, v) ? linked : unlinked).emplace_back(u, v);
    }
  }
  const int64_t total = static_cast<int64_t>(linked.size() + unlinked.size());
  if (cfg.n_primary_pairs > total) {
    throw Error::config("synth: n_primary_pairs exceeds distinct pair count");
  }

  auto pairs_rng = substream(cfg.seed, "synth.pairs");
  auto labels_rng = substream(cfg.seed, "synth.labels");
  int64_t n_linked = std::min<int64_t>(cfg.n_primary_pairs / 2,
                                       static_cast<int64_t>(linked.size()));
  int64_t n_unlinked = std::min<int64_t>(cfg.n_primary_pairs - n_linked,
                                         static_cast<int64_t>(unlinked.size()));
  n_linked = cfg.n_primary_pairs - n_unlinked;
  partial_shuffle(linked, static_cast<size_t>(n_linked), pairs_rng);
  partial_shuffle(unlinked, static_cast<size_t>(n_unlinked), pairs_rng);

  std::vector<std::pair<int64_t, int64_t>> chosen;
  chosen.reserve(static_cast<size_t>(cfg.n_primary_pairs));
  chosen.insert(chosen.end(), linked.begin(), linked.begin() + n_linked);
  chosen.insert(chosen.end(), unlinked.begin(), unlinked.begin() + n_unlinked);
  partial_shuffle(chosen, chosen.size(), pairs_rng);

  const double lifted =
      cfg.base_positive_rate + cfg.signal_strength * (1.0 - cfg.base_positive_rate);
  ds.primary.task_id = 0;
  ds.primary.pairs.reserve(static_cast<size_t>(cfg.n_primary_pairs));
  for (const auto& [u, v] : chosen) {
    const double p = reach.has(u, v) ? lifted : cfg.base_positive_rate;
    const int8_t y = rand_uniform(labels_rng) < p ? 1 : 0;
    ds.primary.pairs.push_back({u, v, y});
  }
  return ds;
}

}  // namespace selar
