#include "selar/metapath.hpp"

#include <algorithm>

#include "selar/error.hpp"

namespace selar {

std::string MetaPathSpec::to_name(const HeteroGraph& g) const {
  std::string out;
  for (size_t i = 0; i < edge_seq.size(); ++i) {
    if (i) out += '.';
    const int32_t e = edge_seq[i];
    if (e < 0 || e >= g.num_edge_types()) {
      out += "?";
    } else {
      out += g.edge_type_names[static_cast<size_t>(e)];
    }
  }
  return out;
}

void check_composable(const HeteroGraph& g, const MetaPathSpec& spec) {
  if (spec.edge_seq.empty()) throw Error::data("meta-path: empty edge sequence");
  for (int32_t e : spec.edge_seq) {
    if (e < 0 || e >= g.num_edge_types()) {
      throw Error::data("meta-path: unknown edge type id " + std::to_string(e));
    }
  }
  for (size_t i = 0; i + 1 < spec.edge_seq.size(); ++i) {
    const auto& a = g.endpoints[static_cast<size_t>(spec.edge_seq[i])];
    const auto& b = g.endpoints[static_cast<size_t>(spec.edge_seq[i + 1])];
    if (a.dst_type != b.src_type) {
      throw Error::data(
          "meta-path: steps " + g.edge_type_names[static_cast<size_t>(spec.edge_seq[i])] +
          " and " + g.edge_type_names[static_cast<size_t>(spec.edge_seq[i + 1])] +
          " do not compose");
    }
  }
}

int32_t spec_src_type(const HeteroGraph& g, const MetaPathSpec& spec) {
  check_composable(g, spec);
  return g.endpoints[static_cast<size_t>(spec.edge_seq.front())].src_type;
}

int32_t spec_dst_type(const HeteroGraph& g, const MetaPathSpec& spec) {
  check_composable(g, spec);
  return g.endpoints[static_cast<size_t>(spec.edge_seq.back())].dst_type;
}

SparseBool compose_adjacency(const HeteroGraph& g, const MetaPathSpec& spec) {
  check_composable(g, spec);
  SparseBool acc = g.adjacency[static_cast<size_t>(spec.edge_seq[0])];
  for (size_t i = 1; i < spec.edge_seq.size(); ++i) {
    acc = acc.multiply(g.adjacency[static_cast<size_t>(spec.edge_seq[i])]);
  }
  return acc;
}

std::set<std::pair<int64_t, int64_t>> enumerate_paths_bruteforce(
    const HeteroGraph& g, const MetaPathSpec& spec, int64_t node_cap) {
  check_composable(g, spec);
  if (g.num_nodes() > node_cap) {
    throw Error::contract("bruteforce path enumeration refused: graph has " +
                          std::to_string(g.num_nodes()) + " nodes, cap is " +
                          std::to_string(node_cap));
  }

  const size_t depth_max = spec.length();
  std::set<std::pair<int64_t, int64_t>> reachable;

  // Depth-first walk from each start node. A (node, depth) state is pushed
  // at most once per start, which keeps the walk exhaustive but finite.
  std::vector<std::vector<char>> seen(
      depth_max + 1, std::vector<char>(static_cast<size_t>(g.num_nodes()), 0));
  std::vector<std::pair<int64_t, size_t>> stack;

  const int32_t start_type = g.endpoints[static_cast<size_t>(spec.edge_seq[0])].src_type;
  for (int64_t start = 0; start < g.num_nodes(); ++start) {
    if (g.node_type_of[static_cast<size_t>(start)] != start_type) continue;
    for (auto& level : seen) std::fill(level.begin(), level.end(), 0);
    stack.clear();
    stack.emplace_back(start, 0);
    seen[0][static_cast<size_t>(start)] = 1;
    while (!stack.empty()) {
      auto [node, depth] = stack.back();
      stack.pop_back();
      if (depth == depth_max) {
        reachable.emplace(start, node);
        continue;
      }
      const SparseBool& a = g.adjacency[static_cast<size_t>(spec.edge_seq[depth])];
      for (int64_t k = a.row_ptr()[node]; k < a.row_ptr()[node + 1]; ++k) {
        const int64_t next = a.col_idx()[k];
        if (!seen[depth + 1][static_cast<size_t>(next)]) {
          seen[depth + 1][static_cast<size_t>(next)] = 1;
          stack.emplace_back(next, depth + 1);
        }
      }
    }
  }
  return reachable;
}

std::vector<MetaPathSpec> enumerate_composable_specs(const HeteroGraph& g,
                                                     size_t min_len, size_t max_len) {
  if (min_len == 0 || min_len > max_len) {
    throw Error::config("meta-path enumeration: bad length range");
  }
  std::vector<MetaPathSpec> out;
  std::vector<int32_t> chain;

  auto extend = [&](auto&& self, int32_t tail_dst) -> void {
    if (chain.size() >= min_len) out.push_back(MetaPathSpec{chain});
    if (chain.size() == max_len) return;
    for (int32_t e = 0; e < g.num_edge_types(); ++e) {
      if (g.endpoints[static_cast<size_t>(e)].src_type != tail_dst) continue;
      chain.push_back(e);
      self(self, g.endpoints[static_cast<size_t>(e)].dst_type);
      chain.pop_back();
    }
  };

  for (int32_t e = 0; e < g.num_edge_types(); ++e) {
    chain.push_back(e);
    extend(extend, g.endpoints[static_cast<size_t>(e)].dst_type);
    chain.pop_back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<MetaPathSpec, int64_t>> rank_specs_by_positives(
    const HeteroGraph& g, const std::vector<MetaPathSpec>& specs) {
  std::vector<std::pair<MetaPathSpec, int64_t>> ranked;
  ranked.reserve(specs.size());
  for (const auto& s : specs) {
    ranked.emplace_back(s, compose_adjacency(g, s).nnz());
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

}  // namespace selar
