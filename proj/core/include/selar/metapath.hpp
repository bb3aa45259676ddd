#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selar/graph.hpp"

namespace selar {

// A meta-path is a chain of edge types whose endpoint types compose:
// the destination type of step k must equal the source type of step k+1.
struct MetaPathSpec {
  std::vector<int32_t> edge_seq;

  size_t length() const { return edge_seq.size(); }
  std::string to_name(const HeteroGraph& g) const;

  bool operator==(const MetaPathSpec&) const = default;
  auto operator<=>(const MetaPathSpec&) const = default;
};

// Throws a data error when a step id is unknown or the chain does not
// compose. Empty specs are rejected too.
void check_composable(const HeteroGraph& g, const MetaPathSpec& spec);

// Source node type of the first step / destination type of the last.
int32_t spec_src_type(const HeteroGraph& g, const MetaPathSpec& spec);
int32_t spec_dst_type(const HeteroGraph& g, const MetaPathSpec& spec);

// Reachability along the chain as a boolean matrix: entry (u,v) is set iff
// at least one path u -> ... -> v follows the edge types in order.
SparseBool compose_adjacency(const HeteroGraph& g, const MetaPathSpec& spec);

// Independent reference: exhaustive depth-first walk over typed edges.
// Refuses graphs above node_cap, since it exists only to check small cases.
std::set<std::pair<int64_t, int64_t>> enumerate_paths_bruteforce(
    const HeteroGraph& g, const MetaPathSpec& spec, int64_t node_cap = 200);

// Every composable chain with length in [min_len, max_len], in
// lexicographic edge-id order.
std::vector<MetaPathSpec> enumerate_composable_specs(const HeteroGraph& g,
                                                     size_t min_len, size_t max_len);

// (spec, reachable-pair count) sorted by count descending, name ascending on
// ties; the count is the number of candidate positive labels the spec yields.
std::vector<std::pair<MetaPathSpec, int64_t>> rank_specs_by_positives(
    const HeteroGraph& g, const std::vector<MetaPathSpec>& specs);

}  // namespace selar
