#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selar/sparse_bool.hpp"
#include "selar/tensor.hpp"

namespace selar {

using SparsePtr = std::shared_ptr<const SparseBool>;

// Heterogeneous graph: typed nodes plus one |V| x |V| adjacency per edge
// type. Each edge type connects a fixed (source type, destination type)
// pair; validate() enforces that on every stored entry.
struct HeteroGraph {
  struct Endpoints {
    int32_t src_type = -1;
    int32_t dst_type = -1;
  };

  std::vector<std::string> node_type_names;
  std::vector<std::string> edge_type_names;
  std::vector<int32_t> node_type_of;     // one per node
  std::vector<SparseBool> adjacency;     // one per edge type
  std::vector<Endpoints> endpoints;      // one per edge type
  std::optional<Tensor> features;        // |V| x d when present

  int64_t num_nodes() const { return static_cast<int64_t>(node_type_of.size()); }
  int32_t num_node_types() const { return static_cast<int32_t>(node_type_names.size()); }
  int32_t num_edge_types() const { return static_cast<int32_t>(edge_type_names.size()); }

  int32_t node_type_index(const std::string& name) const;
  int32_t edge_type_index(const std::string& name) const;
  std::vector<int64_t> nodes_of_type(int32_t type) const;
  int64_t count_of_type(int32_t type) const;
  bool is_heterogeneous() const {
    return node_type_names.size() > 1 || edge_type_names.size() > 1;
  }

  void validate() const;
};

class HeteroGraphBuilder {
 public:
  int32_t add_node_type(const std::string& name);
  int64_t add_node(int32_t type);
  std::vector<int64_t> add_nodes(int32_t type, int64_t count);
  int32_t add_edge_type(const std::string& name, int32_t src_type, int32_t dst_type);
  void add_edge(int32_t edge_type, int64_t u, int64_t v);
  void set_features(Tensor features);

  int64_t num_nodes() const { return static_cast<int64_t>(node_type_of_.size()); }

  HeteroGraph build() const;

 private:
  std::vector<std::string> node_type_names_;
  std::vector<std::string> edge_type_names_;
  std::vector<int32_t> node_type_of_;
  std::vector<HeteroGraph::Endpoints> endpoints_;
  std::vector<std::vector<std::pair<int64_t, int64_t>>> edges_;
  std::optional<Tensor> features_;
};

// Union of all typed adjacencies, symmetrized, with self loops; the shared
// message-passing structure the encoders run on.
struct Homogenized {
  SparsePtr adj;        // symmetrized union + self loops
  SparsePtr adj_plain;  // symmetrized union, no self loops
  Tensor gcn_norm;      // per entry of adj: 1/sqrt(deg(u) deg(v))
};

Homogenized homogenize(const HeteroGraph& g);

}  // namespace selar
