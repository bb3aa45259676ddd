#include "selar/graph.hpp"

#include <algorithm>
#include <cmath>

#include "selar/error.hpp"

namespace selar {

int32_t HeteroGraph::node_type_index(const std::string& name) const {
  for (size_t i = 0; i < node_type_names.size(); ++i) {
    if (node_type_names[i] == name) return static_cast<int32_t>(i);
  }
  return -1;
}

int32_t HeteroGraph::edge_type_index(const std::string& name) const {
  for (size_t i = 0; i < edge_type_names.size(); ++i) {
    if (edge_type_names[i] == name) return static_cast<int32_t>(i);
  }
  return -1;
}

std::vector<int64_t> HeteroGraph::nodes_of_type(int32_t type) const {
  std::vector<int64_t> out;
  for (int64_t v = 0; v < num_nodes(); ++v) {
    if (node_type_of[static_cast<size_t>(v)] == type) out.push_back(v);
  }
  return out;
}

int64_t HeteroGraph::count_of_type(int32_t type) const {
  int64_t n = 0;
  for (int32_t t : node_type_of) n += (t == type);
  return n;
}

void HeteroGraph::validate() const {
  const int64_t n = num_nodes();
  for (int32_t t : node_type_of) {
    if (t < 0 || t >= num_node_types()) {
      throw Error::data("graph: node type id out of range");
    }
  }
  if (adjacency.size() != edge_type_names.size() ||
      endpoints.size() != edge_type_names.size()) {
    throw Error::data("graph: per-edge-type arrays disagree in length");
  }
  for (size_t e = 0; e < adjacency.size(); ++e) {
    const SparseBool& a = adjacency[e];
    if (a.rows() != n || a.cols() != n) {
      throw Error::shape("graph: adjacency for " + edge_type_names[e] +
                         " is not |V| x |V|");
    }
    const auto& ep = endpoints[e];
    if (ep.src_type < 0 || ep.src_type >= num_node_types() || ep.dst_type < 0 ||
        ep.dst_type >= num_node_types()) {
      throw Error::data("graph: endpoint types out of range for " + edge_type_names[e]);
    }
    for (auto [u, v] : a.entries()) {
      if (node_type_of[static_cast<size_t>(u)] != ep.src_type ||
          node_type_of[static_cast<size_t>(v)] != ep.dst_type) {
        throw Error::data("graph: edge of type " + edge_type_names[e] +
                          " violates its endpoint typing");
      }
    }
  }
  if (features && features->rows() != n) {
    throw Error::shape("graph: feature matrix row count != |V|");
  }
}

int32_t HeteroGraphBuilder::add_node_type(const std::string& name) {
  for (const auto& existing : node_type_names_) {
    if (existing == name) throw Error::data("builder: duplicate node type " + name);
  }
  node_type_names_.push_back(name);
  return static_cast<int32_t>(node_type_names_.size() - 1);
}

int64_t HeteroGraphBuilder::add_node(int32_t type) {
  if (type < 0 || type >= static_cast<int32_t>(node_type_names_.size())) {
    throw Error::data("builder: unknown node type id");
  }
  node_type_of_.push_back(type);
  return static_cast<int64_t>(node_type_of_.size() - 1);
}

std::vector<int64_t> HeteroGraphBuilder::add_nodes(int32_t type, int64_t count) {
  std::vector<int64_t> ids;
  ids.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) ids.push_back(add_node(type));
  return ids;
}

int32_t HeteroGraphBuilder::add_edge_type(const std::string& name, int32_t src_type,
                                          int32_t dst_type) {
  for (const auto& existing : edge_type_names_) {
    if (existing == name) throw Error::data("builder: duplicate edge type " + name);
  }
  if (src_type < 0 || src_type >= static_cast<int32_t>(node_type_names_.size()) ||
      dst_type < 0 || dst_type >= static_cast<int32_t>(node_type_names_.size())) {
    throw Error::data("builder: edge type " + name + " references unknown node type");
  }
  edge_type_names_.push_back(name);
  endpoints_.push_back({src_type, dst_type});
  edges_.emplace_back();
  return static_cast<int32_t>(edge_type_names_.size() - 1);
}

void HeteroGraphBuilder::add_edge(int32_t edge_type, int64_t u, int64_t v) {
  if (edge_type < 0 || edge_type >= static_cast<int32_t>(edge_type_names_.size())) {
    throw Error::data("builder: unknown edge type id");
  }
  const int64_t n = num_nodes();
  if (u < 0 || u >= n || v < 0 || v >= n) {
    throw Error::data("builder: edge endpoint out of range");
  }
  const auto& ep = endpoints_[static_cast<size_t>(edge_type)];
  if (node_type_of_[static_cast<size_t>(u)] != ep.src_type ||
      node_type_of_[static_cast<size_t>(v)] != ep.dst_type) {
    throw Error::data("builder: edge violates endpoint typing for " +
                      edge_type_names_[static_cast<size_t>(edge_type)]);
  }
  edges_[static_cast<size_t>(edge_type)].emplace_back(u, v);
}

void HeteroGraphBuilder::set_features(Tensor features) {
  if (features.rank() != 2) throw Error::shape("builder: features must be a matrix");
  features_ = std::move(features);
}

HeteroGraph HeteroGraphBuilder::build() const {
  HeteroGraph g;
  g.node_type_names = node_type_names_;
  g.edge_type_names = edge_type_names_;
  g.node_type_of = node_type_of_;
  g.endpoints = endpoints_;
  const int64_t n = num_nodes();
  g.adjacency.reserve(edges_.size());
  for (const auto& e : edges_) {
    g.adjacency.emplace_back(n, n, e);
  }
  g.features = features_;
  g.validate();
  return g;
}

Homogenized homogenize(const HeteroGraph& g) {
  const int64_t n = g.num_nodes();
  std::vector<std::pair<int64_t, int64_t>> entries;
  for (const SparseBool& a : g.adjacency) {
    for (auto [u, v] : a.entries()) {
      entries.emplace_back(u, v);
      entries.emplace_back(v, u);
    }
  }
  SparseBool plain(n, n, entries);
  for (int64_t i = 0; i < n; ++i) entries.emplace_back(i, i);
  SparseBool with_loops(n, n, std::move(entries));

  // Symmetric normalization over the self-loop graph.
  std::vector<double> deg(static_cast<size_t>(n), 0.0);
  for (int64_t u = 0; u < n; ++u) {
    deg[static_cast<size_t>(u)] =
        static_cast<double>(with_loops.row_degree(u));
  }
  Tensor norm({with_loops.nnz()});
  for (int64_t u = 0; u < n; ++u) {
    for (int64_t k = with_loops.row_ptr()[u]; k < with_loops.row_ptr()[u + 1]; ++k) {
      const int64_t v = with_loops.col_idx()[k];
      norm.at(k) = 1.0 / std::sqrt(deg[static_cast<size_t>(u)] * deg[static_cast<size_t>(v)]);
    }
  }

  Homogenized h;
  h.adj = std::make_shared<SparseBool>(std::move(with_loops));
  h.adj_plain = std::make_shared<SparseBool>(std::move(plain));
  h.gcn_norm = std::move(norm);
  return h;
}

}  // namespace selar
