#include "selar/hubs.hpp"

#include "selar/error.hpp"

namespace selar {

HeteroGraph augment_with_hubs(const HeteroGraph& g) {
  g.validate();
  const int64_t n = g.num_nodes();
  const int32_t n_types = g.num_node_types();

  HeteroGraph out;
  out.node_type_names = g.node_type_names;
  // The hub type name must not collide; suffix until it is fresh.
  std::string hub_type = "hub";
  while (out.node_type_index(hub_type) >= 0) hub_type += "+";
  out.node_type_names.push_back(hub_type);
  const int32_t hub_type_id = n_types;

  out.node_type_of = g.node_type_of;
  for (int32_t t = 0; t < n_types; ++t) out.node_type_of.push_back(hub_type_id);
  const int64_t n_out = out.num_nodes();

  out.edge_type_names = g.edge_type_names;
  out.endpoints = g.endpoints;
  out.adjacency.reserve(g.adjacency.size() + 2 * static_cast<size_t>(n_types));
  for (const SparseBool& a : g.adjacency) {
    out.adjacency.emplace_back(n_out, n_out, a.entries());
  }

  for (int32_t t = 0; t < n_types; ++t) {
    const int64_t hub = n + t;
    std::vector<std::pair<int64_t, int64_t>> to_hub, from_hub;
    for (int64_t v = 0; v < n; ++v) {
      if (g.node_type_of[static_cast<size_t>(v)] != t) continue;
      to_hub.emplace_back(v, hub);
      from_hub.emplace_back(hub, v);
    }
    std::string base = g.node_type_names[static_cast<size_t>(t)];
    out.edge_type_names.push_back("to-" + hub_type + ":" + base);
    out.endpoints.push_back({t, hub_type_id});
    out.adjacency.emplace_back(n_out, n_out, std::move(to_hub));
    out.edge_type_names.push_back("from-" + hub_type + ":" + base);
    out.endpoints.push_back({hub_type_id, t});
    out.adjacency.emplace_back(n_out, n_out, std::move(from_hub));
  }

  if (g.features) {
    Tensor f({n_out, g.features->cols()});
    std::copy(g.features->data(), g.features->data() + g.features->numel(), f.data());
    out.features = std::move(f);
  }

  out.validate();
  return out;
}

}  // namespace selar
