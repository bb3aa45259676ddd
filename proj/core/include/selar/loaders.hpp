#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selar/graph.hpp"
#include "selar/labels.hpp"

namespace selar {

// Interaction + knowledge-triple files. Users, items, and knowledge
// entities become three node types (entity appears only when some entity id
// does not name an item); every interaction with label 1 becomes a
// user-item edge and every relation becomes its own edge type.
struct KgDataset {
  HeteroGraph graph;
  PairLabelSet primary;  // all interactions, both labels, task 0
  int64_t n_users = 0;
  int64_t n_items = 0;
  int64_t n_entities = 0;  // includes items

  int64_t user_node(int64_t user_id) const { return user_id; }
  int64_t entity_node(int64_t entity_id) const { return n_users + entity_id; }
};

KgDataset load_kg_dataset(const std::string& interactions_path,
                          const std::string& triples_path);

// Typed node/edge/label files for node classification.
struct TypedDataset {
  HeteroGraph graph;
  std::vector<int32_t> node_labels;  // -1 where unlabeled
  int32_t n_classes = 0;

  std::vector<int64_t> labeled_nodes() const;
};

TypedDataset load_typed_graph(const std::string& nodes_path,
                              const std::string& edges_path,
                              const std::string& labels_path);

}  // namespace selar
