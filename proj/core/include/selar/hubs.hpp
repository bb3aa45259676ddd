#pragma once

#include "selar/graph.hpp"

namespace selar {

// Adds one hub node per existing node type, connected to every node of that
// type in both directions through fresh edge types. Existing node ids are
// unchanged; hub ids start at the old |V|. Existing features are kept and
// hub rows are zero.
HeteroGraph augment_with_hubs(const HeteroGraph& g);

}  // namespace selar
