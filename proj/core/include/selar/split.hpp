#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace selar {

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  bool stratified = true;
  uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<int64_t> train, val, test;
};

// Disjoint shuffled split of [0, n). Fractions must sum to 1; every part
// must end up non-empty. Stratified mode splits within each label value,
// preserving proportions to within one item per class.
SplitIndices split_indices(int64_t n, std::span<const int32_t> labels,
                           const SplitSpec& spec);

}  // namespace selar
