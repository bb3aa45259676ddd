#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selar/rng.hpp"
#include "selar/sparse_bool.hpp"

namespace selar {

struct PairSample {
  int64_t u = 0;
  int64_t v = 0;
  int8_t y = 0;

  bool operator==(const PairSample&) const = default;
};

// Labeled node pairs for one task: positives drawn from a relation matrix,
// negatives from its explicit zeros.
struct PairLabelSet {
  int32_t task_id = 0;
  std::vector<PairSample> pairs;

  int64_t size() const { return static_cast<int64_t>(pairs.size()); }
  int64_t count_pos() const;
  int64_t count_neg() const;

  // One "task_id u v y" line per pair.
  void save(const std::string& path) const;
  static PairLabelSet load(const std::string& path);

  bool operator==(const PairLabelSet&) const = default;
};

struct NegativeSamplingOptions {
  bool exclude_self_pairs = true;
  // When non-empty, negatives are drawn from candidate_rows x candidate_cols
  // instead of the full index range; positives are unaffected.
  std::vector<int64_t> candidate_rows;
  std::vector<int64_t> candidate_cols;
};

// Samples n_pos nonzero entries as y=1 and n_neg zero entries as y=0,
// deterministically from the seed. Requesting more than exist of either
// raises a data error naming the shortfall.
PairLabelSet build_pair_labels(const SparseBool& matrix, int64_t n_pos, int64_t n_neg,
                               uint64_t seed, int32_t task_id = 0,
                               const NegativeSamplingOptions& opts = {});

}  // namespace selar
