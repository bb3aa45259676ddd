#pragma once

#include <cstdint>
#include <span>

namespace selar {

// Rank-based AUC (tied scores share their average rank). Throws a data
// error when only one class is present, where the metric is undefined.
double auc_score(std::span<const double> scores, std::span<const int8_t> labels);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// Multi-class F1. Classes absent from both predictions and truth contribute
// zero to the macro average.
F1Scores f1_scores(std::span<const int32_t> predicted, std::span<const int32_t> truth,
                   int32_t n_classes);

}  // namespace selar
