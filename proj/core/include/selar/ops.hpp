#pragma once

#include <cstdint>
#include <vector>

#include "selar/tape.hpp"

namespace selar {

// Composites built from tape primitives. Everything here stays differentiable
// twice; stabilization shifts (row maxima) enter as detached constants.

// x {n,d} + row-broadcast b {1,d}
Var add_rowvec(Var x, Var b);
// x @ w + b
Var linear(Var x, Var w, Var b);
// per-row sum of a matrix -> vector {n}
Var row_sums(Var x);
// <z[u], z[v]> for each pair -> {n_pairs}
Var pair_scores(Var z, IndexPtr us, IndexPtr vs);

// Probabilities are clamped to [eps, 1-eps] before the logs.
constexpr double kProbEps = 1e-7;

// elementwise -[y log p + (1-y) log(1-p)]; probs/targets {n}
Var binary_cross_entropy(Var probs, Var targets);
// -log softmax(logits)[i, class_i]; logits {n,C} -> {n}
Var softmax_cross_entropy(Var logits, const std::vector<int32_t>& classes);
// row-wise softmax {n,C}
Var softmax_rows(Var logits);
// softmax over each row's neighborhood; scores indexed by pattern entries
Var neighbor_softmax(const SparsePtr& s, Var scores);

// Plain-value twins used on evaluation paths; they apply the same clamping
// so tape and plain results agree exactly.
double bce_value(double prob, double y);
double ce_value(const double* logits_row, int64_t n_classes, int32_t cls);

}  // namespace selar
