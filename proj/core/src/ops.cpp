#include "selar/ops.hpp"

#include <algorithm>
#include <cmath>

#include "selar/error.hpp"

namespace selar {

Var add_rowvec(Var x, Var b) {
  Tape& t = *x.tape;
  const int64_t n = x.value().rows();
  if (b.value().rank() != 2 || b.value().rows() != 1 ||
      b.value().cols() != x.value().cols()) {
    throw Error::shape("add_rowvec: bias must be a 1-row matrix matching x");
  }
  Var ones = t.constant(Tensor::ones({n, 1}));
  return t.add(x, t.matmul(ones, b));
}

Var linear(Var x, Var w, Var b) { return add_rowvec(x.tape->matmul(x, w), b); }

Var row_sums(Var x) {
  Tape& t = *x.tape;
  const int64_t n = x.value().rows();
  Var ones = t.constant(Tensor::ones({x.value().cols(), 1}));
  return t.reshape(t.matmul(x, ones), {n});
}

Var pair_scores(Var z, IndexPtr us, IndexPtr vs) {
  Tape& t = *z.tape;
  if (!us || !vs || us->size() != vs->size()) {
    throw Error::contract("pair_scores: index lists must match");
  }
  Var zu = t.gather_rows(z, std::move(us));
  Var zv = t.gather_rows(z, std::move(vs));
  return row_sums(t.mul(zu, zv));
}

Var binary_cross_entropy(Var probs, Var targets) {
  Tape& t = *probs.tape;
  if (!probs.value().same_shape(targets.value())) {
    throw Error::shape("binary_cross_entropy: probs and targets differ");
  }
  Var p = t.clamp(probs, kProbEps, 1.0 - kProbEps);
  Var one = t.constant(Tensor::ones_like(p.value()));
  Var pos = t.mul(targets, t.log(p));
  Var neg = t.mul(t.sub(one, targets), t.log(t.sub(one, p)));
  return t.scale(-1.0, t.add(pos, neg));
}

Var softmax_cross_entropy(Var logits, const std::vector<int32_t>& classes) {
  Tape& t = *logits.tape;
  const Tensor& lv = logits.value();
  if (lv.rank() != 2) throw Error::shape("softmax_cross_entropy: logits must be a matrix");
  const int64_t n = lv.rows(), c = lv.cols();
  if (static_cast<int64_t>(classes.size()) != n) {
    throw Error::shape("softmax_cross_entropy: one class per row required");
  }
  Tensor shift({n, c});
  Tensor onehot({n, c});
  for (int64_t i = 0; i < n; ++i) {
    if (classes[i] < 0 || classes[i] >= c) {
      throw Error::data("softmax_cross_entropy: class id out of range");
    }
    double m = lv.at(i, 0);
    for (int64_t j = 1; j < c; ++j) m = std::max(m, lv.at(i, j));
    for (int64_t j = 0; j < c; ++j) shift.at(i, j) = m;
    onehot.at(i, classes[i]) = 1.0;
  }
  Var sh = t.sub(logits, t.constant(std::move(shift)));
  Var e = t.exp(sh);
  Var ones_c = t.constant(Tensor::ones({c, 1}));
  Var lse = t.log(t.matmul(e, ones_c));                            // {n,1}
  Var picked = t.matmul(t.mul(sh, t.constant(std::move(onehot))), ones_c);
  return t.reshape(t.sub(lse, picked), {n});
}

Var softmax_rows(Var logits) {
  Tape& t = *logits.tape;
  const Tensor& lv = logits.value();
  if (lv.rank() != 2) throw Error::shape("softmax_rows: logits must be a matrix");
  const int64_t n = lv.rows(), c = lv.cols();
  Tensor shift({n, c});
  for (int64_t i = 0; i < n; ++i) {
    double m = lv.at(i, 0);
    for (int64_t j = 1; j < c; ++j) m = std::max(m, lv.at(i, j));
    for (int64_t j = 0; j < c; ++j) shift.at(i, j) = m;
  }
  Var e = t.exp(t.sub(logits, t.constant(std::move(shift))));
  Var denom = t.matmul(t.matmul(e, t.constant(Tensor::ones({c, 1}))),
                       t.constant(Tensor::ones({1, c})));
  return t.div(e, denom);
}

Var neighbor_softmax(const SparsePtr& s, Var scores) {
  Tape& t = *scores.tape;
  if (!s) throw Error::contract("neighbor_softmax: null pattern");
  const Tensor& sv = scores.value();
  if (sv.rank() != 1 || sv.numel() != s->nnz()) {
    throw Error::shape("neighbor_softmax: one score per pattern entry required");
  }
  Tensor rowmax({s->rows()});
  for (int64_t u = 0; u < s->rows(); ++u) {
    double m = 0.0;
    bool first = true;
    for (int64_t k = s->row_ptr()[u]; k < s->row_ptr()[u + 1]; ++k) {
      m = first ? sv.at(k) : std::max(m, sv.at(k));
      first = false;
    }
    rowmax.at(u) = m;
  }
  Var shifted = t.sub(scores, t.segment_gather(s, t.constant(std::move(rowmax))));
  Var e = t.exp(shifted);
  Var denom = t.segment_gather(s, t.segment_sum(s, e));
  return t.div(e, denom);
}

double bce_value(double prob, double y) {
  const double p = std::min(std::max(prob, kProbEps), 1.0 - kProbEps);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

double ce_value(const double* logits_row, int64_t n_classes, int32_t cls) {
  double m = logits_row[0];
  for (int64_t j = 1; j < n_classes; ++j) m = std::max(m, logits_row[j]);
  double s = 0;
  for (int64_t j = 0; j < n_classes; ++j) s += std::exp(logits_row[j] - m);
  return std::log(s) - (logits_row[cls] - m);
}

}  // namespace selar
