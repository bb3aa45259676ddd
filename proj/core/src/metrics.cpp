#include "selar/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "selar/error.hpp"

namespace selar {

double auc_score(std::span<const double> scores, std::span<const int8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error::shape("auc: scores and labels differ in length");
  }
  if (scores.empty()) throw Error::data("auc: empty input");

  int64_t n_pos = 0;
  for (int8_t y : labels) {
    if (y != 0 && y != 1) throw Error::data("auc: labels must be 0 or 1");
    n_pos += y;
  }
  const int64_t n_neg = static_cast<int64_t>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error::data("auc: undefined with a single class present");
  }

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Average ranks across runs of tied scores, then sum positive ranks.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }

  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                       static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

F1Scores f1_scores(std::span<const int32_t> predicted, std::span<const int32_t> truth,
                   int32_t n_classes) {
  if (predicted.size() != truth.size()) {
    throw Error::shape("f1: predictions and truth differ in length");
  }
  if (predicted.empty()) throw Error::data("f1: empty input");
  if (n_classes < 1) throw Error::data("f1: need at least one class");

  std::vector<int64_t> tp(static_cast<size_t>(n_classes), 0);
  std::vector<int64_t> fp(static_cast<size_t>(n_classes), 0);
  std::vector<int64_t> fn(static_cast<size_t>(n_classes), 0);
  for (size_t i = 0; i < predicted.size(); ++i) {
    const int32_t p = predicted[i], t = truth[i];
    if (p < 0 || p >= n_classes || t < 0 || t >= n_classes) {
      throw Error::data("f1: class id out of range");
    }
    if (p == t) {
      ++tp[static_cast<size_t>(p)];
    } else {
      ++fp[static_cast<size_t>(p)];
      ++fn[static_cast<size_t>(t)];
    }
  }

  int64_t tp_all = 0, fp_all = 0, fn_all = 0;
  double macro = 0.0;
  for (int32_t c = 0; c < n_classes; ++c) {
    const int64_t tpc = tp[static_cast<size_t>(c)];
    const int64_t fpc = fp[static_cast<size_t>(c)];
    const int64_t fnc = fn[static_cast<size_t>(c)];
    tp_all += tpc;
    fp_all += fpc;
    fn_all += fnc;
    const int64_t denom = 2 * tpc + fpc + fnc;
    macro += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tpc) / static_cast<double>(denom);
  }

  F1Scores out;
  const int64_t micro_denom = 2 * tp_all + fp_all + fn_all;
  out.micro = micro_denom == 0
                  ? 0.0
                  : 2.0 * static_cast<double>(tp_all) / static_cast<double>(micro_denom);
  out.macro = macro / static_cast<double>(n_classes);
  return out;
}

}  // namespace selar
