#include "selar/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "selar/error.hpp"
#include "selar/rng.hpp"

namespace selar {

SplitIndices split_indices(int64_t n, std::span<const int32_t> labels,
                           const SplitSpec& spec) {
  if (n <= 0) throw Error::data("split: nothing to split");
  if (spec.train_frac < 0 || spec.val_frac < 0 || spec.test_frac < 0 ||
      std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9) {
    throw Error::config("split: fractions must be non-negative and sum to 1");
  }
  if (spec.stratified && !labels.empty() &&
      static_cast<int64_t>(labels.size()) != n) {
    throw Error::contract("split: label array length != item count");
  }

  auto rng = substream(spec.seed, "split");

  // Group indices; unstratified mode uses a single group.
  std::map<int32_t, std::vector<int64_t>> groups;
  if (spec.stratified && !labels.empty()) {
    for (int64_t i = 0; i < n; ++i) groups[labels[static_cast<size_t>(i)]].push_back(i);
  } else {
    auto& all = groups[0];
    all.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  }

  SplitIndices out;
  for (auto& [label, idx] : groups) {
    shuffle_pinned(idx, rng);
    const int64_t g = static_cast<int64_t>(idx.size());
    const int64_t n_train = static_cast<int64_t>(std::floor(spec.train_frac * static_cast<double>(g)));
    const int64_t n_val = static_cast<int64_t>(std::floor(spec.val_frac * static_cast<double>(g)));
    for (int64_t i = 0; i < g; ++i) {
      if (i < n_train) {
        out.train.push_back(idx[static_cast<size_t>(i)]);
      } else if (i < n_train + n_val) {
        out.val.push_back(idx[static_cast<size_t>(i)]);
      } else {
        out.test.push_back(idx[static_cast<size_t>(i)]);
      }
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());

  if (out.train.empty() || out.val.empty() || out.test.empty()) {
    throw Error::data("split: a part came out empty; adjust fractions or data size");
  }
  return out;
}

}  // namespace selar
