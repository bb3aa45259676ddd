#include "selar/labels.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "selar/error.hpp"

namespace selar {

int64_t PairLabelSet::count_pos() const {
  int64_t n = 0;
  for (const auto& p : pairs) n += (p.y != 0);
  return n;
}

int64_t PairLabelSet::count_neg() const { return size() - count_pos(); }

void PairLabelSet::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error::data("labels: cannot open " + path + " for writing");
  for (const auto& p : pairs) {
    os << task_id << ' ' << p.u << ' ' << p.v << ' ' << int(p.y) << '\n';
  }
  if (!os) throw Error::data("labels: write to " + path + " failed");
}

PairLabelSet PairLabelSet::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error::data("labels: cannot open " + path);
  PairLabelSet out;
  bool first = true;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int64_t task, u, v;
    int y;
    if (!(ls >> task >> u >> v >> y) || (y != 0 && y != 1)) {
      throw Error::data(path + ":" + std::to_string(lineno) + ": expected 'task u v y'");
    }
    if (first) {
      out.task_id = static_cast<int32_t>(task);
      first = false;
    } else if (task != out.task_id) {
      throw Error::data(path + ":" + std::to_string(lineno) + ": mixed task ids in one file");
    }
    out.pairs.push_back({u, v, static_cast<int8_t>(y)});
  }
  return out;
}

PairLabelSet build_pair_labels(const SparseBool& matrix, int64_t n_pos, int64_t n_neg,
                               uint64_t seed, int32_t task_id,
                               const NegativeSamplingOptions& opts) {
  if (n_pos < 0 || n_neg < 0) throw Error::contract("labels: negative sample count");

  std::vector<std::pair<int64_t, int64_t>> positives = matrix.entries();
  if (n_pos > static_cast<int64_t>(positives.size())) {
    throw Error::data("labels: requested " + std::to_string(n_pos) +
                      " positives but the relation has only " +
                      std::to_string(positives.size()) + " nonzeros");
  }

  // Negatives come from the explicit zero set over the candidate rectangle.
  std::vector<int64_t> rows = opts.candidate_rows;
  std::vector<int64_t> cols = opts.candidate_cols;
  if (rows.empty()) {
    rows.resize(static_cast<size_t>(matrix.rows()));
    for (int64_t i = 0; i < matrix.rows(); ++i) rows[static_cast<size_t>(i)] = i;
  }
  if (cols.empty()) {
    cols.resize(static_cast<size_t>(matrix.cols()));
    for (int64_t i = 0; i < matrix.cols(); ++i) cols[static_cast<size_t>(i)] = i;
  }
  for (int64_t r : rows) {
    if (r < 0 || r >= matrix.rows()) throw Error::contract("labels: candidate row out of range");
  }
  for (int64_t c : cols) {
    if (c < 0 || c >= matrix.cols()) throw Error::contract("labels: candidate col out of range");
  }

  std::vector<std::pair<int64_t, int64_t>> zeros;
  for (int64_t r : rows) {
    for (int64_t c : cols) {
      if (opts.exclude_self_pairs && r == c) continue;
      if (!matrix.has(r, c)) zeros.emplace_back(r, c);
    }
  }
  if (n_neg > static_cast<int64_t>(zeros.size())) {
    throw Error::data("labels: requested " + std::to_string(n_neg) +
                      " negatives but only " + std::to_string(zeros.size()) +
                      " zero pairs exist in the candidate set");
  }

  auto pos_rng = substream(seed, "labels.pos");
  auto neg_rng = substream(seed, "labels.neg");
  partial_shuffle(positives, static_cast<size_t>(n_pos), pos_rng);
  partial_shuffle(zeros, static_cast<size_t>(n_neg), neg_rng);

  PairLabelSet out;
  out.task_id = task_id;
  out.pairs.reserve(static_cast<size_t>(n_pos + n_neg));
  for (int64_t i = 0; i < n_pos; ++i) {
    out.pairs.push_back({positives[static_cast<size_t>(i)].first,
                         positives[static_cast<size_t>(i)].second, 1});
  }
  for (int64_t i = 0; i < n_neg; ++i) {
    out.pairs.push_back({zeros[static_cast<size_t>(i)].first,
                         zeros[static_cast<size_t>(i)].second, 0});
  }
  return out;
}

}  // namespace selar
