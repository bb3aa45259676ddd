#include "selar/sparse_bool.hpp"

#include <algorithm>

#include "selar/error.hpp"

namespace selar {

SparseBool::SparseBool(int64_t rows, int64_t cols,
                       std::vector<std::pair<int64_t, int64_t>> entries)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw Error::shape("sparse: negative dimension");
  for (auto [r, c] : entries) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw Error::shape("sparse: entry out of bounds");
    }
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  row_ptr_.assign(static_cast<size_t>(rows) + 1, 0);
  col_idx_.reserve(entries.size());
  for (auto [r, c] : entries) {
    ++row_ptr_[static_cast<size_t>(r) + 1];
    col_idx_.push_back(c);
  }
  for (size_t i = 1; i < row_ptr_.size(); ++i) row_ptr_[i] += row_ptr_[i - 1];
}

SparseBool SparseBool::identity(int64_t n) {
  std::vector<std::pair<int64_t, int64_t>> e;
  e.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) e.emplace_back(i, i);
  return SparseBool(n, n, std::move(e));
}

bool SparseBool::has(int64_t r, int64_t c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return false;
  auto begin = col_idx_.begin() + row_ptr_[r];
  auto end = col_idx_.begin() + row_ptr_[r + 1];
  return std::binary_search(begin, end, c);
}

std::vector<std::pair<int64_t, int64_t>> SparseBool::entries() const {
  std::vector<std::pair<int64_t, int64_t>> out;
  out.reserve(col_idx_.size());
  for (int64_t r = 0; r < rows_; ++r) {
    for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.emplace_back(r, col_idx_[k]);
    }
  }
  return out;
}

SparseBool SparseBool::transposed() const {
  auto e = entries();
  for (auto& [r, c] : e) std::swap(r, c);
  return SparseBool(cols_, rows_, std::move(e));
}

SparseBool SparseBool::multiply(const SparseBool& other) const {
  if (cols_ != other.rows_) {
    throw Error::shape("sparse multiply: inner dimensions disagree");
  }
  std::vector<std::pair<int64_t, int64_t>> out;
  std::vector<int64_t> mark(static_cast<size_t>(other.cols_), -1);
  for (int64_t r = 0; r < rows_; ++r) {
    for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      int64_t w = col_idx_[k];
      for (int64_t j = other.row_ptr_[w]; j < other.row_ptr_[w + 1]; ++j) {
        int64_t c = other.col_idx_[j];
        if (mark[static_cast<size_t>(c)] != r) {
          mark[static_cast<size_t>(c)] = r;
          out.emplace_back(r, c);
        }
      }
    }
  }
  return SparseBool(rows_, other.cols_, std::move(out));
}

SparseBool SparseBool::union_with(const SparseBool& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error::shape("sparse union: shapes disagree");
  }
  auto e = entries();
  auto f = other.entries();
  e.insert(e.end(), f.begin(), f.end());
  return SparseBool(rows_, cols_, std::move(e));
}

SparseBool SparseBool::with_self_loops() const {
  if (rows_ != cols_) throw Error::shape("self loops need a square matrix");
  auto e = entries();
  for (int64_t i = 0; i < rows_; ++i) e.emplace_back(i, i);
  return SparseBool(rows_, cols_, std::move(e));
}

}  // namespace selar
