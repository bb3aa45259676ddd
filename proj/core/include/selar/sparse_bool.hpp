#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace selar {

// Boolean sparse matrix in CSR form. Entries are sorted (row, col) with no
// duplicates, which makes operator== a canonical set comparison.
class SparseBool {
 public:
  SparseBool() = default;
  SparseBool(int64_t rows, int64_t cols,
             std::vector<std::pair<int64_t, int64_t>> entries);

  static SparseBool identity(int64_t n);

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  int64_t nnz() const { return static_cast<int64_t>(col_idx_.size()); }

  std::span<const int64_t> row_ptr() const { return row_ptr_; }
  std::span<const int64_t> col_idx() const { return col_idx_; }

  bool has(int64_t r, int64_t c) const;
  int64_t row_degree(int64_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  std::vector<std::pair<int64_t, int64_t>> entries() const;

  SparseBool transposed() const;
  // Boolean matrix product: result has (u,v) iff some w links u->w->v.
  SparseBool multiply(const SparseBool& other) const;
  SparseBool union_with(const SparseBool& other) const;
  SparseBool with_self_loops() const;

  bool operator==(const SparseBool& o) const = default;

 private:
  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<int64_t> row_ptr_ = {0};
  std::vector<int64_t> col_idx_;
};

}  // namespace selar
