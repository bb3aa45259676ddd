#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "selar/error.hpp"

namespace selar {

// Dense row-major float64 tensor. Rank 0 is a scalar, rank 1 a vector,
// rank 2 a matrix; nothing here needs more.
class Tensor {
 public:
  Tensor() : shape_{}, data_(1, 0.0) {}
  explicit Tensor(std::vector<int64_t> shape)
      : shape_(std::move(shape)), data_(checked_numel(shape_), 0.0) {}
  Tensor(std::vector<int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != checked_numel(shape_)) {
      throw Error::shape("tensor: data size does not match shape");
    }
  }

  static Tensor scalar(double v) {
    Tensor t;
    t.data_[0] = v;
    return t;
  }
  static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int64_t> shape, double v) {
    Tensor t(std::move(shape));
    for (double& x : t.data_) x = v;
    return t;
  }
  static Tensor ones(std::vector<int64_t> shape) { return full(std::move(shape), 1.0); }
  static Tensor zeros_like(const Tensor& o) { return Tensor(o.shape_); }
  static Tensor ones_like(const Tensor& o) { return full(o.shape_, 1.0); }
  static Tensor row(std::initializer_list<double> vals) {
    return Tensor({1, static_cast<int64_t>(vals.size())}, std::vector<double>(vals));
  }

  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  int64_t rows() const { return dim(0); }
  int64_t cols() const { return dim(1); }
  int64_t dim(int i) const {
    if (i >= rank()) throw Error::shape("tensor: dim index out of rank");
    return shape_[i];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  double& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
  double at(int64_t i) const { return data_[static_cast<size_t>(i)]; }
  double& at(int64_t i, int64_t j) { return data_[static_cast<size_t>(i * shape_[1] + j)]; }
  double at(int64_t i, int64_t j) const { return data_[static_cast<size_t>(i * shape_[1] + j)]; }

  double item() const {
    if (numel() != 1) throw Error::shape("tensor: item() on non-scalar");
    return data_[0];
  }

  bool all_finite() const {
    for (double x : data_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  Tensor reshaped(std::vector<int64_t> shape) const {
    Tensor t(std::move(shape), data_);
    return t;
  }

  bool operator==(const Tensor& o) const = default;

  std::string shape_str() const;

 private:
  static int64_t checked_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
      if (d < 0) throw Error::shape("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  std::vector<int64_t> shape_;
  std::vector<double> data_;
};

std::string shape_str(std::span<const int64_t> shape);

}  // namespace selar
