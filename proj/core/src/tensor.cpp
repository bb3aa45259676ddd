#include "selar/tensor.hpp"

#include <sstream>

namespace selar {

std::string shape_str(std::span<const int64_t> shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::string Tensor::shape_str() const { return selar::shape_str(shape_); }

}  // namespace selar
