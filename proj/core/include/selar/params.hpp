#pragma once

#include <map>
#include <string>
#include <vector>

#include "selar/tape.hpp"
#include "selar/tensor.hpp"

namespace selar {

// Named parameter tensors, iterated in lexicographic name order so every
// derived sequence (binding, gradient collection, serialization) is
// deterministic.
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor>;

  void set(const std::string& name, Tensor t);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool has(const std::string& name) const { return items_.count(name) != 0; }
  size_t size() const { return items_.size(); }
  int64_t total_scalars() const;

  Map::const_iterator begin() const { return items_.begin(); }
  Map::const_iterator end() const { return items_.end(); }
  Map::iterator begin() { return items_.begin(); }
  Map::iterator end() { return items_.end(); }

  // Binary round-trip: magic, version, then name/shape/float64 payloads.
  void save(const std::string& path) const;
  static ParamStore load(const std::string& path);

  bool operator==(const ParamStore& o) const = default;

 private:
  Map items_;
};

using VarMap = std::map<std::string, Var>;

// Bind every tensor as a tape leaf.
VarMap bind_params(Tape& t, const ParamStore& store, bool requires_grad = true);

// Same order as the map; pairs with grads_in_order.
std::vector<Var> vars_in_order(const VarMap& m);

// d loss / d each param, keyed by name. Uses nested_gradient when nested.
std::map<std::string, Tensor> grads_by_name(Tape& t, Var loss, const VarMap& params,
                                            bool nested = false, bool retain = false);

// In-place x -= lr * g for every named gradient.
void sgd_step(ParamStore& store, const std::map<std::string, Tensor>& grads, double lr);

}  // namespace selar
