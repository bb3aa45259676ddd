#pragma once

#include <random>
#include <string>
#include <vector>

#include "selar/ops.hpp"
#include "selar/params.hpp"

namespace selar {

enum class HeadKind { Pair, NodeClass };

// One affine transform per task on top of the shared node representations.
// Pair heads score (u,v) by sigmoid of the transformed dot product; class
// heads emit logits. Task 0 is the primary task by convention.
class TaskHeads {
 public:
  explicit TaskHeads(std::string prefix = "head.") : prefix_(std::move(prefix)) {}

  int32_t add_pair_head(int64_t in_dim, int64_t out_dim);
  int32_t add_class_head(int64_t in_dim, int64_t n_classes);

  int32_t count() const { return static_cast<int32_t>(kinds_.size()); }
  HeadKind kind(int32_t task) const;
  int64_t out_dim(int32_t task) const;

  void init_params(ParamStore& store, std::mt19937_64& rng) const;

  // z {|V|, d} -> transformed rows for the task.
  Var transform(Tape& t, const VarMap& params, int32_t task, Var z) const;
  // sigmoid(<phi(z_u), phi(z_v)>) per pair -> {n}
  Var pair_probs(Tape& t, const VarMap& params, int32_t task, Var z,
                 IndexPtr us, IndexPtr vs) const;
  // logits {n, C} for the listed nodes
  Var class_logits(Tape& t, const VarMap& params, int32_t task, Var z,
                   const std::vector<int64_t>& nodes) const;

  // Plain-value twins used on evaluation paths.
  double predict_pair(const Tensor& z, int64_t u, int64_t v,
                      const ParamStore& params, int32_t task) const;
  std::vector<double> predict_node_class(const Tensor& z, int64_t v,
                                         const ParamStore& params, int32_t task) const;

 private:
  std::string pname(int32_t task, const char* what) const;
  void check_task(int32_t task, HeadKind expected, const char* who) const;
  std::vector<double> transform_row(const Tensor& z, int64_t row,
                                    const ParamStore& params, int32_t task) const;

  std::string prefix_;
  std::vector<HeadKind> kinds_;
  std::vector<int64_t> in_dims_;
  std::vector<int64_t> out_dims_;
};

}  // namespace selar
