#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "selar/sparse_bool.hpp"
#include "selar/tensor.hpp"

namespace selar {

class Tape;

// Handle into a tape. Cheap to copy; owns nothing.
struct Var {
  Tape* tape = nullptr;
  int32_t id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& value() const;
  const std::vector<int64_t>& shape() const;
  double item() const { return value().item(); }
};

using SparsePtr = std::shared_ptr<const SparseBool>;
using IndexPtr = std::shared_ptr<const std::vector<int64_t>>;

enum class Op : uint8_t {
  Leaf,
  Add, Sub, Mul, Div, Scale,
  Matmul, Transpose,
  Sigmoid, Relu, LeakyRelu, Exp, Log, Clamp,
  Sum, Mean, BroadcastScalar, Reshape,
  ConcatRows, ConcatCols, SliceRows, SliceCols,
  GatherRows, ScatterAddRows,
  Spmm, SpmmT, EdgeDot,
  SegmentSum, SegmentGather, SegmentSumCols, SegmentGatherCols,
};

const char* op_name(Op op);

struct GradOptions {
  bool retain_graph = false;
};

// Reverse-mode tape over Tensor values. The backward pass does not write
// gradient buffers directly: it emits ordinary tape nodes that compute the
// gradients. Gradients are therefore Vars like any other, and a retained
// backward can be differentiated once more, which is exactly the depth the
// bilevel update needs. Every op's derivative stays inside the op set above,
// so the emitted graph is closed under one further differentiation
// (activation masks and softmax shifts become constants, correct almost
// everywhere).
//
// gradient(..., retain_graph=false) truncates the tape back to its
// pre-backward size and returns the gradients as fresh constant leaves;
// retain_graph=true keeps the emitted nodes alive and arms nested use.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // --- leaves ---
  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }
  Var constant(double v) { return leaf(Tensor::scalar(v), false); }

  // --- elementwise ---
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var scale(double c, Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var leaky_relu(Var a, double slope);
  Var exp(Var a);
  Var log(Var a);
  Var clamp(Var a, double lo, double hi);

  // --- linear algebra ---
  Var matmul(Var a, Var b);
  Var transpose(Var a);

  // --- reductions / shape ---
  Var sum(Var a);
  Var mean(Var a);
  Var broadcast_scalar(Var a, std::vector<int64_t> shape);
  Var reshape(Var a, std::vector<int64_t> shape);
  Var concat_rows(Var a, Var b);
  Var concat_cols(Var a, Var b);
  Var slice_rows(Var a, int64_t r0, int64_t r1);
  Var slice_cols(Var a, int64_t c0, int64_t c1);
  Var gather_rows(Var a, IndexPtr indices);
  Var scatter_add_rows(Var a, IndexPtr indices, int64_t out_rows);

  // --- sparse propagation ---
  // spmm: out[u,:] = sum over entries (u,v) of vals[k] * x[v,:]
  Var spmm(SparsePtr s, Var vals, Var x);
  // spmm_t: out[v,:] = sum over entries (u,v) of vals[k] * g[u,:]
  Var spmm_t(SparsePtr s, Var vals, Var g);
  // edge_dot: out[k] = <a[u,:], b[v,:]> for entry k = (u,v)
  Var edge_dot(SparsePtr s, Var a, Var b);
  // per-row reduction of edge values and its broadcast adjoint
  Var segment_sum(SparsePtr s, Var vals);
  Var segment_gather(SparsePtr s, Var per_row);
  // column-side pair
  Var segment_sum_cols(SparsePtr s, Var vals);
  Var segment_gather_cols(SparsePtr s, Var per_col);

  // --- differentiation ---
  // d output / d params. Output must be scalar. Params the output does not
  // reach get zero gradients. With retain_graph the returned Vars stay
  // differentiable; without it they are constants and the tape is rewound.
  std::vector<Var> gradient(Var output, std::span<const Var> params,
                            GradOptions opt = {});

  // Second differentiation through a previously retained backward. Refuses
  // to run if no retained backward exists on this tape, because the result
  // would silently be zero.
  std::vector<Var> nested_gradient(Var output, std::span<const Var> params,
                                   GradOptions opt = {});

  bool has_retained_backward() const { return has_retained_backward_; }

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Op op = Op::Leaf;
    std::array<int32_t, 2> parent{-1, -1};
    int n_parents = 0;
    bool requires_grad = false;
    double c0 = 0.0, c1 = 0.0;  // scale factor, slope, clamp bounds
    int64_t i0 = 0, i1 = 0;     // slice bounds, scatter row count
    SparsePtr pattern;
    IndexPtr indices;
    std::vector<int64_t> aux_shape;  // broadcast/reshape target
    Tensor value;
  };

  Var push(Node n);
  Var unary(Op op, Var a, double c0 = 0.0, double c1 = 0.0);
  Var binary(Op op, Var a, Var b);
  const Node& node(Var v) const;
  void check_var(Var v, const char* who) const;
  static Tensor eval(const Node& n, const Tape& t);

  std::vector<Node> nodes_;
  bool has_retained_backward_ = false;
};

inline const Tensor& Var::value() const { return tape->value(*this); }
inline const std::vector<int64_t>& Var::shape() const { return value().shape(); }

// Operator sugar; all nodes land on the operands' tape.
inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->div(a, b); }
inline Var operator*(double c, Var a) { return a.tape->scale(c, a); }
inline Var operator-(Var a) { return a.tape->scale(-1.0, a); }

inline Var matmul(Var a, Var b) { return a.tape->matmul(a, b); }
inline Var transpose(Var a) { return a.tape->transpose(a); }
inline Var sigmoid(Var a) { return a.tape->sigmoid(a); }
inline Var relu(Var a) { return a.tape->relu(a); }
inline Var exp(Var a) { return a.tape->exp(a); }
inline Var log(Var a) { return a.tape->log(a); }
inline Var sum(Var a) { return a.tape->sum(a); }
inline Var mean(Var a) { return a.tape->mean(a); }

}  // namespace selar
