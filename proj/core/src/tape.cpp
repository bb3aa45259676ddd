#include "selar/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selar/error.hpp"

namespace selar {

const char* op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Scale: return "scale";
    case Op::Matmul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::Sigmoid: return "sigmoid";
    case Op::Relu: return "relu";
    case Op::LeakyRelu: return "leaky_relu";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Clamp: return "clamp";
    case Op::Sum: return "sum";
    case Op::Mean: return "mean";
    case Op::BroadcastScalar: return "broadcast_scalar";
    case Op::Reshape: return "reshape";
    case Op::ConcatRows: return "concat_rows";
    case Op::ConcatCols: return "concat_cols";
    case Op::SliceRows: return "slice_rows";
    case Op::SliceCols: return "slice_cols";
    case Op::GatherRows: return "gather_rows";
    case Op::ScatterAddRows: return "scatter_add_rows";
    case Op::Spmm: return "spmm";
    case Op::SpmmT: return "spmm_t";
    case Op::EdgeDot: return "edge_dot";
    case Op::SegmentSum: return "segment_sum";
    case Op::SegmentGather: return "segment_gather";
    case Op::SegmentSumCols: return "segment_sum_cols";
    case Op::SegmentGatherCols: return "segment_gather_cols";
  }
  return "?";
}

void Tape::check_var(Var v, const char* who) const {
  if (v.tape != this) {
    throw Error::contract(std::string(who) + ": var belongs to another tape");
  }
  if (v.id < 0 || static_cast<size_t>(v.id) >= nodes_.size()) {
    throw Error::contract(std::string(who) + ": dangling var");
  }
}

const Tape::Node& Tape::node(Var v) const { return nodes_[static_cast<size_t>(v.id)]; }

const Tensor& Tape::value(Var v) const {
  check_var(v, "value");
  return node(v).value;
}

bool Tape::requires_grad(Var v) const {
  check_var(v, "requires_grad");
  return node(v).requires_grad;
}

Var Tape::push(Node n) {
  if (n.op != Op::Leaf) {
    bool rg = false;
    for (int i = 0; i < n.n_parents; ++i) {
      rg = rg || nodes_[static_cast<size_t>(n.parent[i])].requires_grad;
    }
    n.requires_grad = rg;
    n.value = eval(n, *this);
  }
  if (!n.value.all_finite()) {
    throw Error::numeric(std::string("non-finite value produced by ") + op_name(n.op));
  }
  if (nodes_.size() >= static_cast<size_t>(std::numeric_limits<int32_t>::max())) {
    throw Error::contract("tape node limit exceeded");
  }
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::unary(Op op, Var a, double c0, double c1) {
  check_var(a, op_name(op));
  Node n;
  n.op = op;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.c0 = c0;
  n.c1 = c1;
  return push(std::move(n));
}

Var Tape::binary(Op op, Var a, Var b) {
  check_var(a, op_name(op));
  check_var(b, op_name(op));
  Node n;
  n.op = op;
  n.parent = {a.id, b.id};
  n.n_parents = 2;
  return push(std::move(n));
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.op = Op::Leaf;
  n.requires_grad = requires_grad;
  n.value = std::move(value);
  return push(std::move(n));
}

static void need_same_shape(Var a, Var b, const char* who) {
  if (!a.value().same_shape(b.value())) {
    throw Error::shape(std::string(who) + ": shapes " + a.value().shape_str() +
                       " and " + b.value().shape_str() + " differ");
  }
}

static void need_rank2(Var a, const char* who) {
  if (a.value().rank() != 2) {
    throw Error::shape(std::string(who) + ": expected a matrix, got " +
                       a.value().shape_str());
  }
}

Var Tape::add(Var a, Var b) { need_same_shape(a, b, "add"); return binary(Op::Add, a, b); }
Var Tape::sub(Var a, Var b) { need_same_shape(a, b, "sub"); return binary(Op::Sub, a, b); }
Var Tape::mul(Var a, Var b) { need_same_shape(a, b, "mul"); return binary(Op::Mul, a, b); }
Var Tape::div(Var a, Var b) { need_same_shape(a, b, "div"); return binary(Op::Div, a, b); }

Var Tape::scale(double c, Var a) { return unary(Op::Scale, a, c); }
Var Tape::sigmoid(Var a) { return unary(Op::Sigmoid, a); }
Var Tape::relu(Var a) { return unary(Op::Relu, a); }

Var Tape::leaky_relu(Var a, double slope) {
  if (slope < 0) throw Error::contract("leaky_relu: negative slope");
  return unary(Op::LeakyRelu, a, slope);
}

Var Tape::exp(Var a) { return unary(Op::Exp, a); }
Var Tape::log(Var a) { return unary(Op::Log, a); }

Var Tape::clamp(Var a, double lo, double hi) {
  if (!(lo <= hi)) throw Error::contract("clamp: lo > hi");
  return unary(Op::Clamp, a, lo, hi);
}

Var Tape::matmul(Var a, Var b) {
  need_rank2(a, "matmul");
  need_rank2(b, "matmul");
  if (a.value().cols() != b.value().rows()) {
    throw Error::shape("matmul: inner dimensions " + a.value().shape_str() +
                       " x " + b.value().shape_str());
  }
  return binary(Op::Matmul, a, b);
}

Var Tape::transpose(Var a) {
  need_rank2(a, "transpose");
  return unary(Op::Transpose, a);
}

Var Tape::sum(Var a) { return unary(Op::Sum, a); }

Var Tape::mean(Var a) {
  if (a.value().numel() == 0) throw Error::shape("mean: empty tensor");
  return unary(Op::Mean, a);
}

Var Tape::broadcast_scalar(Var a, std::vector<int64_t> shape) {
  if (a.value().numel() != 1) throw Error::shape("broadcast_scalar: source not scalar");
  check_var(a, "broadcast_scalar");
  Node n;
  n.op = Op::BroadcastScalar;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.aux_shape = std::move(shape);
  return push(std::move(n));
}

Var Tape::reshape(Var a, std::vector<int64_t> shape) {
  check_var(a, "reshape");
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  if (n != a.value().numel()) throw Error::shape("reshape: element count changes");
  Node node;
  node.op = Op::Reshape;
  node.parent[0] = a.id;
  node.n_parents = 1;
  node.aux_shape = std::move(shape);
  return push(std::move(node));
}

Var Tape::concat_rows(Var a, Var b) {
  need_rank2(a, "concat_rows");
  need_rank2(b, "concat_rows");
  if (a.value().cols() != b.value().cols()) {
    throw Error::shape("concat_rows: column counts differ");
  }
  return binary(Op::ConcatRows, a, b);
}

Var Tape::concat_cols(Var a, Var b) {
  need_rank2(a, "concat_cols");
  need_rank2(b, "concat_cols");
  if (a.value().rows() != b.value().rows()) {
    throw Error::shape("concat_cols: row counts differ");
  }
  return binary(Op::ConcatCols, a, b);
}

Var Tape::slice_rows(Var a, int64_t r0, int64_t r1) {
  need_rank2(a, "slice_rows");
  if (r0 < 0 || r1 < r0 || r1 > a.value().rows()) {
    throw Error::shape("slice_rows: bounds out of range");
  }
  check_var(a, "slice_rows");
  Node n;
  n.op = Op::SliceRows;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.i0 = r0;
  n.i1 = r1;
  return push(std::move(n));
}

Var Tape::slice_cols(Var a, int64_t c0, int64_t c1) {
  need_rank2(a, "slice_cols");
  if (c0 < 0 || c1 < c0 || c1 > a.value().cols()) {
    throw Error::shape("slice_cols: bounds out of range");
  }
  check_var(a, "slice_cols");
  Node n;
  n.op = Op::SliceCols;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.i0 = c0;
  n.i1 = c1;
  return push(std::move(n));
}

Var Tape::gather_rows(Var a, IndexPtr indices) {
  need_rank2(a, "gather_rows");
  if (!indices) throw Error::contract("gather_rows: null index list");
  for (int64_t i : *indices) {
    if (i < 0 || i >= a.value().rows()) throw Error::shape("gather_rows: index out of range");
  }
  check_var(a, "gather_rows");
  Node n;
  n.op = Op::GatherRows;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.indices = std::move(indices);
  return push(std::move(n));
}

Var Tape::scatter_add_rows(Var a, IndexPtr indices, int64_t out_rows) {
  need_rank2(a, "scatter_add_rows");
  if (!indices) throw Error::contract("scatter_add_rows: null index list");
  if (static_cast<int64_t>(indices->size()) != a.value().rows()) {
    throw Error::shape("scatter_add_rows: one index per input row required");
  }
  for (int64_t i : *indices) {
    if (i < 0 || i >= out_rows) throw Error::shape("scatter_add_rows: index out of range");
  }
  check_var(a, "scatter_add_rows");
  Node n;
  n.op = Op::ScatterAddRows;
  n.parent[0] = a.id;
  n.n_parents = 1;
  n.indices = std::move(indices);
  n.i0 = out_rows;
  return push(std::move(n));
}

static void need_pattern(const SparsePtr& s, const char* who) {
  if (!s) throw Error::contract(std::string(who) + ": null sparsity pattern");
}

static void need_vals(const SparsePtr& s, Var vals, const char* who) {
  const Tensor& v = vals.value();
  if (v.rank() != 1 || v.numel() != s->nnz()) {
    throw Error::shape(std::string(who) + ": edge values must be a vector of length nnz");
  }
}

Var Tape::spmm(SparsePtr s, Var vals, Var x) {
  need_pattern(s, "spmm");
  need_vals(s, vals, "spmm");
  need_rank2(x, "spmm");
  if (x.value().rows() != s->cols()) {
    throw Error::shape("spmm: dense rows must match pattern columns");
  }
  check_var(vals, "spmm");
  check_var(x, "spmm");
  Node n;
  n.op = Op::Spmm;
  n.parent = {vals.id, x.id};
  n.n_parents = 2;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::spmm_t(SparsePtr s, Var vals, Var g) {
  need_pattern(s, "spmm_t");
  need_vals(s, vals, "spmm_t");
  need_rank2(g, "spmm_t");
  if (g.value().rows() != s->rows()) {
    throw Error::shape("spmm_t: dense rows must match pattern rows");
  }
  check_var(vals, "spmm_t");
  check_var(g, "spmm_t");
  Node n;
  n.op = Op::SpmmT;
  n.parent = {vals.id, g.id};
  n.n_parents = 2;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::edge_dot(SparsePtr s, Var a, Var b) {
  need_pattern(s, "edge_dot");
  need_rank2(a, "edge_dot");
  need_rank2(b, "edge_dot");
  if (a.value().rows() != s->rows() || b.value().rows() != s->cols() ||
      a.value().cols() != b.value().cols()) {
    throw Error::shape("edge_dot: operand shapes do not match pattern");
  }
  check_var(a, "edge_dot");
  check_var(b, "edge_dot");
  Node n;
  n.op = Op::EdgeDot;
  n.parent = {a.id, b.id};
  n.n_parents = 2;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::segment_sum(SparsePtr s, Var vals) {
  need_pattern(s, "segment_sum");
  need_vals(s, vals, "segment_sum");
  check_var(vals, "segment_sum");
  Node n;
  n.op = Op::SegmentSum;
  n.parent[0] = vals.id;
  n.n_parents = 1;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::segment_gather(SparsePtr s, Var per_row) {
  need_pattern(s, "segment_gather");
  const Tensor& v = per_row.value();
  if (v.rank() != 1 || v.numel() != s->rows()) {
    throw Error::shape("segment_gather: expected one value per pattern row");
  }
  check_var(per_row, "segment_gather");
  Node n;
  n.op = Op::SegmentGather;
  n.parent[0] = per_row.id;
  n.n_parents = 1;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::segment_sum_cols(SparsePtr s, Var vals) {
  need_pattern(s, "segment_sum_cols");
  need_vals(s, vals, "segment_sum_cols");
  check_var(vals, "segment_sum_cols");
  Node n;
  n.op = Op::SegmentSumCols;
  n.parent[0] = vals.id;
  n.n_parents = 1;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Var Tape::segment_gather_cols(SparsePtr s, Var per_col) {
  need_pattern(s, "segment_gather_cols");
  const Tensor& v = per_col.value();
  if (v.rank() != 1 || v.numel() != s->cols()) {
    throw Error::shape("segment_gather_cols: expected one value per pattern column");
  }
  check_var(per_col, "segment_gather_cols");
  Node n;
  n.op = Op::SegmentGatherCols;
  n.parent[0] = per_col.id;
  n.n_parents = 1;
  n.pattern = std::move(s);
  return push(std::move(n));
}

Tensor Tape::eval(const Node& n, const Tape& t) {
  auto P = [&](int i) -> const Tensor& {
    return t.nodes_[static_cast<size_t>(n.parent[i])].value;
  };
  switch (n.op) {
    case Op::Leaf:
      return n.value;
    case Op::Add: {
      Tensor out = P(0);
      const double* b = P(1).data();
      double* o = out.data();
      for (int64_t i = 0; i < out.numel(); ++i) o[i] += b[i];
      return out;
    }
    case Op::Sub: {
      Tensor out = P(0);
      const double* b = P(1).data();
      double* o = out.data();
      for (int64_t i = 0; i < out.numel(); ++i) o[i] -= b[i];
      return out;
    }
    case Op::Mul: {
      Tensor out = P(0);
      const double* b = P(1).data();
      double* o = out.data();
      for (int64_t i = 0; i < out.numel(); ++i) o[i] *= b[i];
      return out;
    }
    case Op::Div: {
      Tensor out = P(0);
      const double* b = P(1).data();
      double* o = out.data();
      for (int64_t i = 0; i < out.numel(); ++i) o[i] /= b[i];
      return out;
    }
    case Op::Scale: {
      Tensor out = P(0);
      for (double& x : out.values()) x *= n.c0;
      return out;
    }
    case Op::Matmul: {
      const Tensor& a = P(0);
      const Tensor& b = P(1);
      const int64_t m = a.rows(), k = a.cols(), nn = b.cols();
      Tensor out({m, nn});
      for (int64_t i = 0; i < m; ++i) {
        for (int64_t kk = 0; kk < k; ++kk) {
          const double aik = a.at(i, kk);
          if (aik == 0.0) continue;
          for (int64_t j = 0; j < nn; ++j) out.at(i, j) += aik * b.at(kk, j);
        }
      }
      return out;
    }
    case Op::Transpose: {
      const Tensor& a = P(0);
      Tensor out({a.cols(), a.rows()});
      for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
      }
      return out;
    }
    case Op::Sigmoid: {
      Tensor out = P(0);
      for (double& x : out.values()) {
        if (x >= 0) {
          x = 1.0 / (1.0 + std::exp(-x));
        } else {
          double e = std::exp(x);
          x = e / (1.0 + e);
        }
      }
      return out;
    }
    case Op::Relu: {
      Tensor out = P(0);
      for (double& x : out.values()) x = x > 0 ? x : 0.0;
      return out;
    }
    case Op::LeakyRelu: {
      Tensor out = P(0);
      for (double& x : out.values()) x = x > 0 ? x : n.c0 * x;
      return out;
    }
    case Op::Exp: {
      Tensor out = P(0);
      for (double& x : out.values()) x = std::exp(x);
      return out;
    }
    case Op::Log: {
      Tensor out = P(0);
      for (double& x : out.values()) x = std::log(x);
      return out;
    }
    case Op::Clamp: {
      Tensor out = P(0);
      for (double& x : out.values()) x = std::min(std::max(x, n.c0), n.c1);
      return out;
    }
    case Op::Sum: {
      double s = 0;
      for (double x : P(0).values()) s += x;
      return Tensor::scalar(s);
    }
    case Op::Mean: {
      double s = 0;
      for (double x : P(0).values()) s += x;
      return Tensor::scalar(s / static_cast<double>(P(0).numel()));
    }
    case Op::BroadcastScalar:
      return Tensor::full(n.aux_shape, P(0).item());
    case Op::Reshape:
      return P(0).reshaped(n.aux_shape);
    case Op::ConcatRows: {
      const Tensor& a = P(0);
      const Tensor& b = P(1);
      Tensor out({a.rows() + b.rows(), a.cols()});
      std::copy(a.data(), a.data() + a.numel(), out.data());
      std::copy(b.data(), b.data() + b.numel(), out.data() + a.numel());
      return out;
    }
    case Op::ConcatCols: {
      const Tensor& a = P(0);
      const Tensor& b = P(1);
      Tensor out({a.rows(), a.cols() + b.cols()});
      for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
        for (int64_t j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
      }
      return out;
    }
    case Op::SliceRows: {
      const Tensor& a = P(0);
      Tensor out({n.i1 - n.i0, a.cols()});
      std::copy(a.data() + n.i0 * a.cols(), a.data() + n.i1 * a.cols(), out.data());
      return out;
    }
    case Op::SliceCols: {
      const Tensor& a = P(0);
      Tensor out({a.rows(), n.i1 - n.i0});
      for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = n.i0; j < n.i1; ++j) out.at(i, j - n.i0) = a.at(i, j);
      }
      return out;
    }
    case Op::GatherRows: {
      const Tensor& a = P(0);
      const auto& idx = *n.indices;
      Tensor out({static_cast<int64_t>(idx.size()), a.cols()});
      for (size_t i = 0; i < idx.size(); ++i) {
        std::copy(a.data() + idx[i] * a.cols(), a.data() + (idx[i] + 1) * a.cols(),
                  out.data() + static_cast<int64_t>(i) * a.cols());
      }
      return out;
    }
    case Op::ScatterAddRows: {
      const Tensor& a = P(0);
      const auto& idx = *n.indices;
      Tensor out({n.i0, a.cols()});
      for (size_t i = 0; i < idx.size(); ++i) {
        for (int64_t j = 0; j < a.cols(); ++j) {
          out.at(idx[i], j) += a.at(static_cast<int64_t>(i), j);
        }
      }
      return out;
    }
    case Op::Spmm: {
      const Tensor& vals = P(0);
      const Tensor& x = P(1);
      const SparseBool& s = *n.pattern;
      Tensor out({s.rows(), x.cols()});
      for (int64_t u = 0; u < s.rows(); ++u) {
        for (int64_t k = s.row_ptr()[u]; k < s.row_ptr()[u + 1]; ++k) {
          const int64_t v = s.col_idx()[k];
          const double w = vals.at(k);
          for (int64_t j = 0; j < x.cols(); ++j) out.at(u, j) += w * x.at(v, j);
        }
      }
      return out;
    }
    case Op::SpmmT: {
      const Tensor& vals = P(0);
      const Tensor& g = P(1);
      const SparseBool& s = *n.pattern;
      Tensor out({s.cols(), g.cols()});
      for (int64_t u = 0; u < s.rows(); ++u) {
        for (int64_t k = s.row_ptr()[u]; k < s.row_ptr()[u + 1]; ++k) {
          const int64_t v = s.col_idx()[k];
          const double w = vals.at(k);
          for (int64_t j = 0; j < g.cols(); ++j) out.at(v, j) += w * g.at(u, j);
        }
      }
      return out;
    }
    case Op::EdgeDot: {
      const Tensor& a = P(0);
      const Tensor& b = P(1);
      const SparseBool& s = *n.pattern;
      Tensor out({s.nnz()});
      for (int64_t u = 0; u < s.rows(); ++u) {
        for (int64_t k = s.row_ptr()[u]; k < s.row_ptr()[u + 1]; ++k) {
          const int64_t v = s.col_idx()[k];
          double d = 0;
          for (int64_t j = 0; j < a.cols(); ++j) d += a.at(u, j) * b.at(v, j);
          out.at(k) = d;
        }
      }
      return out;
    }
    case Op::SegmentSum: {
      const Tensor& vals = P(0);
      const SparseBool& s = *n.pattern;
      Tensor out({s.rows()});
      for (int64_t u = 0; u < s.rows(); ++u) {
        double acc = 0;
        for (int64_t k = s.row_ptr()[u]; k < s.row_ptr()[u + 1]; ++k) acc += vals.at(k);
        out.at(u) = acc;
      }
      return out;
    }
    case Op::SegmentGather: {
      const Tensor& r = P(0);
      const SparseBool& s = *n.pattern;
      Tensor out({s.nnz()});
      for (int64_t u = 0; u < s.rows(); ++u) {
        for (int64_t k = s.row_ptr()[u]; k < s.row_ptr()[u + 1]; ++k) out.at(k) = r.at(u);
      }
      return out;
    }
    case Op::SegmentSumCols: {
      const Tensor& vals = P(0);
      const SparseBool& s = *n.pattern;
      Tensor out({s.cols()});
      for (int64_t k = 0; k < s.nnz(); ++k) out.at(s.col_idx()[k]) += vals.at(k);
      return out;
    }
    case Op::SegmentGatherCols: {
      const Tensor& c = P(0);
      const SparseBool& s = *n.pattern;
      Tensor out({s.nnz()});
      for (int64_t k = 0; k < s.nnz(); ++k) out.at(k) = c.at(s.col_idx()[k]);
      return out;
    }
  }
  throw Error::contract("eval: unknown op");
}

std::vector<Var> Tape::gradient(Var output, std::span<const Var> params,
                                GradOptions opt) {
  check_var(output, "gradient");
  for (Var p : params) check_var(p, "gradient");
  if (node(output).value.numel() != 1) {
    throw Error::contract("gradient: output must be a scalar");
  }

  const size_t size0 = nodes_.size();
  std::vector<int32_t> adj(size0, -1);

  if (nodes_[static_cast<size_t>(output.id)].requires_grad) {
    adj[static_cast<size_t>(output.id)] =
        constant(Tensor::ones_like(nodes_[static_cast<size_t>(output.id)].value)).id;

    for (int32_t id = output.id; id >= 0; --id) {
      if (adj[static_cast<size_t>(id)] < 0) continue;
      // Copy metadata up front: emitting nodes below reallocates nodes_.
      const Op op = nodes_[static_cast<size_t>(id)].op;
      if (op == Op::Leaf) continue;
      const auto parent = nodes_[static_cast<size_t>(id)].parent;
      const double c0 = nodes_[static_cast<size_t>(id)].c0;
      const double c1 = nodes_[static_cast<size_t>(id)].c1;
      const int64_t i0 = nodes_[static_cast<size_t>(id)].i0;
      const int64_t i1 = nodes_[static_cast<size_t>(id)].i1;
      SparsePtr pattern = nodes_[static_cast<size_t>(id)].pattern;
      IndexPtr indices = nodes_[static_cast<size_t>(id)].indices;

      const Var g{this, adj[static_cast<size_t>(id)]};
      const Var self{this, id};
      auto pvar = [&](int i) { return Var{this, parent[i]}; };
      auto needs = [&](int i) {
        return nodes_[static_cast<size_t>(parent[i])].requires_grad;
      };
      auto accum = [&](int i, Var contrib) {
        auto& slot = adj[static_cast<size_t>(parent[i])];
        slot = slot < 0 ? contrib.id : add(Var{this, slot}, contrib).id;
      };

      switch (op) {
        case Op::Leaf:
          break;
        case Op::Add:
          if (needs(0)) accum(0, g);
          if (needs(1)) accum(1, g);
          break;
        case Op::Sub:
          if (needs(0)) accum(0, g);
          if (needs(1)) accum(1, scale(-1.0, g));
          break;
        case Op::Mul:
          if (needs(0)) accum(0, mul(g, pvar(1)));
          if (needs(1)) accum(1, mul(g, pvar(0)));
          break;
        case Op::Div:
          if (needs(0)) accum(0, div(g, pvar(1)));
          if (needs(1)) accum(1, scale(-1.0, div(mul(g, self), pvar(1))));
          break;
        case Op::Scale:
          if (needs(0)) accum(0, scale(c0, g));
          break;
        case Op::Matmul:
          if (needs(0)) accum(0, matmul(g, transpose(pvar(1))));
          if (needs(1)) accum(1, matmul(transpose(pvar(0)), g));
          break;
        case Op::Transpose:
          if (needs(0)) accum(0, transpose(g));
          break;
        case Op::Sigmoid:
          if (needs(0)) {
            Var one = constant(Tensor::ones_like(value(self)));
            accum(0, mul(g, mul(self, sub(one, self))));
          }
          break;
        case Op::Relu:
          if (needs(0)) {
            Tensor m = Tensor::zeros_like(value(pvar(0)));
            const Tensor& a = value(pvar(0));
            for (int64_t i = 0; i < m.numel(); ++i) m.at(i) = a.at(i) > 0 ? 1.0 : 0.0;
            accum(0, mul(g, constant(std::move(m))));
          }
          break;
        case Op::LeakyRelu:
          if (needs(0)) {
            Tensor m = Tensor::zeros_like(value(pvar(0)));
            const Tensor& a = value(pvar(0));
            for (int64_t i = 0; i < m.numel(); ++i) m.at(i) = a.at(i) > 0 ? 1.0 : c0;
            accum(0, mul(g, constant(std::move(m))));
          }
          break;
        case Op::Exp:
          if (needs(0)) accum(0, mul(g, self));
          break;
        case Op::Log:
          if (needs(0)) accum(0, div(g, pvar(0)));
          break;
        case Op::Clamp:
          if (needs(0)) {
            Tensor m = Tensor::zeros_like(value(pvar(0)));
            const Tensor& a = value(pvar(0));
            for (int64_t i = 0; i < m.numel(); ++i) {
              m.at(i) = (a.at(i) >= c0 && a.at(i) <= c1) ? 1.0 : 0.0;
            }
            accum(0, mul(g, constant(std::move(m))));
          }
          break;
        case Op::Sum:
          if (needs(0)) accum(0, broadcast_scalar(g, value(pvar(0)).shape()));
          break;
        case Op::Mean:
          if (needs(0)) {
            const int64_t count = value(pvar(0)).numel();
            accum(0, scale(1.0 / static_cast<double>(count),
                           broadcast_scalar(g, value(pvar(0)).shape())));
          }
          break;
        case Op::BroadcastScalar:
          if (needs(0)) accum(0, reshape(sum(g), value(pvar(0)).shape()));
          break;
        case Op::Reshape:
          if (needs(0)) accum(0, reshape(g, value(pvar(0)).shape()));
          break;
        case Op::ConcatRows: {
          const int64_t ra = value(pvar(0)).rows();
          if (needs(0)) accum(0, slice_rows(g, 0, ra));
          if (needs(1)) accum(1, slice_rows(g, ra, value(self).rows()));
          break;
        }
        case Op::ConcatCols: {
          const int64_t ca = value(pvar(0)).cols();
          if (needs(0)) accum(0, slice_cols(g, 0, ca));
          if (needs(1)) accum(1, slice_cols(g, ca, value(self).cols()));
          break;
        }
        case Op::SliceRows:
          if (needs(0)) {
            const Tensor& a = value(pvar(0));
            Var padded = g;
            if (i0 > 0) {
              padded = concat_rows(constant(Tensor({i0, a.cols()})), padded);
            }
            if (i1 < a.rows()) {
              padded = concat_rows(padded, constant(Tensor({a.rows() - i1, a.cols()})));
            }
            accum(0, padded);
          }
          break;
        case Op::SliceCols:
          if (needs(0)) {
            const Tensor& a = value(pvar(0));
            Var padded = g;
            if (i0 > 0) {
              padded = concat_cols(constant(Tensor({a.rows(), i0})), padded);
            }
            if (i1 < a.cols()) {
              padded = concat_cols(padded, constant(Tensor({a.rows(), a.cols() - i1})));
            }
            accum(0, padded);
          }
          break;
        case Op::GatherRows:
          if (needs(0)) accum(0, scatter_add_rows(g, indices, value(pvar(0)).rows()));
          break;
        case Op::ScatterAddRows:
          if (needs(0)) accum(0, gather_rows(g, indices));
          break;
        case Op::Spmm:
          if (needs(0)) accum(0, edge_dot(pattern, g, pvar(1)));
          if (needs(1)) accum(1, spmm_t(pattern, pvar(0), g));
          break;
        case Op::SpmmT:
          if (needs(0)) accum(0, edge_dot(pattern, pvar(1), g));
          if (needs(1)) accum(1, spmm(pattern, pvar(0), g));
          break;
        case Op::EdgeDot:
          if (needs(0)) accum(0, spmm(pattern, g, pvar(1)));
          if (needs(1)) accum(1, spmm_t(pattern, g, pvar(0)));
          break;
        case Op::SegmentSum:
          if (needs(0)) accum(0, segment_gather(pattern, g));
          break;
        case Op::SegmentGather:
          if (needs(0)) accum(0, segment_sum(pattern, g));
          break;
        case Op::SegmentSumCols:
          if (needs(0)) accum(0, segment_gather_cols(pattern, g));
          break;
        case Op::SegmentGatherCols:
          if (needs(0)) accum(0, segment_sum_cols(pattern, g));
          break;
      }
    }
  }

  std::vector<Var> grads;
  grads.reserve(params.size());
  for (Var p : params) {
    const int32_t a = adj[static_cast<size_t>(p.id)];
    if (a >= 0) {
      grads.push_back(Var{this, a});
    } else {
      grads.push_back(constant(Tensor::zeros_like(node(p).value)));
    }
  }

  if (opt.retain_graph) {
    has_retained_backward_ = true;
    return grads;
  }

  // Rewind: keep only the values, drop every node emitted by this pass.
  std::vector<Tensor> vals;
  vals.reserve(grads.size());
  for (Var gv : grads) vals.push_back(node(gv).value);
  nodes_.resize(size0);
  grads.clear();
  for (Tensor& v : vals) grads.push_back(constant(std::move(v)));
  return grads;
}

std::vector<Var> Tape::nested_gradient(Var output, std::span<const Var> params,
                                       GradOptions opt) {
  if (!has_retained_backward_) {
    throw Error::contract(
        "nested_gradient: no retained backward on this tape; the inner "
        "gradient must be taken with retain_graph=true first");
  }
  return gradient(output, params, opt);
}

}  // namespace selar
