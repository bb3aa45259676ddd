#include "selar/heads.hpp"

#include <cmath>

#include "selar/encoder.hpp"
#include "selar/error.hpp"

namespace selar {

int32_t TaskHeads::add_pair_head(int64_t in_dim, int64_t out_dim) {
  if (in_dim < 1 || out_dim < 1) throw Error::shape("pair head: dimensions must be positive");
  kinds_.push_back(HeadKind::Pair);
  in_dims_.push_back(in_dim);
  out_dims_.push_back(out_dim);
  return count() - 1;
}

int32_t TaskHeads::add_class_head(int64_t in_dim, int64_t n_classes) {
  if (in_dim < 1) throw Error::shape("class head: input dimension must be positive");
  if (n_classes < 2) throw Error::data("class head: need at least 2 classes");
  kinds_.push_back(HeadKind::NodeClass);
  in_dims_.push_back(in_dim);
  out_dims_.push_back(n_classes);
  return count() - 1;
}

HeadKind TaskHeads::kind(int32_t task) const {
  if (task < 0 || task >= count()) throw Error::contract("head: unknown task id");
  return kinds_[static_cast<size_t>(task)];
}

int64_t TaskHeads::out_dim(int32_t task) const {
  if (task < 0 || task >= count()) throw Error::contract("head: unknown task id");
  return out_dims_[static_cast<size_t>(task)];
}

std::string TaskHeads::pname(int32_t task, const char* what) const {
  return prefix_ + "task" + std::to_string(task) + "." + what;
}

void TaskHeads::check_task(int32_t task, HeadKind expected, const char* who) const {
  if (task < 0 || task >= count()) {
    throw Error::contract(std::string(who) + ": unknown task id " + std::to_string(task));
  }
  if (kinds_[static_cast<size_t>(task)] != expected) {
    throw Error::contract(std::string(who) + ": task " + std::to_string(task) +
                          " has the wrong head kind");
  }
}

void TaskHeads::init_params(ParamStore& store, std::mt19937_64& rng) const {
  for (int32_t task = 0; task < count(); ++task) {
    const int64_t in = in_dims_[static_cast<size_t>(task)];
    const int64_t out = out_dims_[static_cast<size_t>(task)];
    Tensor w({in, out});
    glorot_fill(w, in, out, rng);
    store.set(pname(task, "W"), std::move(w));
    store.set(pname(task, "b"), Tensor({1, out}));
  }
}

Var TaskHeads::transform(Tape& t, const VarMap& params, int32_t task, Var z) const {
  if (task < 0 || task >= count()) throw Error::contract("head transform: unknown task id");
  auto wi = params.find(pname(task, "W"));
  auto bi = params.find(pname(task, "b"));
  if (wi == params.end() || bi == params.end()) {
    throw Error::contract("head transform: parameters not bound for task " +
                          std::to_string(task));
  }
  return linear(z, wi->second, bi->second);
}

Var TaskHeads::pair_probs(Tape& t, const VarMap& params, int32_t task, Var z,
                          IndexPtr us, IndexPtr vs) const {
  check_task(task, HeadKind::Pair, "pair_probs");
  Var phi = transform(t, params, task, z);
  return t.sigmoid(pair_scores(phi, std::move(us), std::move(vs)));
}

Var TaskHeads::class_logits(Tape& t, const VarMap& params, int32_t task, Var z,
                            const std::vector<int64_t>& nodes) const {
  check_task(task, HeadKind::NodeClass, "class_logits");
  Var rows = t.gather_rows(z, std::make_shared<const std::vector<int64_t>>(nodes));
  return transform(t, params, task, rows);
}

std::vector<double> TaskHeads::transform_row(const Tensor& z, int64_t row,
                                             const ParamStore& params,
                                             int32_t task) const {
  const Tensor& w = params.at(pname(task, "W"));
  const Tensor& b = params.at(pname(task, "b"));
  if (row < 0 || row >= z.rows()) throw Error::shape("head: node id out of range");
  if (z.cols() != w.rows()) throw Error::shape("head: representation width mismatch");
  // Products first, bias last, matching the tape's matmul-then-add order.
  std::vector<double> out(static_cast<size_t>(w.cols()), 0.0);
  for (int64_t i = 0; i < w.rows(); ++i) {
    const double zi = z.at(row, i);
    if (zi == 0.0) continue;
    for (int64_t j = 0; j < w.cols(); ++j) out[static_cast<size_t>(j)] += zi * w.at(i, j);
  }
  for (int64_t j = 0; j < w.cols(); ++j) out[static_cast<size_t>(j)] += b.at(0, j);
  return out;
}

double TaskHeads::predict_pair(const Tensor& z, int64_t u, int64_t v,
                               const ParamStore& params, int32_t task) const {
  check_task(task, HeadKind::Pair, "predict_pair");
  const auto pu = transform_row(z, u, params, task);
  const auto pv = transform_row(z, v, params, task);
  double dot = 0;
  for (size_t i = 0; i < pu.size(); ++i) dot += pu[i] * pv[i];
  if (dot >= 0) return 1.0 / (1.0 + std::exp(-dot));
  const double e = std::exp(dot);
  return e / (1.0 + e);
}

std::vector<double> TaskHeads::predict_node_class(const Tensor& z, int64_t v,
                                                  const ParamStore& params,
                                                  int32_t task) const {
  check_task(task, HeadKind::NodeClass, "predict_node_class");
  std::vector<double> logits = transform_row(z, v, params, task);
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  double denom = 0;
  for (double x : logits) denom += std::exp(x - m);
  std::vector<double> probs(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) probs[i] = std::exp(logits[i] - m) / denom;
  return probs;
}

}  // namespace selar
