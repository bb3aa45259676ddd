#include "selar/weighting.hpp"

#include <cmath>

#include "selar/encoder.hpp"
#include "selar/error.hpp"

namespace selar {

SampleEmbedding SampleEmbedding::make(int32_t task_id, int32_t n_aux, double loss,
                                      double label, bool hint_mode,
                                      std::optional<double> hint_loss) {
  if (n_aux < 0) throw Error::contract("sample embedding: negative task count");
  if (task_id < 0 || task_id > n_aux) {
    throw Error::contract("sample embedding: task id " + std::to_string(task_id) +
                          " outside [0," + std::to_string(n_aux) + "]");
  }
  if (!(loss >= 0.0)) throw Error::contract("sample embedding: loss must be >= 0");
  if (!std::isfinite(label)) throw Error::contract("sample embedding: non-finite label");
  if (hint_mode && !hint_loss) {
    throw Error::config("sample embedding: hint mode requires a hint loss");
  }
  if (!hint_mode && hint_loss) {
    throw Error::config("sample embedding: hint loss provided outside hint mode");
  }
  if (hint_loss && !(*hint_loss >= 0.0)) {
    throw Error::contract("sample embedding: hint loss must be >= 0");
  }

  SampleEmbedding e;
  e.values.reserve(static_cast<size_t>(width(n_aux, hint_mode)));
  e.values.push_back(loss);
  if (hint_mode) e.values.push_back(*hint_loss);
  for (int32_t t = 0; t <= n_aux; ++t) e.values.push_back(t == task_id ? 1.0 : 0.0);
  e.values.push_back(label);
  return e;
}

Tensor embeddings_matrix(std::span<const SampleEmbedding> embeddings) {
  if (embeddings.empty()) throw Error::shape("embeddings_matrix: empty batch");
  const int64_t w = static_cast<int64_t>(embeddings[0].values.size());
  Tensor m({static_cast<int64_t>(embeddings.size()), w});
  for (size_t i = 0; i < embeddings.size(); ++i) {
    if (static_cast<int64_t>(embeddings[i].values.size()) != w) {
      throw Error::shape("embeddings_matrix: inconsistent embedding widths");
    }
    for (int64_t j = 0; j < w; ++j) {
      m.at(static_cast<int64_t>(i), j) = embeddings[i].values[static_cast<size_t>(j)];
    }
  }
  return m;
}

void init_weight_net(ParamStore& store, std::mt19937_64& rng,
                     const std::string& prefix, int64_t input_width, int64_t hidden) {
  if (input_width < 1 || hidden < 1) {
    throw Error::config("weight net: dimensions must be positive");
  }
  Tensor w1({input_width, hidden}), w2({hidden, 1});
  glorot_fill(w1, input_width, hidden, rng);
  glorot_fill(w2, hidden, 1, rng);
  store.set(prefix + "W1", std::move(w1));
  store.set(prefix + "b1", Tensor({1, hidden}));
  store.set(prefix + "W2", std::move(w2));
  store.set(prefix + "b2", Tensor({1, 1}));
}

Var weight_net_apply(Tape& t, const VarMap& params, const std::string& prefix, Var xi) {
  auto find = [&](const char* name) {
    auto it = params.find(prefix + name);
    if (it == params.end()) {
      throw Error::contract("weight net: parameter " + prefix + name + " not bound");
    }
    return it->second;
  };
  Var w1 = find("W1"), b1 = find("b1"), w2 = find("W2"), b2 = find("b2");
  if (xi.value().rank() != 2 || xi.value().cols() != w1.value().rows()) {
    throw Error::shape("weight net: embedding width " +
                       std::to_string(xi.value().rank() == 2 ? xi.value().cols() : -1) +
                       " does not match the net input width " +
                       std::to_string(w1.value().rows()));
  }
  Var h = t.relu(linear(xi, w1, b1));
  Var out = linear(h, w2, b2);
  return t.reshape(t.sigmoid(out), {xi.value().rows()});
}

int64_t weight_net_input_width(const ParamStore& params, const std::string& prefix) {
  return params.at(prefix + "W1").rows();
}

double weight_net_value(const ParamStore& params, const std::string& prefix,
                        const SampleEmbedding& e) {
  const Tensor& w1 = params.at(prefix + "W1");
  const Tensor& b1 = params.at(prefix + "b1");
  const Tensor& w2 = params.at(prefix + "W2");
  const Tensor& b2 = params.at(prefix + "b2");
  const int64_t in = w1.rows(), hidden = w1.cols();
  if (static_cast<int64_t>(e.values.size()) != in) {
    throw Error::shape("weight net: embedding width " + std::to_string(e.values.size()) +
                       " does not match the net input width " + std::to_string(in));
  }
  // Accumulation order mirrors the tape path (products first, bias last) so
  // both give bitwise-identical results on the same parameters.
  std::vector<double> h(static_cast<size_t>(hidden), 0.0);
  for (int64_t i = 0; i < in; ++i) {
    const double x = e.values[static_cast<size_t>(i)];
    if (x == 0.0) continue;
    for (int64_t j = 0; j < hidden; ++j) h[static_cast<size_t>(j)] += x * w1.at(i, j);
  }
  double pre = 0.0;
  for (int64_t j = 0; j < hidden; ++j) {
    double a = h[static_cast<size_t>(j)] + b1.at(0, j);
    a = a > 0 ? a : 0.0;
    pre += a * w2.at(j, 0);
  }
  pre += b2.at(0, 0);
  if (pre >= 0) return 1.0 / (1.0 + std::exp(-pre));
  const double ex = std::exp(pre);
  return ex / (1.0 + ex);
}

Var combine_probs(Var learner, Var hint, Var gate) {
  Tape& t = *learner.tape;
  if (!learner.value().same_shape(hint.value()) ||
      !learner.value().same_shape(gate.value())) {
    throw Error::shape("combine: learner, hint, and gate shapes must match");
  }
  Var one = t.constant(Tensor::ones_like(gate.value()));
  return t.add(t.mul(gate, learner), t.mul(t.sub(one, gate), hint));
}

Var combine_dists(Var learner, Var hint, Var gate) {
  Tape& t = *learner.tape;
  if (!learner.value().same_shape(hint.value()) || learner.value().rank() != 2) {
    throw Error::shape("combine: learner and hint distributions must match");
  }
  const int64_t n = learner.value().rows(), c = learner.value().cols();
  if (gate.value().rank() != 1 || gate.value().numel() != n) {
    throw Error::shape("combine: one gate per row required");
  }
  Var g = t.matmul(t.reshape(gate, {n, 1}), t.constant(Tensor::ones({1, c})));
  Var one = t.constant(Tensor::ones({n, c}));
  return t.add(t.mul(g, learner), t.mul(t.sub(one, g), hint));
}

double combine_value(double learner, double hint, double gate) {
  return gate * learner + (1.0 - gate) * hint;
}

std::vector<double> combine_dist_value(const std::vector<double>& learner,
                                       const std::vector<double>& hint, double gate) {
  if (learner.size() != hint.size()) {
    throw Error::contract("combine: learner and hint predictions have different kinds");
  }
  std::vector<double> out(learner.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = gate * learner[i] + (1.0 - gate) * hint[i];
  }
  return out;
}

}  // namespace selar
