#include "selar/gradcheck.hpp"

#include <cmath>
#include <memory>

#include "selar/encoder.hpp"
#include "selar/error.hpp"
#include "selar/hubs.hpp"
#include "selar/metapath.hpp"
#include "selar/ops.hpp"
#include "selar/rng.hpp"
#include "selar/synth.hpp"
#include "selar/trainer.hpp"

namespace selar {

namespace {

Tensor rand_tensor(std::vector<int64_t> shape, double lo, double hi, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = rand_range(rng, lo, hi);
  return t;
}

// Magnitudes in [0.2, 1] with random sign: safe distance from the relu and
// clamp kinks under the finite-difference step.
Tensor rand_signed_offset(std::vector<int64_t> shape, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) {
    const double mag = rand_range(rng, 0.2, 1.0);
    t.at(i) = rand_index(rng, 2) == 0 ? mag : -mag;
  }
  return t;
}

using Builder = std::function<Var(Tape&, const VarMap&)>;

// Scalarizes the builder's output through a fixed random projection so every
// output coordinate influences the objective with a distinct weight.
GradCheckResult check_fn(const std::string& name, const ParamStore& init,
                         const Builder& build, double tol, uint64_t seed,
                         double step = 1e-5) {
  Tape t0;
  VarMap m0 = bind_params(t0, init, /*requires_grad=*/true);
  Var out0 = build(t0, m0);
  std::mt19937_64 rng = substream(seed, "gradcheck.proj." + name);
  const Tensor proj = rand_tensor(out0.shape(), 0.5, 1.5, rng);
  Var loss0 = t0.sum(t0.mul(t0.constant(proj), out0));
  const auto analytic = grads_by_name(t0, loss0, m0);

  Objective f = [&build, &proj](const ParamStore& p) {
    Tape t;
    VarMap m = bind_params(t, p, /*requires_grad=*/false);
    Var out = build(t, m);
    return t.sum(t.mul(t.constant(proj), out)).item();
  };
  return check_gradients(name, init, f, analytic, tol, step);
}

SparsePtr fixture_pattern() {
  static const SparsePtr s = std::make_shared<const SparseBool>(
      5, 4,
      std::vector<std::pair<int64_t, int64_t>>{
          {0, 1}, {0, 3}, {1, 0}, {2, 2}, {2, 3}, {3, 1}, {4, 0}, {4, 2}});
  return s;
}

DataBundle tiny_bundle(uint64_t seed, bool with_hub) {
  SynthConfig sc;
  sc.n_per_type = 10;
  sc.n_node_types = 2;
  sc.n_edge_types = 2;
  sc.edge_prob = 0.18;
  sc.planted_edge_seq = {0, 1};
  sc.signal_strength = 0.8;
  sc.n_primary_pairs = 40;
  sc.seed = seed;
  SynthDataset ds = synth_hetero(sc);

  DataBundle b;
  b.graph = ds.graph;
  b.primary.pairs = ds.primary.pairs;
  std::vector<MetaPathSpec> specs = enumerate_composable_specs(ds.graph, 2, 2);
  if (specs.size() > 2) specs.resize(2);
  int32_t task = 1;
  for (const MetaPathSpec& spec : specs) {
    SparseBool composed = compose_adjacency(ds.graph, spec);
    const int64_t nnz = static_cast<int64_t>(composed.entries().size());
    const int64_t zeros = composed.rows() * composed.cols() - nnz - composed.rows();
    const int64_t n_pos = std::min<int64_t>(15, nnz);
    const int64_t n_neg = std::min<int64_t>(15, zeros);
    if (n_pos < 4 || n_neg < 4) continue;
    AuxTask aux;
    aux.labels = build_pair_labels(composed, n_pos, n_neg,
                                   splitmix64(seed ^ fnv1a64(spec.to_name(ds.graph))), task);
    b.aux.push_back(std::move(aux));
    ++task;
  }
  if (b.aux.empty()) throw Error::data("tiny_bundle: no usable auxiliary task");
  if (with_hub) b.hub_graph = augment_with_hubs(b.graph);
  return b;
}

EncoderConfig tiny_encoder() {
  EncoderConfig e;
  e.arch = EncoderArch::GCN;
  e.num_layers = 2;
  e.hidden_dim = 8;
  e.embed_dim = 6;
  return e;
}

TrainConfig tiny_train(uint64_t seed, StrategyKind strategy) {
  TrainConfig c;
  c.alpha = 0.1;
  c.beta = 0.05;
  c.folds = 2;
  c.batch_primary = 12;
  c.batch_aux = 10;
  c.strategy = strategy;
  c.seed = seed;
  c.weight_net_hidden = 8;
  return c;
}

// Sum of held-out plain primary losses over the same fold partition the
// outer update uses.
double meta_objective(const Trainer& tr, const Trainer::Batch& batch) {
  const std::vector<int64_t>& p = batch.primary;
  const int64_t n = static_cast<int64_t>(p.size());
  const int32_t folds = tr.config().folds;
  double total = 0.0;
  for (const auto& [lo, hi] : fold_bounds(n, folds)) {
    std::vector<int64_t> meta_idx, train_idx;
    if (folds == 1) {
      meta_idx = p;
      train_idx = p;
    } else {
      meta_idx.assign(p.begin() + lo, p.begin() + hi);
      train_idx.assign(p.begin(), p.begin() + lo);
      train_idx.insert(train_idx.end(), p.begin() + hi, p.end());
    }
    Tape tape;
    Trainer::Bound b = tr.bind(tape, true, false, false);
    VarMap hat = tr.inner_update(tape, b, batch, train_idx);
    total += tr.primary_loss(tape, hat, meta_idx).item();
  }
  return total;
}

std::map<std::string, Tensor> meta_analytic(const Trainer& tr, const Trainer::Batch& batch,
                                            bool wrt_gate) {
  const std::vector<int64_t>& p = batch.primary;
  const int64_t n = static_cast<int64_t>(p.size());
  const int32_t folds = tr.config().folds;
  std::map<std::string, Tensor> total;
  for (const auto& [lo, hi] : fold_bounds(n, folds)) {
    std::vector<int64_t> meta_idx, train_idx;
    if (folds == 1) {
      meta_idx = p;
      train_idx = p;
    } else {
      meta_idx.assign(p.begin() + lo, p.begin() + hi);
      train_idx.assign(p.begin(), p.begin() + lo);
      train_idx.insert(train_idx.end(), p.begin() + hi, p.end());
    }
    Tape tape;
    Trainer::Bound b = tr.bind(tape, true, !wrt_gate, wrt_gate);
    VarMap hat = tr.inner_update(tape, b, batch, train_idx);
    Var meta_loss = tr.primary_loss(tape, hat, meta_idx);
    const VarMap& target = wrt_gate ? b.theta_h : b.theta;
    auto g = grads_by_name(tape, meta_loss, target, /*nested=*/true);
    for (const auto& [name, grad] : g) {
      auto it = total.find(name);
      if (it == total.end())
        total.emplace(name, grad);
      else
        for (int64_t i = 0; i < grad.numel(); ++i) it->second.at(i) += grad.at(i);
    }
  }
  return total;
}

}  // namespace

GradCheckResult check_gradients(const std::string& name, const ParamStore& params,
                                const Objective& f,
                                const std::map<std::string, Tensor>& analytic,
                                double tol, double step, bool corrupt_first) {
  GradCheckResult r;
  r.name = name;
  r.tol = tol;
  ParamStore probe = params;
  bool first = true;
  for (const auto& [pname, tensor] : params) {
    auto it = analytic.find(pname);
    if (it == analytic.end())
      throw Error::contract("check_gradients: no analytic gradient for " + pname);
    for (int64_t i = 0; i < tensor.numel(); ++i) {
      const double orig = probe.at(pname).at(i);
      probe.at(pname).at(i) = orig + step;
      const double fp = f(probe);
      probe.at(pname).at(i) = orig - step;
      const double fm = f(probe);
      probe.at(pname).at(i) = orig;
      const double fd = (fp - fm) / (2.0 * step);
      double a = it->second.at(i);
      if (corrupt_first && first) a += 1e-3;
      first = false;
      const double denom = std::max({1.0, std::fabs(a), std::fabs(fd)});
      r.max_rel_err = std::max(r.max_rel_err, std::fabs(a - fd) / denom);
      r.max_abs_analytic = std::max(r.max_abs_analytic, std::fabs(it->second.at(i)));
      ++r.n_coords;
    }
  }
  r.pass = r.max_rel_err <= tol;
  return r;
}

std::vector<GradCheckResult> run_op_gradchecks(uint64_t seed) {
  constexpr double kTol = 1e-6;
  std::vector<GradCheckResult> out;
  std::mt19937_64 rng = substream(seed, "gradcheck.ops");

  const SparsePtr s = fixture_pattern();
  const int64_t nnz = static_cast<int64_t>(s->entries().size());
  const auto gather_idx =
      std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{3, 0, 2, 2});
  const auto scatter_idx =
      std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{1, 3, 0, 3});
  const auto us = std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{0, 2, 4, 1});
  const auto vs = std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{1, 0, 3, 1});

  auto check1 = [&](const std::string& opname, Tensor a, const std::function<Var(Tape&, Var)>& fn) {
    ParamStore p;
    p.set("a", std::move(a));
    out.push_back(check_fn("op." + opname, p,
                           [fn](Tape& t, const VarMap& m) { return fn(t, m.at("a")); },
                           kTol, seed));
  };
  auto check2 = [&](const std::string& opname, Tensor a, Tensor b,
                    const std::function<Var(Tape&, Var, Var)>& fn) {
    ParamStore p;
    p.set("a", std::move(a));
    p.set("b", std::move(b));
    out.push_back(check_fn("op." + opname, p,
                           [fn](Tape& t, const VarMap& m) { return fn(t, m.at("a"), m.at("b")); },
                           kTol, seed));
  };

  check2("add", rand_tensor({3, 4}, -1, 1, rng), rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.add(a, b); });
  check2("sub", rand_tensor({3, 4}, -1, 1, rng), rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.sub(a, b); });
  check2("mul", rand_tensor({3, 4}, -1, 1, rng), rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.mul(a, b); });
  check2("div", rand_tensor({3, 4}, -1, 1, rng), rand_tensor({3, 4}, 0.5, 1.5, rng),
         [](Tape& t, Var a, Var b) { return t.div(a, b); });
  check1("scale", rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a) { return t.scale(-1.7, a); });
  check2("matmul", rand_tensor({3, 4}, -1, 1, rng), rand_tensor({4, 2}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.matmul(a, b); });
  check1("transpose", rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a) { return t.transpose(a); });
  check1("sigmoid", rand_tensor({3, 4}, -2, 2, rng),
         [](Tape& t, Var a) { return t.sigmoid(a); });
  check1("relu", rand_signed_offset({3, 4}, rng), [](Tape& t, Var a) { return t.relu(a); });
  check1("leaky_relu", rand_signed_offset({3, 4}, rng),
         [](Tape& t, Var a) { return t.leaky_relu(a, 0.2); });
  check1("exp", rand_tensor({3, 4}, -1, 1, rng), [](Tape& t, Var a) { return t.exp(a); });
  check1("log", rand_tensor({3, 4}, 0.5, 2.0, rng), [](Tape& t, Var a) { return t.log(a); });
  check1("clamp", rand_signed_offset({3, 4}, rng),
         [](Tape& t, Var a) { return t.clamp(a, -1.1, 1.1); });
  check1("sum", rand_tensor({3, 4}, -1, 1, rng), [](Tape& t, Var a) { return t.sum(a); });
  check1("mean", rand_tensor({3, 4}, -1, 1, rng), [](Tape& t, Var a) { return t.mean(a); });
  check1("broadcast_scalar", rand_tensor({}, -1, 1, rng),
         [](Tape& t, Var a) { return t.broadcast_scalar(a, {3, 4}); });
  check1("reshape", rand_tensor({3, 4}, -1, 1, rng),
         [](Tape& t, Var a) { return t.reshape(a, {2, 6}); });
  check2("concat_rows", rand_tensor({2, 3}, -1, 1, rng), rand_tensor({3, 3}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.concat_rows(a, b); });
  check2("concat_cols", rand_tensor({3, 2}, -1, 1, rng), rand_tensor({3, 3}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return t.concat_cols(a, b); });
  check1("slice_rows", rand_tensor({5, 3}, -1, 1, rng),
         [](Tape& t, Var a) { return t.slice_rows(a, 1, 4); });
  check1("slice_cols", rand_tensor({3, 5}, -1, 1, rng),
         [](Tape& t, Var a) { return t.slice_cols(a, 1, 3); });
  check1("gather_rows", rand_tensor({5, 3}, -1, 1, rng),
         [gather_idx](Tape& t, Var a) { return t.gather_rows(a, gather_idx); });
  check1("scatter_add_rows", rand_tensor({4, 3}, -1, 1, rng),
         [scatter_idx](Tape& t, Var a) { return t.scatter_add_rows(a, scatter_idx, 5); });
  check2("spmm", rand_tensor({nnz}, -1, 1, rng), rand_tensor({4, 3}, -1, 1, rng),
         [s](Tape& t, Var vals, Var x) { return t.spmm(s, vals, x); });
  check2("spmm_t", rand_tensor({nnz}, -1, 1, rng), rand_tensor({5, 3}, -1, 1, rng),
         [s](Tape& t, Var vals, Var g) { return t.spmm_t(s, vals, g); });
  check2("edge_dot", rand_tensor({5, 3}, -1, 1, rng), rand_tensor({4, 3}, -1, 1, rng),
         [s](Tape& t, Var a, Var b) { return t.edge_dot(s, a, b); });
  check1("segment_sum", rand_tensor({nnz}, -1, 1, rng),
         [s](Tape& t, Var v) { return t.segment_sum(s, v); });
  check1("segment_gather", rand_tensor({5}, -1, 1, rng),
         [s](Tape& t, Var v) { return t.segment_gather(s, v); });
  check1("segment_sum_cols", rand_tensor({nnz}, -1, 1, rng),
         [s](Tape& t, Var v) { return t.segment_sum_cols(s, v); });
  check1("segment_gather_cols", rand_tensor({4}, -1, 1, rng),
         [s](Tape& t, Var v) { return t.segment_gather_cols(s, v); });
  check1("neighbor_softmax", rand_tensor({nnz}, -1, 1, rng),
         [s](Tape& t, Var v) { return neighbor_softmax(s, v); });

  check2("add_rowvec", rand_tensor({4, 3}, -1, 1, rng), rand_tensor({1, 3}, -1, 1, rng),
         [](Tape& t, Var a, Var b) { return add_rowvec(a, b); });
  check1("row_sums", rand_tensor({4, 3}, -1, 1, rng),
         [](Tape&, Var a) { return row_sums(a); });
  check1("pair_scores", rand_tensor({5, 3}, -1, 1, rng),
         [us, vs](Tape&, Var z) { return pair_scores(z, us, vs); });
  {
    // probs through a sigmoid so they stay strictly inside (0, 1)
    Tensor x = rand_tensor({6}, -2, 2, rng);
    Tensor y({6});
    for (int64_t i = 0; i < 6; ++i) y.at(i) = static_cast<double>(rand_index(rng, 2));
    ParamStore p;
    p.set("x", std::move(x));
    out.push_back(check_fn("op.binary_cross_entropy", p,
                           [y](Tape& t, const VarMap& m) {
                             return binary_cross_entropy(t.sigmoid(m.at("x")), t.constant(y));
                           },
                           kTol, seed));
  }
  {
    ParamStore p;
    p.set("logits", rand_tensor({4, 3}, -1.5, 1.5, rng));
    const std::vector<int32_t> classes{0, 2, 1, 1};
    out.push_back(check_fn("op.softmax_cross_entropy", p,
                           [classes](Tape& t, const VarMap& m) {
                             return softmax_cross_entropy(m.at("logits"), classes);
                           },
                           kTol, seed));
    ParamStore q;
    q.set("logits", rand_tensor({4, 3}, -1.5, 1.5, rng));
    out.push_back(check_fn("op.softmax_rows", q,
                           [](Tape& t, const VarMap& m) { return softmax_rows(m.at("logits")); },
                           kTol, seed));
  }
  return out;
}

GradCheckResult run_composite_gradcheck(uint64_t seed) {
  SynthConfig sc;
  sc.n_per_type = 10;
  sc.n_node_types = 2;
  sc.n_edge_types = 2;
  sc.edge_prob = 0.2;
  sc.planted_edge_seq = {0, 1};
  sc.n_primary_pairs = 30;
  sc.seed = seed;
  SynthDataset ds = synth_hetero(sc);

  const Encoder enc(ds.graph, tiny_encoder());
  TaskHeads heads;
  heads.add_pair_head(enc.output_dim(), enc.output_dim());
  ParamStore params;
  std::mt19937_64 rng = substream(seed, "gradcheck.composite");
  enc.init_params(params, rng);
  heads.init_params(params, rng);

  auto us = std::make_shared<std::vector<int64_t>>();
  auto vs = std::make_shared<std::vector<int64_t>>();
  Tensor y({static_cast<int64_t>(ds.primary.pairs.size())});
  for (size_t i = 0; i < ds.primary.pairs.size(); ++i) {
    us->push_back(ds.primary.pairs[i].u);
    vs->push_back(ds.primary.pairs[i].v);
    y.at(static_cast<int64_t>(i)) = static_cast<double>(ds.primary.pairs[i].y);
  }

  Tape t0;
  VarMap m0 = bind_params(t0, params, true);
  auto build = [&](Tape& t, const VarMap& m) {
    Var z = enc.encode(t, m);
    Var probs = heads.pair_probs(t, m, 0, z, us, vs);
    return t.mean(binary_cross_entropy(probs, t.constant(y)));
  };
  Var loss0 = build(t0, m0);
  const auto analytic = grads_by_name(t0, loss0, m0);
  Objective f = [&](const ParamStore& p) {
    Tape t;
    VarMap m = bind_params(t, p, false);
    return build(t, m).item();
  };
  return check_gradients("composite.encoder-pair-loss", params, f, analytic, 1e-5, 1e-5);
}

GradCheckResult run_scalar_bilevel_check() {
  constexpr double kAlpha = 0.3, kA = 0.7, kB = -0.4, kW = 0.25, kTheta = 0.6;
  Tape t;
  Var w = t.leaf(Tensor::scalar(kW), true);
  Var th = t.leaf(Tensor::scalar(kTheta), true);
  Var diff = t.sub(w, t.constant(kA));
  Var inner = t.scale(0.5, t.mul(t.sigmoid(th), t.mul(diff, diff)));
  const std::array<Var, 1> wp{w};
  Var gw = t.gradient(inner, wp, {.retain_graph = true})[0];
  Var what = t.sub(w, t.scale(kAlpha, gw));
  Var md = t.sub(what, t.constant(kB));
  Var meta = t.scale(0.5, t.mul(md, md));
  const std::array<Var, 1> thp{th};
  const double analytic = t.nested_gradient(meta, thp)[0].item();

  const double sg = 1.0 / (1.0 + std::exp(-kTheta));
  const double what_v = kW - kAlpha * sg * (kW - kA);
  const double expected = (what_v - kB) * (-kAlpha) * sg * (1.0 - sg) * (kW - kA);

  GradCheckResult r;
  r.name = "bilevel.scalar-closed-form";
  r.tol = 1e-10;
  r.n_coords = 1;
  r.max_abs_analytic = std::fabs(analytic);
  r.max_rel_err = std::fabs(analytic - expected) / std::max(1.0, std::fabs(expected));
  r.pass = r.max_rel_err <= r.tol;
  return r;
}

GradCheckResult run_meta_gradcheck(uint64_t seed, bool corrupt_first) {
  DataBundle data = tiny_bundle(seed, false);
  Trainer tr(data, tiny_encoder(), tiny_train(seed, StrategyKind::Selar));
  const Trainer::Batch batch = tr.sample_batch();
  const auto analytic = meta_analytic(tr, batch, /*wrt_gate=*/false);
  const ParamStore theta = tr.weighting();
  Objective f = [&tr, &batch](const ParamStore& p) {
    tr.weighting() = p;
    return meta_objective(tr, batch);
  };
  GradCheckResult r = check_gradients("meta.outer-gradient", theta, f, analytic, 1e-4, 1e-4,
                                      corrupt_first);
  tr.weighting() = theta;
  return r;
}

GradCheckResult run_hint_gate_gradcheck(uint64_t seed) {
  DataBundle data = tiny_bundle(seed, true);
  Trainer tr(data, tiny_encoder(), tiny_train(seed, StrategyKind::SelarHint));
  const Trainer::Batch batch = tr.sample_batch();

  Tape t0;
  Trainer::Bound b0 = tr.bind(t0, false, false, true);
  Var loss0 = tr.train_loss(t0, b0, batch.primary, batch, /*weighted=*/true, /*with_aux=*/true);
  const auto analytic = grads_by_name(t0, loss0, b0.theta_h);

  const ParamStore gate = tr.hint_gate();
  Objective f = [&tr, &batch](const ParamStore& p) {
    tr.hint_gate() = p;
    Tape t;
    Trainer::Bound b = tr.bind(t, false, false, false);
    return tr.train_loss(t, b, batch.primary, batch, true, true).item();
  };
  GradCheckResult r = check_gradients("hint.gate-train-loss", gate, f, analytic, 1e-4, 1e-4);
  tr.hint_gate() = gate;
  return r;
}

GradCheckResult run_zero_alpha_check(uint64_t seed) {
  DataBundle data = tiny_bundle(seed, false);
  TrainConfig cfg = tiny_train(seed, StrategyKind::Selar);
  cfg.alpha = 0.0;
  Trainer tr(data, tiny_encoder(), cfg);
  const Trainer::Batch batch = tr.sample_batch();
  const auto analytic = meta_analytic(tr, batch, false);
  GradCheckResult r;
  r.name = "meta.zero-alpha";
  r.tol = 0.0;
  for (const auto& [name, g] : analytic) {
    for (int64_t i = 0; i < g.numel(); ++i) {
      r.max_abs_analytic = std::max(r.max_abs_analytic, std::fabs(g.at(i)));
      ++r.n_coords;
    }
  }
  r.max_rel_err = r.max_abs_analytic;
  r.pass = r.max_abs_analytic == 0.0;
  return r;
}

std::vector<GradCheckResult> run_all_gradchecks(uint64_t seed) {
  std::vector<GradCheckResult> out = run_op_gradchecks(seed);
  out.push_back(run_composite_gradcheck(seed));
  out.push_back(run_scalar_bilevel_check());
  out.push_back(run_meta_gradcheck(seed));
  out.push_back(run_hint_gate_gradcheck(seed));
  out.push_back(run_zero_alpha_check(seed));
  return out;
}

}  // namespace selar
