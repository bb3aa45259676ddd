#include "selar/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selar/error.hpp"
#include "selar/metrics.hpp"
#include "selar/rng.hpp"

namespace selar {

namespace {

constexpr const char* kWnetPrefix = "wnet.";
constexpr const char* kGatePrefix = "hintgate.";

TrainConfig validated(TrainConfig c) {
  c.validate();
  return c;
}

void check_pairs(const std::vector<PairSample>& pairs, int64_t n_nodes, const std::string& who) {
  if (pairs.empty()) throw Error::data(who + ": no samples");
  for (const PairSample& p : pairs) {
    if (p.u < 0 || p.u >= n_nodes || p.v < 0 || p.v >= n_nodes)
      throw Error::data(who + ": pair (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                        ") outside " + std::to_string(n_nodes) + " nodes");
    if (p.y != 0 && p.y != 1)
      throw Error::data(who + ": label " + std::to_string(p.y) + " is not 0/1");
  }
}

void check_bundle(const DataBundle& d, StrategyKind strat) {
  const int64_t nv = d.graph.num_nodes();
  if (d.primary.node_classification) {
    if (d.primary.nodes.size() != d.primary.classes.size())
      throw Error::data("primary task: node and class counts differ");
    if (d.primary.nodes.empty()) throw Error::data("primary task: no samples");
    if (d.primary.n_classes < 2) throw Error::data("primary task: need at least 2 classes");
    for (size_t i = 0; i < d.primary.nodes.size(); ++i) {
      int64_t v = d.primary.nodes[i];
      int32_t c = d.primary.classes[i];
      if (v < 0 || v >= nv)
        throw Error::data("primary task: node " + std::to_string(v) + " outside graph");
      if (c < 0 || c >= d.primary.n_classes)
        throw Error::data("primary task: class " + std::to_string(c) + " outside [0, " +
                          std::to_string(d.primary.n_classes) + ")");
    }
  } else {
    check_pairs(d.primary.pairs, nv, "primary task");
  }
  for (size_t t = 0; t < d.aux.size(); ++t)
    check_pairs(d.aux[t].labels.pairs, nv, "auxiliary task " + std::to_string(t + 1));
  if (strategy_uses_aux(strat) && d.aux.empty())
    throw Error::config(std::string(to_string(strat)) + " needs at least one auxiliary task");
  if (strategy_uses_hint(strat)) {
    if (!d.hub_graph) throw Error::config("selar-hint needs the hub-augmented graph");
    if (d.hub_graph->num_nodes() < nv)
      throw Error::data("hub graph has fewer nodes than the base graph");
  }
}

// Next k entries of an epoch queue; reshuffles when the epoch cannot finish
// the request. k is clamped to the queue size.
std::vector<int64_t> draw(std::vector<int64_t>& queue, size_t& pos, std::mt19937_64& rng,
                          int64_t want) {
  const int64_t n = static_cast<int64_t>(queue.size());
  const int64_t k = std::min(want, n);
  if (static_cast<int64_t>(pos) + k > n) {
    shuffle_pinned(queue, rng);
    pos = 0;
  }
  std::vector<int64_t> out(queue.begin() + pos, queue.begin() + pos + k);
  pos += static_cast<size_t>(k);
  return out;
}

void accumulate(std::map<std::string, Tensor>& total, const std::map<std::string, Tensor>& g) {
  for (const auto& [name, grad] : g) {
    auto it = total.find(name);
    if (it == total.end()) {
      total.emplace(name, grad);
    } else {
      for (int64_t i = 0; i < grad.numel(); ++i) it->second.at(i) += grad.at(i);
    }
  }
}

}  // namespace

StrategyKind strategy_from_string(const std::string& s) {
  if (s == "vanilla") return StrategyKind::Vanilla;
  if (s == "no-metapath") return StrategyKind::NoMetapath;
  if (s == "with-metapath") return StrategyKind::WithMetapath;
  if (s == "selar") return StrategyKind::Selar;
  if (s == "selar-hint") return StrategyKind::SelarHint;
  throw Error::config("unknown strategy '" + s +
                      "' (expected vanilla, no-metapath, with-metapath, selar, selar-hint)");
}

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Vanilla: return "vanilla";
    case StrategyKind::NoMetapath: return "no-metapath";
    case StrategyKind::WithMetapath: return "with-metapath";
    case StrategyKind::Selar: return "selar";
    case StrategyKind::SelarHint: return "selar-hint";
  }
  throw Error::contract("to_string: bad StrategyKind");
}

bool strategy_uses_aux(StrategyKind k) {
  return k == StrategyKind::WithMetapath || k == StrategyKind::Selar ||
         k == StrategyKind::SelarHint;
}

bool strategy_uses_weighting(StrategyKind k) {
  return k == StrategyKind::NoMetapath || k == StrategyKind::Selar ||
         k == StrategyKind::SelarHint;
}

bool strategy_uses_meta(StrategyKind k) { return strategy_uses_weighting(k); }

bool strategy_uses_hint(StrategyKind k) { return k == StrategyKind::SelarHint; }

std::vector<std::pair<int64_t, int64_t>> fold_bounds(int64_t n, int32_t folds) {
  if (folds < 1) throw Error::contract("fold_bounds: folds must be >= 1");
  if (n < folds)
    throw Error::data("fold_bounds: " + std::to_string(n) + " items cannot form " +
                      std::to_string(folds) + " folds");
  std::vector<std::pair<int64_t, int64_t>> out;
  for (int64_t c = 0; c < folds; ++c)
    out.emplace_back(c * n / folds, (c + 1) * n / folds);
  return out;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw Error::config("alpha must be >= 0");
  if (!(beta >= 0.0)) throw Error::config("beta must be >= 0");
  if (iterations < 0) throw Error::config("iterations must be >= 0");
  if (folds < 1) throw Error::config("folds must be >= 1");
  if (batch_primary < 1) throw Error::config("batch_primary must be >= 1");
  if (batch_aux < 1) throw Error::config("batch_aux must be >= 1");
  if (eval_every < 0) throw Error::config("eval_every must be >= 0");
  if (weight_net_hidden < 1) throw Error::config("weight_net_hidden must be >= 1");
}

Trainer::Trainer(const DataBundle& data, const EncoderConfig& enc_cfg, const TrainConfig& cfg)
    : data_(data),
      cfg_(validated(cfg)),
      enc_cfg_(enc_cfg),
      encoder_(data_.graph, enc_cfg, "enc."),
      heads_("head."),
      hint_heads_("hint.head.") {
  check_bundle(data_, cfg_.strategy);
  const bool hint = hint_mode();
  if (hint) hint_encoder_.emplace(*data_.hub_graph, enc_cfg_, "hint.enc.");

  const int64_t d = encoder_.output_dim();
  if (data_.primary.node_classification) {
    heads_.add_class_head(d, data_.primary.n_classes);
    if (hint) hint_heads_.add_class_head(d, data_.primary.n_classes);
  } else {
    heads_.add_pair_head(d, d);
    if (hint) hint_heads_.add_pair_head(d, d);
  }
  for (size_t t = 0; t < data_.aux.size(); ++t) {
    heads_.add_pair_head(d, d);
    if (hint) hint_heads_.add_pair_head(d, d);
  }

  // One init stream, consumed in a fixed order. The model draws first, so
  // every strategy starts from identical model parameters for a given seed.
  std::mt19937_64 rng = substream(cfg_.seed, "init");
  encoder_.init_params(model_, rng);
  heads_.init_params(model_, rng);
  if (hint) {
    hint_encoder_->init_params(model_, rng);
    hint_heads_.init_params(model_, rng);
  }
  if (strategy_uses_weighting(cfg_.strategy)) {
    init_weight_net(theta_, rng, kWnetPrefix, SampleEmbedding::width(n_aux(), hint),
                    cfg_.weight_net_hidden);
    Tensor meta({2});
    meta.at(0) = static_cast<double>(n_aux());
    meta.at(1) = hint ? 1.0 : 0.0;
    theta_.set("wnet.meta", meta);
  }
  if (hint)
    init_weight_net(theta_h_, rng, kGatePrefix, SampleEmbedding::width(n_aux(), true),
                    cfg_.weight_net_hidden);

  std::vector<int32_t> labels(static_cast<size_t>(data_.primary.size()));
  for (int64_t i = 0; i < data_.primary.size(); ++i)
    labels[static_cast<size_t>(i)] = primary_label(i);
  SplitSpec split = cfg_.split;
  split.seed = cfg_.seed;
  splits_ = split_indices(data_.primary.size(), labels, split);

  // Separate sampling streams per queue keep the primary index sequence
  // identical across strategies whether or not auxiliary batches are drawn.
  rng_primary_ = substream(cfg_.seed, "sampler.primary");
  queue_primary_ = splits_.train;
  shuffle_pinned(queue_primary_, rng_primary_);
  queue_aux_.resize(data_.aux.size());
  pos_aux_.assign(data_.aux.size(), 0);
  for (size_t t = 0; t < data_.aux.size(); ++t) {
    rng_aux_.push_back(substream(cfg_.seed, "sampler.aux" + std::to_string(t)));
    queue_aux_[t].resize(static_cast<size_t>(data_.aux[t].labels.size()));
    for (size_t i = 0; i < queue_aux_[t].size(); ++i)
      queue_aux_[t][i] = static_cast<int64_t>(i);
    shuffle_pinned(queue_aux_[t], rng_aux_[t]);
  }
}

int32_t Trainer::primary_label(int64_t i) const {
  return data_.primary.node_classification
             ? data_.primary.classes[static_cast<size_t>(i)]
             : static_cast<int32_t>(data_.primary.pairs[static_cast<size_t>(i)].y);
}

Trainer::Batch Trainer::sample_batch() {
  Batch b;
  b.primary = draw(queue_primary_, pos_primary_, rng_primary_, cfg_.batch_primary);
  b.aux.resize(data_.aux.size());
  for (size_t t = 0; t < data_.aux.size(); ++t)
    b.aux[t] = draw(queue_aux_[t], pos_aux_[t], rng_aux_[t], cfg_.batch_aux);
  return b;
}

Trainer::Bound Trainer::bind(Tape& t, bool w_grad, bool theta_grad, bool theta_h_grad) const {
  Bound b;
  b.w = bind_params(t, model_, w_grad);
  b.theta = bind_params(t, theta_, theta_grad);
  b.theta_h = bind_params(t, theta_h_, theta_h_grad);
  return b;
}

Var Trainer::encode_model(Tape& t, const VarMap& model) const {
  return encoder_.encode(t, model);
}

Var Trainer::encode_hint(Tape& t, const VarMap& model) const {
  return hint_encoder_->encode(t, model);
}

Trainer::TaskLosses Trainer::task_losses(Tape& t, const Bound& b, Var z, Var z_hint,
                                         int32_t task, std::span<const int64_t> idx,
                                         bool build_embeddings) const {
  const bool hint = hint_mode();
  const int64_t n = static_cast<int64_t>(idx.size());
  if (n == 0)
    throw Error::data("task " + std::to_string(task) + ": empty batch");

  TaskLosses out;
  const bool class_task = task == 0 && data_.primary.node_classification;
  const bool want_embeddings = build_embeddings || hint;

  if (class_task) {
    std::vector<int64_t> nodes(static_cast<size_t>(n));
    std::vector<int32_t> cls(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      nodes[static_cast<size_t>(i)] = data_.primary.nodes[static_cast<size_t>(idx[i])];
      cls[static_cast<size_t>(i)] = data_.primary.classes[static_cast<size_t>(idx[i])];
    }
    Var logits = heads_.class_logits(t, b.w, task, z, nodes);
    Var learner = softmax_cross_entropy(logits, cls);
    if (hint) {
      Var logits_h = hint_heads_.class_logits(t, b.w, task, z_hint, nodes);
      Var hint_l = softmax_cross_entropy(logits_h, cls);
      for (int64_t i = 0; i < n; ++i)
        out.embeddings.push_back(SampleEmbedding::make(
            task, n_aux(), learner.value().at(i), static_cast<double>(cls[static_cast<size_t>(i)]),
            true, hint_l.value().at(i)));
      Var xi = t.constant(embeddings_matrix(out.embeddings));
      Var gate = weight_net_apply(t, b.theta_h, kGatePrefix, xi);
      Var mixed = combine_dists(softmax_rows(logits), softmax_rows(logits_h), gate);
      const int64_t c = data_.primary.n_classes;
      Tensor onehot = Tensor::zeros({n, c});
      for (int64_t i = 0; i < n; ++i) onehot.at(i, cls[static_cast<size_t>(i)]) = 1.0;
      Var picked = row_sums(t.mul(mixed, t.constant(onehot)));
      out.losses = t.scale(-1.0, t.log(t.clamp(picked, kProbEps, 1.0)));
    } else {
      out.losses = learner;
      if (want_embeddings)
        for (int64_t i = 0; i < n; ++i)
          out.embeddings.push_back(SampleEmbedding::make(
              task, n_aux(), learner.value().at(i),
              static_cast<double>(cls[static_cast<size_t>(i)]), false));
    }
    return out;
  }

  const std::vector<PairSample>& pool =
      task == 0 ? data_.primary.pairs : data_.aux[static_cast<size_t>(task - 1)].labels.pairs;
  auto us = std::make_shared<std::vector<int64_t>>();
  auto vs = std::make_shared<std::vector<int64_t>>();
  us->reserve(static_cast<size_t>(n));
  vs->reserve(static_cast<size_t>(n));
  Tensor y({n});
  for (int64_t i = 0; i < n; ++i) {
    const PairSample& p = pool[static_cast<size_t>(idx[i])];
    us->push_back(p.u);
    vs->push_back(p.v);
    y.at(i) = static_cast<double>(p.y);
  }
  Var yv = t.constant(y);
  Var probs = heads_.pair_probs(t, b.w, task, z, us, vs);
  Var learner = binary_cross_entropy(probs, yv);
  if (hint) {
    Var probs_h = hint_heads_.pair_probs(t, b.w, task, z_hint, us, vs);
    Var hint_l = binary_cross_entropy(probs_h, yv);
    for (int64_t i = 0; i < n; ++i)
      out.embeddings.push_back(SampleEmbedding::make(task, n_aux(), learner.value().at(i),
                                                     y.at(i), true, hint_l.value().at(i)));
    Var xi = t.constant(embeddings_matrix(out.embeddings));
    Var gate = weight_net_apply(t, b.theta_h, kGatePrefix, xi);
    Var mixed = combine_probs(probs, probs_h, gate);
    out.losses = binary_cross_entropy(mixed, yv);
  } else {
    out.losses = learner;
    if (want_embeddings)
      for (int64_t i = 0; i < n; ++i)
        out.embeddings.push_back(
            SampleEmbedding::make(task, n_aux(), learner.value().at(i), y.at(i), false));
  }
  return out;
}

Var Trainer::train_loss(Tape& t, const Bound& b, std::span<const int64_t> primary_idx,
                        const Batch& batch, bool weighted, bool with_aux) const {
  Var z = encode_model(t, b.w);
  Var z_hint;
  if (hint_mode()) z_hint = encode_hint(t, b.w);

  std::vector<TaskBatchRef> refs;
  refs.push_back({0, primary_idx});
  if (with_aux) {
    if (batch.aux.size() != data_.aux.size())
      throw Error::contract("train_loss: batch has " + std::to_string(batch.aux.size()) +
                            " auxiliary slots, expected " + std::to_string(data_.aux.size()));
    for (size_t k = 0; k < batch.aux.size(); ++k)
      refs.push_back({static_cast<int32_t>(k + 1), batch.aux[k]});
  }

  const bool learn_weights = weighted && !cfg_.force_unit_weights;
  Var total;
  for (const TaskBatchRef& ref : refs) {
    TaskLosses tl = task_losses(t, b, z, z_hint, ref.task, ref.idx, learn_weights);
    const int64_t n = static_cast<int64_t>(ref.idx.size());
    Var term;
    if (weighted) {
      Var v = learn_weights
                  ? weight_net_apply(t, b.theta, kWnetPrefix,
                                     t.constant(embeddings_matrix(tl.embeddings)))
                  : t.constant(Tensor::ones({n}));
      term = t.scale(1.0 / static_cast<double>(n), t.sum(t.mul(v, tl.losses)));
    } else {
      term = t.scale(1.0 / static_cast<double>(n), t.sum(tl.losses));
    }
    total = total.valid() ? t.add(total, term) : term;
  }
  return total;
}

Var Trainer::primary_loss(Tape& t, const VarMap& model, std::span<const int64_t> primary_idx) const {
  const int64_t n = static_cast<int64_t>(primary_idx.size());
  if (n == 0) throw Error::data("primary_loss: empty sample set");
  Var z = encode_model(t, model);
  Var losses;
  if (data_.primary.node_classification) {
    std::vector<int64_t> nodes(static_cast<size_t>(n));
    std::vector<int32_t> cls(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      nodes[static_cast<size_t>(i)] = data_.primary.nodes[static_cast<size_t>(primary_idx[i])];
      cls[static_cast<size_t>(i)] = data_.primary.classes[static_cast<size_t>(primary_idx[i])];
    }
    losses = softmax_cross_entropy(heads_.class_logits(t, model, 0, z, nodes), cls);
  } else {
    auto us = std::make_shared<std::vector<int64_t>>();
    auto vs = std::make_shared<std::vector<int64_t>>();
    Tensor y({n});
    for (int64_t i = 0; i < n; ++i) {
      const PairSample& p = data_.primary.pairs[static_cast<size_t>(primary_idx[i])];
      us->push_back(p.u);
      vs->push_back(p.v);
      y.at(i) = static_cast<double>(p.y);
    }
    losses = binary_cross_entropy(heads_.pair_probs(t, model, 0, z, us, vs), t.constant(y));
  }
  return t.scale(1.0 / static_cast<double>(n), t.sum(losses));
}

VarMap Trainer::inner_update(Tape& t, const Bound& b, const Batch& batch,
                             std::span<const int64_t> train_subset) const {
  Var loss = train_loss(t, b, train_subset, batch, /*weighted=*/true,
                        strategy_uses_aux(cfg_.strategy));
  std::vector<Var> vars = vars_in_order(b.w);
  std::vector<Var> grads = t.gradient(loss, vars, {.retain_graph = true});
  VarMap hat;
  size_t i = 0;
  for (const auto& [name, v] : b.w)
    hat.emplace(name, t.sub(v, t.scale(cfg_.alpha, grads[i++])));
  return hat;
}

void Trainer::meta_step(const Batch& batch) {
  if (!strategy_uses_meta(cfg_.strategy))
    throw Error::config(std::string(to_string(cfg_.strategy)) + " has no meta step");
  const std::vector<int64_t>& p = batch.primary;
  const int64_t n = static_cast<int64_t>(p.size());
  const int32_t folds = cfg_.folds;
  const auto bounds = fold_bounds(n, folds);

  const bool hint = hint_mode();
  std::map<std::string, Tensor> total;
  for (int32_t c = 0; c < folds; ++c) {
    std::vector<int64_t> meta_idx, train_idx;
    if (folds == 1) {
      // Degenerate mode: the whole batch plays both roles.
      meta_idx = p;
      train_idx = p;
    } else {
      const auto [lo, hi] = bounds[static_cast<size_t>(c)];
      meta_idx.assign(p.begin() + lo, p.begin() + hi);
      train_idx.assign(p.begin(), p.begin() + lo);
      train_idx.insert(train_idx.end(), p.begin() + hi, p.end());
    }
    Tape tape;
    Bound b = bind(tape, /*w_grad=*/true, /*theta_grad=*/true, /*theta_h_grad=*/hint);
    VarMap hat = inner_update(tape, b, batch, train_idx);
    Var meta_loss = primary_loss(tape, hat, meta_idx);
    VarMap thetas = b.theta;
    thetas.insert(b.theta_h.begin(), b.theta_h.end());
    accumulate(total, grads_by_name(tape, meta_loss, thetas, /*nested=*/true));
  }
  if (cfg_.average_folds && folds > 1) {
    const double inv = 1.0 / static_cast<double>(folds);
    for (auto& [name, g] : total)
      for (int64_t i = 0; i < g.numel(); ++i) g.at(i) *= inv;
  }

  std::map<std::string, Tensor> g_theta, g_gate;
  for (auto& [name, g] : total) {
    if (name.rfind(kGatePrefix, 0) == 0) g_gate.emplace(name, std::move(g));
    else g_theta.emplace(name, std::move(g));
  }
  sgd_step(theta_, g_theta, cfg_.beta);
  if (hint) sgd_step(theta_h_, g_gate, cfg_.beta);
}

double Trainer::model_step(const Batch& batch) {
  Tape tape;
  Bound b = bind(tape, /*w_grad=*/true, /*theta_grad=*/false, /*theta_h_grad=*/false);
  Var loss = train_loss(tape, b, batch.primary, batch,
                        strategy_uses_weighting(cfg_.strategy),
                        strategy_uses_aux(cfg_.strategy));
  const double out = loss.item();
  sgd_step(model_, grads_by_name(tape, loss, b.w), cfg_.alpha);
  return out;
}

Trainer::Metrics Trainer::evaluate(std::span<const int64_t> primary_idx) const {
  const int64_t n = static_cast<int64_t>(primary_idx.size());
  if (n == 0) throw Error::data("evaluate: empty sample set");
  Tape tape;
  VarMap w = bind_params(tape, model_, /*requires_grad=*/false);
  Var z = encoder_.encode(tape, w);
  Metrics m;
  if (data_.primary.node_classification) {
    std::vector<int64_t> nodes(static_cast<size_t>(n));
    std::vector<int32_t> cls(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      nodes[static_cast<size_t>(i)] = data_.primary.nodes[static_cast<size_t>(primary_idx[i])];
      cls[static_cast<size_t>(i)] = data_.primary.classes[static_cast<size_t>(primary_idx[i])];
    }
    Var logits = heads_.class_logits(tape, w, 0, z, nodes);
    m.loss = tape.mean(softmax_cross_entropy(logits, cls)).item();
    const Tensor& lv = logits.value();
    std::vector<int32_t> pred(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      int32_t arg = 0;
      for (int32_t c = 1; c < data_.primary.n_classes; ++c)
        if (lv.at(i, c) > lv.at(i, arg)) arg = c;
      pred[static_cast<size_t>(i)] = arg;
    }
    m.metric = f1_scores(pred, cls, data_.primary.n_classes).micro;
  } else {
    auto us = std::make_shared<std::vector<int64_t>>();
    auto vs = std::make_shared<std::vector<int64_t>>();
    Tensor y({n});
    std::vector<int8_t> labels(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      const PairSample& p = data_.primary.pairs[static_cast<size_t>(primary_idx[i])];
      us->push_back(p.u);
      vs->push_back(p.v);
      y.at(i) = static_cast<double>(p.y);
      labels[static_cast<size_t>(i)] = p.y;
    }
    Var probs = heads_.pair_probs(tape, w, 0, z, us, vs);
    m.loss = tape.mean(binary_cross_entropy(probs, tape.constant(y))).item();
    std::vector<double> scores(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) scores[static_cast<size_t>(i)] = probs.value().at(i);
    m.metric = auc_score(scores, labels);
  }
  return m;
}

TrainResult Trainer::fit() {
  TrainResult res;
  double best = -std::numeric_limits<double>::infinity();
  ParamStore best_model;
  int32_t stale = 0;
  for (int64_t k = 1; k <= cfg_.iterations; ++k) {
    Batch batch = sample_batch();
    if (strategy_uses_meta(cfg_.strategy)) meta_step(batch);
    const double loss = model_step(batch);
    res.iterations_run = k;
    const bool last = k == cfg_.iterations;
    if (cfg_.eval_every > 0 && (k % cfg_.eval_every == 0 || last)) {
      Metrics val = evaluate(splits_.val);
      Metrics test = evaluate(splits_.test);
      res.history.push_back({k, loss, val.metric, test.metric});
      if (val.metric > best) {
        best = val.metric;
        best_model = model_;
        res.best_iteration = k;
        res.best_val = val.metric;
        res.test_at_best = test.metric;
        stale = 0;
      } else {
        ++stale;
        if (cfg_.patience > 0 && stale >= cfg_.patience) break;
      }
    }
  }
  res.model = res.best_iteration >= 0 ? best_model : model_;
  res.model_final = model_;
  res.weighting = theta_;
  res.hint_gate = theta_h_;
  return res;
}

}  // namespace selar
