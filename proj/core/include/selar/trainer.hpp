#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "selar/encoder.hpp"
#include "selar/graph.hpp"
#include "selar/heads.hpp"
#include "selar/labels.hpp"
#include "selar/params.hpp"
#include "selar/split.hpp"
#include "selar/weighting.hpp"

namespace selar {

// Training strategies, from plain single-task to the full bilevel scheme:
//   vanilla        primary task only, plain mean loss
//   no-metapath    primary only, loss weighting net trained by meta steps
//   with-metapath  primary + auxiliary tasks, plain mean losses
//   selar          primary + auxiliary, weighting net trained by meta steps
//   selar-hint     selar plus a second net on a hub-augmented graph whose
//                  predictions are gated into the training loss
enum class StrategyKind { Vanilla, NoMetapath, WithMetapath, Selar, SelarHint };

StrategyKind strategy_from_string(const std::string& s);
const char* to_string(StrategyKind k);
bool strategy_uses_aux(StrategyKind k);
bool strategy_uses_weighting(StrategyKind k);
bool strategy_uses_meta(StrategyKind k);
bool strategy_uses_hint(StrategyKind k);

struct TrainConfig {
  double alpha = 0.05;  // model learning rate (inner and outer)
  double beta = 0.05;   // weighting-net learning rate
  int64_t iterations = 200;
  int32_t folds = 3;    // meta cross-validation folds; 1 reuses the batch
  int64_t batch_primary = 48;
  int64_t batch_aux = 48;
  StrategyKind strategy = StrategyKind::Vanilla;
  uint64_t seed = 1;
  int64_t eval_every = 20;  // 0 disables periodic evaluation
  int32_t patience = 10;    // evaluations without improvement; <=0 disables
  bool average_folds = false;      // average fold gradients instead of summing
  bool force_unit_weights = false; // pin every sample weight to exactly 1
  int64_t weight_net_hidden = 100;
  SplitSpec split;

  void validate() const;
};

// Primary supervision: either labeled pairs (link prediction) or labeled
// nodes (classification).
struct PrimaryTask {
  bool node_classification = false;
  std::vector<PairSample> pairs;
  std::vector<int64_t> nodes;
  std::vector<int32_t> classes;
  int32_t n_classes = 0;

  int64_t size() const {
    return node_classification ? static_cast<int64_t>(nodes.size())
                               : static_cast<int64_t>(pairs.size());
  }
};

struct AuxTask {
  PairLabelSet labels;  // positions in DataBundle::aux define task ids 1..T
};

struct DataBundle {
  HeteroGraph graph;
  std::optional<HeteroGraph> hub_graph;  // required by selar-hint
  PrimaryTask primary;
  std::vector<AuxTask> aux;
};

struct EvalPoint {
  int64_t iteration = 0;
  double train_loss = 0;
  double val_metric = 0;
  double test_metric = 0;
};

// Contiguous fold boundaries over n items: fold c of C covers
// [c*n/C, (c+1)*n/C). Every fold is non-empty when n >= C.
std::vector<std::pair<int64_t, int64_t>> fold_bounds(int64_t n, int32_t folds);

struct TrainResult {
  ParamStore model;        // best-validation snapshot
  ParamStore model_final;  // parameters after the last iteration
  ParamStore weighting;    // loss-weighting net, when the strategy has one
  ParamStore hint_gate;    // prediction gate net, when the strategy has one
  std::vector<EvalPoint> history;
  double best_val = 0;
  double test_at_best = 0;
  int64_t best_iteration = -1;
  int64_t iterations_run = 0;
};

class Trainer {
 public:
  Trainer(const DataBundle& data, const EncoderConfig& enc_cfg, const TrainConfig& cfg);

  TrainResult fit();

  // The pieces fit() is made of, exposed so tests and tools can drive them.
  struct Batch {
    std::vector<int64_t> primary;               // indices into the train split
    std::vector<std::vector<int64_t>> aux;      // per task, indices into its pairs
  };
  Batch sample_batch();

  struct Bound {
    VarMap w;        // model: encoders + heads (+ the hint twins)
    VarMap theta;    // loss-weighting net
    VarMap theta_h;  // hint gate net
  };
  Bound bind(Tape& t, bool w_grad, bool theta_grad, bool theta_h_grad) const;

  // Multi-task training loss: sum over tasks of (possibly weighted) mean
  // per-sample loss. primary_idx selects the primary samples; aux samples
  // come from the batch when with_aux.
  Var train_loss(Tape& t, const Bound& b, std::span<const int64_t> primary_idx,
                 const Batch& batch, bool weighted, bool with_aux) const;

  // Plain mean primary loss of the learner alone (the meta objective).
  Var primary_loss(Tape& t, const VarMap& model, std::span<const int64_t> primary_idx) const;

  // One-step lookahead parameters under the current weighting, built on a
  // retained backward so they stay differentiable w.r.t. the weighting nets.
  VarMap inner_update(Tape& t, const Bound& b, const Batch& batch,
                      std::span<const int64_t> train_subset) const;

  // Cross-validated update of the weighting nets: each fold holds out part
  // of the primary batch, takes the lookahead on the rest, and contributes
  // the gradient of the held-out plain primary loss.
  void meta_step(const Batch& batch);

  // Gradient step on the model at fixed weighting nets; returns the loss.
  double model_step(const Batch& batch);

  struct Metrics {
    double loss = 0;
    double metric = 0;  // AUC for pair tasks, micro-F1 for classification
  };
  Metrics evaluate(std::span<const int64_t> primary_idx) const;

  ParamStore& model() { return model_; }
  ParamStore& weighting() { return theta_; }
  ParamStore& hint_gate() { return theta_h_; }
  const SplitIndices& splits() const { return splits_; }
  const TrainConfig& config() const { return cfg_; }
  int32_t n_aux() const { return static_cast<int32_t>(data_.aux.size()); }
  bool hint_mode() const { return strategy_uses_hint(cfg_.strategy); }

 private:
  struct TaskBatchRef {
    int32_t task = 0;
    std::span<const int64_t> idx;
  };

  // Per-sample training losses for one task plus the weighting embeddings
  // derived from their detached values.
  struct TaskLosses {
    Var losses;  // {n}
    std::vector<SampleEmbedding> embeddings;
  };
  TaskLosses task_losses(Tape& t, const Bound& b, Var z, Var z_hint, int32_t task,
                         std::span<const int64_t> idx, bool build_embeddings) const;

  Var encode_model(Tape& t, const VarMap& model) const;
  Var encode_hint(Tape& t, const VarMap& model) const;
  int32_t primary_label(int64_t i) const;

  DataBundle data_;
  TrainConfig cfg_;
  EncoderConfig enc_cfg_;
  Encoder encoder_;
  std::optional<Encoder> hint_encoder_;
  TaskHeads heads_;
  TaskHeads hint_heads_;
  ParamStore model_;
  ParamStore theta_;
  ParamStore theta_h_;
  SplitIndices splits_;

  // Independent sampling streams so the primary sequence is identical
  // across strategies that do and do not consume auxiliary batches.
  std::mt19937_64 rng_primary_;
  std::vector<std::mt19937_64> rng_aux_;
  std::vector<int64_t> queue_primary_;
  size_t pos_primary_ = 0;
  std::vector<std::vector<int64_t>> queue_aux_;
  std::vector<size_t> pos_aux_;
};

}  // namespace selar
