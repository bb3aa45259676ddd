#pragma once

#include <string>
#include <vector>

#include "selar/config.hpp"
#include "selar/metapath.hpp"
#include "selar/trainer.hpp"

namespace selar {

// Everything one run needs, resolved for a specific seed: the loaded graph,
// the primary task, and auxiliary pair labels sampled from each composed
// meta-path relation (negatives drawn within the path's endpoint types).
struct PreparedData {
  DataBundle bundle;
  std::vector<MetaPathSpec> specs;  // aux task t+1 came from specs[t]
};

PreparedData prepare_data(const ExperimentConfig& cfg, uint64_t seed, bool need_hub);

struct RunOutcome {
  std::string dir;
  std::string strategy;
  uint64_t seed = 0;
  double val_metric = 0.0;
  double test_metric = 0.0;
  int64_t best_iteration = -1;
};

// One (strategy, seed) cell: trains, then writes config.json, history.csv,
// params.bin, and weight_curve.csv (when a weighting net exists) into
// run_dir. On error a _FAILED marker with the message is left behind and the
// error propagates.
RunOutcome run_single(const ExperimentConfig& cfg, const PreparedData& data,
                      const std::string& strategy, uint64_t seed,
                      const std::string& run_dir);

// The full grid. Data is prepared once per seed and shared across
// strategies; out_dir collects per-run directories plus runs.csv (one row
// per run) and summary.csv (mean test metric per strategy).
std::vector<RunOutcome> run_experiment(const ExperimentConfig& cfg);

}  // namespace selar
