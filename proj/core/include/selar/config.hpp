#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selar/encoder.hpp"
#include "selar/synth.hpp"
#include "selar/trainer.hpp"

namespace selar {

// Where the graph and primary labels come from.
//   kg     user-item interactions plus entity triples
//   typed  explicit node/edge/label files
//   synth  generated, with a planted relational signal
struct DatasetConfig {
  std::string kind = "synth";
  std::string interactions;  // kg
  std::string triples;       // kg
  std::string nodes;         // typed
  std::string edges;         // typed
  std::string labels;        // typed
  SynthConfig synth;         // synth (its seed is overridden per run)
};

// Auxiliary label sampling per composed meta-path relation.
struct LabelGenConfig {
  int64_t n_pos = 200;
  int64_t n_neg = 200;
};

// One experiment: a dataset, one encoder, a set of strategies and seeds.
// The JSON form mirrors these fields as nested sections; unknown keys are
// hard errors. Per-run seed and strategy live in the seeds/strategies lists,
// not inside the train section.
struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<std::vector<std::string>> metapaths;  // edge-type name sequences
  EncoderConfig encoder;
  TrainConfig train;
  LabelGenConfig labels;
  std::vector<std::string> strategies{"selar"};
  std::vector<uint64_t> seeds{1};
  std::string out_dir = "runs";

  void validate() const;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

}  // namespace selar
