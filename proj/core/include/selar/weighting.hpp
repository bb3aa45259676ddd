#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "selar/ops.hpp"
#include "selar/params.hpp"

namespace selar {

// Per-sample descriptor fed to the weighting function:
//   [loss, task one-hot (primary + n_aux slots), label]
// and in hint mode an extra hint-loss slot after the loss:
//   [loss, hint_loss, task one-hot, label]
// Loss and label entries are treated as data: gradients never flow back
// through them into the model.
struct SampleEmbedding {
  std::vector<double> values;

  static int64_t width(int32_t n_aux, bool hint_mode) {
    return (hint_mode ? 2 : 1) + (n_aux + 1) + 1;
  }

  static SampleEmbedding make(int32_t task_id, int32_t n_aux, double loss,
                              double label, bool hint_mode,
                              std::optional<double> hint_loss = {});
};

// Rows = samples.
Tensor embeddings_matrix(std::span<const SampleEmbedding> embeddings);

// Two-layer MLP with sigmoid output mapping each embedding row to a weight
// in (0,1). Biases start at zero so initial weights sit near one half.
void init_weight_net(ParamStore& store, std::mt19937_64& rng,
                     const std::string& prefix, int64_t input_width,
                     int64_t hidden = 100);

// xi {n, width} -> weights {n}
Var weight_net_apply(Tape& t, const VarMap& params, const std::string& prefix, Var xi);

// Plain-value twin for a single embedding; bitwise-identical to the tape
// path on the same parameters.
double weight_net_value(const ParamStore& params, const std::string& prefix,
                        const SampleEmbedding& e);

int64_t weight_net_input_width(const ParamStore& params, const std::string& prefix);

// gate * learner + (1 - gate) * hint, elementwise over {n}
Var combine_probs(Var learner, Var hint, Var gate);
// same, with one gate per row of {n, C} distributions
Var combine_dists(Var learner, Var hint, Var gate);

double combine_value(double learner, double hint, double gate);
std::vector<double> combine_dist_value(const std::vector<double>& learner,
                                       const std::vector<double>& hint, double gate);

}  // namespace selar
