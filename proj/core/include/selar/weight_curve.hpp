#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selar/params.hpp"

namespace selar {

struct WeightCurveOptions {
  double loss_lo = 0.0;
  double loss_hi = 5.0;
  double loss_step = 0.05;
  std::vector<double> labels = {0.0, 1.0};
};

// CSV table of the learned weighting function: for every task (primary and
// auxiliary), label value, and loss on the grid, the weight V and the
// adjusted loss V * loss. In hint mode the hint-loss slot of the embedding
// is set equal to the loss. Floats carry 6 significant digits.
std::string weight_curve_csv(const ParamStore& weight_params, const std::string& prefix,
                             int32_t n_aux, bool hint_mode,
                             const WeightCurveOptions& opts = {});

}  // namespace selar
