#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "selar/params.hpp"

namespace selar {

struct GradCheckResult {
  std::string name;
  double max_rel_err = 0.0;       // max |analytic - fd| / max(1, |analytic|, |fd|)
  double max_abs_analytic = 0.0;  // largest analytic entry seen
  int64_t n_coords = 0;
  double tol = 0.0;
  bool pass = false;
};

using Objective = std::function<double(const ParamStore&)>;

// Central differences against analytic gradients, every coordinate of every
// tensor in params. corrupt_first nudges the first analytic entry by 1e-3,
// a negative control that must fail.
GradCheckResult check_gradients(const std::string& name, const ParamStore& params,
                                const Objective& f,
                                const std::map<std::string, Tensor>& analytic,
                                double tol, double step = 1e-5,
                                bool corrupt_first = false);

// One check per tape op (plus the composite loss ops), inputs kept away
// from kinks and domain edges.
std::vector<GradCheckResult> run_op_gradchecks(uint64_t seed);

// Two message-passing layers, a pair head, and a mean binary loss.
GradCheckResult run_composite_gradcheck(uint64_t seed);

// One-dimensional bilevel problem with a closed-form outer derivative.
GradCheckResult run_scalar_bilevel_check();

// Finite differences through the full cross-validated outer objective with
// respect to the weighting net, on a small synthetic bundle.
GradCheckResult run_meta_gradcheck(uint64_t seed, bool corrupt_first = false);

// Finite differences of the gated training loss with respect to the hint
// gate net.
GradCheckResult run_hint_gate_gradcheck(uint64_t seed);

// With a zero inner step size the outer gradient must vanish identically.
GradCheckResult run_zero_alpha_check(uint64_t seed);

// Everything above in one list, for the command line and the test suite.
std::vector<GradCheckResult> run_all_gradchecks(uint64_t seed);

}  // namespace selar
