#include "selar/weight_curve.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "selar/error.hpp"
#include "selar/weighting.hpp"

namespace selar {

std::string weight_curve_csv(const ParamStore& weight_params, const std::string& prefix,
                             int32_t n_aux, bool hint_mode,
                             const WeightCurveOptions& opts) {
  if (opts.loss_step <= 0 || opts.loss_hi < opts.loss_lo) {
    throw Error::config("weight curve: bad loss grid");
  }
  if (opts.labels.empty()) throw Error::config("weight curve: no label values");

  const int64_t steps = static_cast<int64_t>(
      std::floor((opts.loss_hi - opts.loss_lo) / opts.loss_step + 1e-9));

  std::ostringstream os;
  os << "task,label,loss,weight,adjusted_loss\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  for (int32_t task = 0; task <= n_aux; ++task) {
    for (double label : opts.labels) {
      for (int64_t i = 0; i <= steps; ++i) {
        const double loss = opts.loss_lo + static_cast<double>(i) * opts.loss_step;
        const SampleEmbedding e = SampleEmbedding::make(
            task, n_aux, loss, label, hint_mode,
            hint_mode ? std::optional<double>(loss) : std::nullopt);
        const double w = weight_net_value(weight_params, prefix, e);
        os << task << ',' << fmt(label) << ',' << fmt(loss) << ',' << fmt(w) << ','
           << fmt(w * loss) << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace selar
