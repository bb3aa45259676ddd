#pragma once

#include <random>
#include <string>

#include "selar/graph.hpp"
#include "selar/ops.hpp"
#include "selar/params.hpp"

namespace selar {

enum class EncoderArch { GCN, GAT, GIN, SGC };

EncoderArch encoder_arch_from_string(const std::string& s);
const char* to_string(EncoderArch a);

struct EncoderConfig {
  EncoderArch arch = EncoderArch::GCN;
  int32_t num_layers = 2;   // ignored by SGC
  int64_t hidden_dim = 32;
  int64_t embed_dim = 16;   // learnable input table when the graph has no features
  int32_t gat_heads = 1;
  double gat_slope = 0.2;
  int32_t sgc_hops = 2;
  double gin_eps = 0.0;

  void validate() const;
};

// Message passing runs on the homogenized structure (typed adjacencies
// unioned, symmetrized, self loops added); heterogeneity enters through the
// task set, not the propagation operator. The encoder copies what it needs
// from the graph at construction and holds no reference to it.
class Encoder {
 public:
  Encoder(const HeteroGraph& g, EncoderConfig cfg, std::string prefix = "enc.");

  // Appends this encoder's parameters, freshly initialized. Draw order is
  // fixed (embed table, then layers in order) so results depend only on the
  // rng state, not on names.
  void init_params(ParamStore& store, std::mt19937_64& rng) const;

  // Node representations {|V|, hidden_dim} from bound parameters.
  Var encode(Tape& t, const VarMap& params) const;

  int64_t output_dim() const { return cfg_.hidden_dim; }
  int64_t input_dim() const { return input_dim_; }
  int64_t num_nodes() const { return n_nodes_; }
  const EncoderConfig& config() const { return cfg_; }
  const std::string& prefix() const { return prefix_; }

 private:
  int64_t layer_in(int32_t layer) const;
  int64_t layer_out(int32_t layer) const;
  Var input(Tape& t, const VarMap& params) const;
  Var param(const VarMap& params, const std::string& name) const;

  EncoderConfig cfg_;
  std::string prefix_;
  int64_t n_nodes_ = 0;
  int64_t input_dim_ = 0;
  bool has_features_ = false;
  Tensor features_;
  Homogenized hom_;
};

// Uniform Glorot fill: limit sqrt(6 / (fan_in + fan_out)).
void glorot_fill(Tensor& t, int64_t fan_in, int64_t fan_out, std::mt19937_64& rng);

}  // namespace selar
