#include "selar/encoder.hpp"

#include <cmath>

#include "selar/error.hpp"
#include "selar/rng.hpp"

namespace selar {

EncoderArch encoder_arch_from_string(const std::string& s) {
  if (s == "gcn") return EncoderArch::GCN;
  if (s == "gat") return EncoderArch::GAT;
  if (s == "gin") return EncoderArch::GIN;
  if (s == "sgc") return EncoderArch::SGC;
  throw Error::config("unknown encoder '" + s + "' (expected gcn|gat|gin|sgc)");
}

const char* to_string(EncoderArch a) {
  switch (a) {
    case EncoderArch::GCN: return "gcn";
    case EncoderArch::GAT: return "gat";
    case EncoderArch::GIN: return "gin";
    case EncoderArch::SGC: return "sgc";
  }
  return "?";
}

void EncoderConfig::validate() const {
  if (num_layers < 1) throw Error::config("encoder: num_layers must be >= 1");
  if (hidden_dim < 1) throw Error::config("encoder: hidden_dim must be >= 1");
  if (embed_dim < 1) throw Error::config("encoder: embed_dim must be >= 1");
  if (gat_heads < 1) throw Error::config("encoder: gat_heads must be >= 1");
  if (gat_slope <= 0.0) throw Error::config("encoder: gat_slope must be positive");
  if (sgc_hops < 0) throw Error::config("encoder: sgc_hops must be >= 0");
}

void glorot_fill(Tensor& t, int64_t fan_in, int64_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : t.values()) x = rand_range(rng, -limit, limit);
}

Encoder::Encoder(const HeteroGraph& g, EncoderConfig cfg, std::string prefix)
    : cfg_(cfg), prefix_(std::move(prefix)), n_nodes_(g.num_nodes()) {
  cfg_.validate();
  g.validate();
  if (n_nodes_ == 0) throw Error::data("encoder: empty graph");
  has_features_ = g.features.has_value();
  if (has_features_) {
    features_ = *g.features;
    input_dim_ = features_.cols();
  } else {
    input_dim_ = cfg_.embed_dim;
  }
  hom_ = homogenize(g);
}

int64_t Encoder::layer_in(int32_t layer) const {
  if (layer == 0) return input_dim_;
  if (cfg_.arch == EncoderArch::GAT) {
    // Hidden GAT layers concatenate their heads.
    return static_cast<int64_t>(cfg_.gat_heads) * cfg_.hidden_dim;
  }
  return cfg_.hidden_dim;
}

int64_t Encoder::layer_out(int32_t layer) const {
  if (cfg_.arch == EncoderArch::GAT && layer + 1 < cfg_.num_layers) {
    return static_cast<int64_t>(cfg_.gat_heads) * cfg_.hidden_dim;
  }
  return cfg_.hidden_dim;
}

void Encoder::init_params(ParamStore& store, std::mt19937_64& rng) const {
  if (!has_features_) {
    Tensor embed({n_nodes_, cfg_.embed_dim});
    const double limit = std::sqrt(3.0 / static_cast<double>(cfg_.embed_dim));
    for (double& x : embed.values()) x = rand_range(rng, -limit, limit);
    store.set(prefix_ + "embed", std::move(embed));
  }

  auto lname = [&](int32_t i) { return prefix_ + "layer" + std::to_string(i) + "."; };

  switch (cfg_.arch) {
    case EncoderArch::GCN:
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        Tensor w({layer_in(i), layer_out(i)});
        glorot_fill(w, layer_in(i), layer_out(i), rng);
        store.set(lname(i) + "W", std::move(w));
        store.set(lname(i) + "b", Tensor({1, layer_out(i)}));
      }
      break;
    case EncoderArch::GIN:
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        const int64_t in = layer_in(i), out = layer_out(i);
        Tensor w0({in, out}), w1({out, out});
        glorot_fill(w0, in, out, rng);
        glorot_fill(w1, out, out, rng);
        store.set(lname(i) + "mlp0.W", std::move(w0));
        store.set(lname(i) + "mlp0.b", Tensor({1, out}));
        store.set(lname(i) + "mlp1.W", std::move(w1));
        store.set(lname(i) + "mlp1.b", Tensor({1, out}));
      }
      break;
    case EncoderArch::GAT:
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        const int64_t in = layer_in(i);
        for (int32_t h = 0; h < cfg_.gat_heads; ++h) {
          const std::string hn = lname(i) + "head" + std::to_string(h) + ".";
          Tensor w({in, cfg_.hidden_dim});
          glorot_fill(w, in, cfg_.hidden_dim, rng);
          store.set(hn + "W", std::move(w));
          Tensor as({cfg_.hidden_dim, 1}), ad({cfg_.hidden_dim, 1});
          glorot_fill(as, cfg_.hidden_dim, 1, rng);
          glorot_fill(ad, cfg_.hidden_dim, 1, rng);
          store.set(hn + "att_src", std::move(as));
          store.set(hn + "att_dst", std::move(ad));
        }
        store.set(lname(i) + "b", Tensor({1, layer_out(i)}));
      }
      break;
    case EncoderArch::SGC: {
      Tensor w({input_dim_, cfg_.hidden_dim});
      glorot_fill(w, input_dim_, cfg_.hidden_dim, rng);
      store.set(prefix_ + "lin.W", std::move(w));
      store.set(prefix_ + "lin.b", Tensor({1, cfg_.hidden_dim}));
      break;
    }
  }
}

Var Encoder::param(const VarMap& params, const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw Error::contract("encoder: missing bound parameter " + name);
  }
  return it->second;
}

Var Encoder::input(Tape& t, const VarMap& params) const {
  if (has_features_) return t.constant(features_);
  return param(params, prefix_ + "embed");
}

Var Encoder::encode(Tape& t, const VarMap& params) const {
  Var x = input(t, params);
  auto lname = [&](int32_t i) { return prefix_ + "layer" + std::to_string(i) + "."; };

  switch (cfg_.arch) {
    case EncoderArch::GCN: {
      Var norm = t.constant(hom_.gcn_norm);
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        x = t.spmm(hom_.adj, norm, x);
        x = linear(x, param(params, lname(i) + "W"), param(params, lname(i) + "b"));
        if (i + 1 < cfg_.num_layers) x = t.relu(x);
      }
      return x;
    }
    case EncoderArch::GIN: {
      Var ones = t.constant(Tensor::ones({hom_.adj_plain->nnz()}));
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        Var agg = t.add(t.spmm(hom_.adj_plain, ones, x), t.scale(1.0 + cfg_.gin_eps, x));
        Var h = t.relu(linear(agg, param(params, lname(i) + "mlp0.W"),
                              param(params, lname(i) + "mlp0.b")));
        x = linear(h, param(params, lname(i) + "mlp1.W"),
                   param(params, lname(i) + "mlp1.b"));
        if (i + 1 < cfg_.num_layers) x = t.relu(x);
      }
      return x;
    }
    case EncoderArch::GAT: {
      for (int32_t i = 0; i < cfg_.num_layers; ++i) {
        const bool last = (i + 1 == cfg_.num_layers);
        Var out{};
        for (int32_t h = 0; h < cfg_.gat_heads; ++h) {
          const std::string hn = lname(i) + "head" + std::to_string(h) + ".";
          Var hw = t.matmul(x, param(params, hn + "W"));
          Var s_src = t.reshape(t.matmul(hw, param(params, hn + "att_src")), {n_nodes_});
          Var s_dst = t.reshape(t.matmul(hw, param(params, hn + "att_dst")), {n_nodes_});
          Var e = t.add(t.segment_gather(hom_.adj, s_src),
                        t.segment_gather_cols(hom_.adj, s_dst));
          Var alpha = neighbor_softmax(hom_.adj, t.leaky_relu(e, cfg_.gat_slope));
          Var head_out = t.spmm(hom_.adj, alpha, hw);
          if (h == 0) {
            out = head_out;
          } else {
            out = last ? t.add(out, head_out) : t.concat_cols(out, head_out);
          }
        }
        if (last && cfg_.gat_heads > 1) {
          out = t.scale(1.0 / static_cast<double>(cfg_.gat_heads), out);
        }
        x = add_rowvec(out, param(params, lname(i) + "b"));
        if (!last) x = t.relu(x);
      }
      return x;
    }
    case EncoderArch::SGC: {
      Var norm = t.constant(hom_.gcn_norm);
      for (int32_t h = 0; h < cfg_.sgc_hops; ++h) x = t.spmm(hom_.adj, norm, x);
      return linear(x, param(params, prefix_ + "lin.W"), param(params, prefix_ + "lin.b"));
    }
  }
  throw Error::contract("encoder: unknown architecture");
}

}  // namespace selar
