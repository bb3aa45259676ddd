#include "selar/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "selar/error.hpp"

namespace selar {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error::config(where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
}

// Unknown keys are hard errors: a typo in a hyperparameter name must not
// silently fall back to a default.
void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  require_object(j, where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int64_t get_int(const json& j, const std::string& where, const char* key, int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad(where, std::string("'") + key + "' must be an integer");
  return v.get<int64_t>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(where, std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) bad(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

SynthConfig parse_synth(const json& j) {
  const std::string where = "dataset.synth";
  require_keys(j, where,
               {"n_per_type", "n_node_types", "n_edge_types", "edge_prob", "planted_edge_seq",
                "signal_strength", "base_positive_rate", "n_primary_pairs"});
  SynthConfig s;
  s.n_per_type = get_int(j, where, "n_per_type", s.n_per_type);
  s.n_node_types = static_cast<int32_t>(get_int(j, where, "n_node_types", s.n_node_types));
  s.n_edge_types = static_cast<int32_t>(get_int(j, where, "n_edge_types", s.n_edge_types));
  s.edge_prob = get_number(j, where, "edge_prob", s.edge_prob);
  s.signal_strength = get_number(j, where, "signal_strength", s.signal_strength);
  s.base_positive_rate = get_number(j, where, "base_positive_rate", s.base_positive_rate);
  s.n_primary_pairs = get_int(j, where, "n_primary_pairs", s.n_primary_pairs);
  if (j.contains("planted_edge_seq")) {
    const json& arr = j.at("planted_edge_seq");
    if (!arr.is_array()) bad(where, "'planted_edge_seq' must be an array of edge type ids");
    s.planted_edge_seq.clear();
    for (const json& v : arr) {
      if (!v.is_number_integer()) bad(where, "'planted_edge_seq' entries must be integers");
      s.planted_edge_seq.push_back(v.get<int32_t>());
    }
  }
  return s;
}

DatasetConfig parse_dataset(const json& j) {
  const std::string where = "dataset";
  require_keys(j, where, {"kind", "interactions", "triples", "nodes", "edges", "labels", "synth"});
  DatasetConfig d;
  d.kind = get_string(j, where, "kind", d.kind);
  d.interactions = get_string(j, where, "interactions", "");
  d.triples = get_string(j, where, "triples", "");
  d.nodes = get_string(j, where, "nodes", "");
  d.edges = get_string(j, where, "edges", "");
  d.labels = get_string(j, where, "labels", "");
  if (j.contains("synth")) d.synth = parse_synth(j.at("synth"));
  return d;
}

EncoderConfig parse_encoder(const json& j) {
  const std::string where = "encoder";
  require_keys(j, where,
               {"arch", "num_layers", "hidden_dim", "embed_dim", "gat_heads", "gat_slope",
                "sgc_hops", "gin_eps"});
  EncoderConfig e;
  e.arch = encoder_arch_from_string(get_string(j, where, "arch", "gcn"));
  e.num_layers = static_cast<int32_t>(get_int(j, where, "num_layers", e.num_layers));
  e.hidden_dim = get_int(j, where, "hidden_dim", e.hidden_dim);
  e.embed_dim = get_int(j, where, "embed_dim", e.embed_dim);
  e.gat_heads = static_cast<int32_t>(get_int(j, where, "gat_heads", e.gat_heads));
  e.gat_slope = get_number(j, where, "gat_slope", e.gat_slope);
  e.sgc_hops = static_cast<int32_t>(get_int(j, where, "sgc_hops", e.sgc_hops));
  e.gin_eps = get_number(j, where, "gin_eps", e.gin_eps);
  return e;
}

SplitSpec parse_split(const json& j) {
  const std::string where = "train.split";
  require_keys(j, where, {"train_frac", "val_frac", "test_frac", "stratified"});
  SplitSpec s;
  s.train_frac = get_number(j, where, "train_frac", s.train_frac);
  s.val_frac = get_number(j, where, "val_frac", s.val_frac);
  s.test_frac = get_number(j, where, "test_frac", s.test_frac);
  s.stratified = get_bool(j, where, "stratified", s.stratified);
  return s;
}

TrainConfig parse_train(const json& j) {
  const std::string where = "train";
  require_keys(j, where,
               {"alpha", "beta", "iterations", "folds", "batch_primary", "batch_aux",
                "eval_every", "patience", "average_folds", "force_unit_weights",
                "weight_net_hidden", "split"});
  TrainConfig t;
  t.alpha = get_number(j, where, "alpha", t.alpha);
  t.beta = get_number(j, where, "beta", t.beta);
  t.iterations = get_int(j, where, "iterations", t.iterations);
  t.folds = static_cast<int32_t>(get_int(j, where, "folds", t.folds));
  t.batch_primary = get_int(j, where, "batch_primary", t.batch_primary);
  t.batch_aux = get_int(j, where, "batch_aux", t.batch_aux);
  t.eval_every = get_int(j, where, "eval_every", t.eval_every);
  t.patience = static_cast<int32_t>(get_int(j, where, "patience", t.patience));
  t.average_folds = get_bool(j, where, "average_folds", t.average_folds);
  t.force_unit_weights = get_bool(j, where, "force_unit_weights", t.force_unit_weights);
  t.weight_net_hidden = get_int(j, where, "weight_net_hidden", t.weight_net_hidden);
  if (j.contains("split")) t.split = parse_split(j.at("split"));
  return t;
}

LabelGenConfig parse_labels(const json& j) {
  const std::string where = "labels";
  require_keys(j, where, {"n_pos", "n_neg"});
  LabelGenConfig l;
  l.n_pos = get_int(j, where, "n_pos", l.n_pos);
  l.n_neg = get_int(j, where, "n_neg", l.n_neg);
  return l;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw Error::config("dataset: missing " + what + " path");
  if (!std::filesystem::exists(path))
    throw Error::config("dataset: " + what + " file does not exist: " + path);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.kind == "kg") {
    require_file(dataset.interactions, "interactions");
    require_file(dataset.triples, "triples");
  } else if (dataset.kind == "typed") {
    require_file(dataset.nodes, "nodes");
    require_file(dataset.edges, "edges");
    require_file(dataset.labels, "labels");  // the primary task
  } else if (dataset.kind == "synth") {
    SynthConfig s = dataset.synth;
    s.seed = 1;  // per-run seed substitutes later; validate the rest
    s.validate();
  } else {
    throw Error::config("dataset.kind must be kg, typed, or synth, got '" + dataset.kind + "'");
  }
  for (const auto& path : metapaths)
    if (path.empty()) throw Error::config("metapaths: empty edge-type sequence");
  encoder.validate();
  train.validate();
  if (labels.n_pos < 1 || labels.n_neg < 1)
    throw Error::config("labels: n_pos and n_neg must be >= 1");
  if (strategies.empty()) throw Error::config("strategies: need at least one");
  for (const std::string& s : strategies) strategy_from_string(s);
  if (seeds.empty()) throw Error::config("seeds: need at least one");
  if (out_dir.empty()) throw Error::config("out_dir must not be empty");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error::config(std::string("config parse: ") + e.what());
  }
  require_keys(j, "config",
               {"dataset", "metapaths", "encoder", "train", "labels", "strategies", "seeds",
                "out_dir"});
  ExperimentConfig c;
  if (j.contains("dataset")) c.dataset = parse_dataset(j.at("dataset"));
  if (j.contains("encoder")) c.encoder = parse_encoder(j.at("encoder"));
  if (j.contains("train")) c.train = parse_train(j.at("train"));
  if (j.contains("labels")) c.labels = parse_labels(j.at("labels"));
  if (j.contains("metapaths")) {
    const json& arr = j.at("metapaths");
    if (!arr.is_array()) bad("metapaths", "must be an array of edge-type name arrays");
    c.metapaths.clear();
    for (const json& path : arr) {
      if (!path.is_array()) bad("metapaths", "each entry must be an array of edge-type names");
      std::vector<std::string> names;
      for (const json& name : path) {
        if (!name.is_string()) bad("metapaths", "edge-type names must be strings");
        names.push_back(name.get<std::string>());
      }
      c.metapaths.push_back(std::move(names));
    }
  }
  if (j.contains("strategies")) {
    const json& arr = j.at("strategies");
    if (!arr.is_array()) bad("strategies", "must be an array of strategy names");
    c.strategies.clear();
    for (const json& s : arr) {
      if (!s.is_string()) bad("strategies", "entries must be strings");
      c.strategies.push_back(s.get<std::string>());
    }
  }
  if (j.contains("seeds")) {
    const json& arr = j.at("seeds");
    if (!arr.is_array()) bad("seeds", "must be an array of integers");
    c.seeds.clear();
    for (const json& s : arr) {
      if (!s.is_number_integer() || s.get<int64_t>() < 0)
        bad("seeds", "entries must be non-negative integers");
      c.seeds.push_back(s.get<uint64_t>());
    }
  }
  c.out_dir = get_string(j, "config", "out_dir", c.out_dir);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::data("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["dataset"]["kind"] = dataset.kind;
  if (!dataset.interactions.empty()) j["dataset"]["interactions"] = dataset.interactions;
  if (!dataset.triples.empty()) j["dataset"]["triples"] = dataset.triples;
  if (!dataset.nodes.empty()) j["dataset"]["nodes"] = dataset.nodes;
  if (!dataset.edges.empty()) j["dataset"]["edges"] = dataset.edges;
  if (!dataset.labels.empty()) j["dataset"]["labels"] = dataset.labels;
  if (dataset.kind == "synth") {
    json& s = j["dataset"]["synth"];
    s["n_per_type"] = dataset.synth.n_per_type;
    s["n_node_types"] = dataset.synth.n_node_types;
    s["n_edge_types"] = dataset.synth.n_edge_types;
    s["edge_prob"] = dataset.synth.edge_prob;
    s["planted_edge_seq"] = dataset.synth.planted_edge_seq;
    s["signal_strength"] = dataset.synth.signal_strength;
    s["base_positive_rate"] = dataset.synth.base_positive_rate;
    s["n_primary_pairs"] = dataset.synth.n_primary_pairs;
  }
  j["metapaths"] = metapaths;
  j["encoder"]["arch"] = to_string(encoder.arch);
  j["encoder"]["num_layers"] = encoder.num_layers;
  j["encoder"]["hidden_dim"] = encoder.hidden_dim;
  j["encoder"]["embed_dim"] = encoder.embed_dim;
  j["encoder"]["gat_heads"] = encoder.gat_heads;
  j["encoder"]["gat_slope"] = encoder.gat_slope;
  j["encoder"]["sgc_hops"] = encoder.sgc_hops;
  j["encoder"]["gin_eps"] = encoder.gin_eps;
  j["train"]["alpha"] = train.alpha;
  j["train"]["beta"] = train.beta;
  j["train"]["iterations"] = train.iterations;
  j["train"]["folds"] = train.folds;
  j["train"]["batch_primary"] = train.batch_primary;
  j["train"]["batch_aux"] = train.batch_aux;
  j["train"]["eval_every"] = train.eval_every;
  j["train"]["patience"] = train.patience;
  j["train"]["average_folds"] = train.average_folds;
  j["train"]["force_unit_weights"] = train.force_unit_weights;
  j["train"]["weight_net_hidden"] = train.weight_net_hidden;
  j["train"]["split"]["train_frac"] = train.split.train_frac;
  j["train"]["split"]["val_frac"] = train.split.val_frac;
  j["train"]["split"]["test_frac"] = train.split.test_frac;
  j["train"]["split"]["stratified"] = train.split.stratified;
  j["labels"]["n_pos"] = labels.n_pos;
  j["labels"]["n_neg"] = labels.n_neg;
  j["strategies"] = strategies;
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  return j.dump(2) + "\n";
}

}  // namespace selar
