#include "selar/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "selar/error.hpp"
#include "selar/hubs.hpp"
#include "selar/loaders.hpp"
#include "selar/rng.hpp"
#include "selar/synth.hpp"
#include "selar/weight_curve.hpp"

namespace selar {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data("cannot write " + path);
  out << content;
  if (!out) throw Error::data("write failed: " + path);
}

int32_t edge_type_id(const HeteroGraph& g, const std::string& name) {
  for (size_t i = 0; i < g.edge_type_names.size(); ++i)
    if (g.edge_type_names[i] == name) return static_cast<int32_t>(i);
  throw Error::config("metapaths: unknown edge type '" + name + "'");
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, uint64_t seed, bool need_hub) {
  PreparedData out;
  if (cfg.dataset.kind == "kg") {
    KgDataset ds = load_kg_dataset(cfg.dataset.interactions, cfg.dataset.triples);
    out.bundle.graph = std::move(ds.graph);
    out.bundle.primary.pairs = std::move(ds.primary.pairs);
  } else if (cfg.dataset.kind == "typed") {
    TypedDataset ds = load_typed_graph(cfg.dataset.nodes, cfg.dataset.edges,
                                       cfg.dataset.labels);
    out.bundle.primary.node_classification = true;
    out.bundle.primary.nodes = ds.labeled_nodes();
    out.bundle.primary.n_classes = ds.n_classes;
    for (int64_t v : out.bundle.primary.nodes)
      out.bundle.primary.classes.push_back(ds.node_labels[static_cast<size_t>(v)]);
    out.bundle.graph = std::move(ds.graph);
  } else if (cfg.dataset.kind == "synth") {
    SynthConfig sc = cfg.dataset.synth;
    sc.seed = seed;
    SynthDataset ds = synth_hetero(sc);
    out.bundle.graph = std::move(ds.graph);
    out.bundle.primary.pairs = std::move(ds.primary.pairs);
  } else {
    throw Error::config("dataset.kind must be kg, typed, or synth");
  }

  const HeteroGraph& g = out.bundle.graph;
  int32_t task = 1;
  for (const std::vector<std::string>& names : cfg.metapaths) {
    MetaPathSpec spec;
    for (const std::string& name : names) spec.edge_seq.push_back(edge_type_id(g, name));
    check_composable(g, spec);
    SparseBool composed = compose_adjacency(g, spec);
    NegativeSamplingOptions opts;
    opts.candidate_rows = g.nodes_of_type(spec_src_type(g, spec));
    opts.candidate_cols = g.nodes_of_type(spec_dst_type(g, spec));
    const uint64_t label_seed = splitmix64(seed ^ fnv1a64(spec.to_name(g)));
    AuxTask aux;
    aux.labels =
        build_pair_labels(composed, cfg.labels.n_pos, cfg.labels.n_neg, label_seed, task, opts);
    out.bundle.aux.push_back(std::move(aux));
    out.specs.push_back(std::move(spec));
    ++task;
  }

  if (need_hub) out.bundle.hub_graph = augment_with_hubs(out.bundle.graph);
  return out;
}

RunOutcome run_single(const ExperimentConfig& cfg, const PreparedData& data,
                      const std::string& strategy, uint64_t seed,
                      const std::string& run_dir) {
  fs::create_directories(run_dir);
  try {
    TrainConfig tc = cfg.train;
    tc.strategy = strategy_from_string(strategy);
    tc.seed = seed;

    nlohmann::json snapshot = nlohmann::json::parse(cfg.to_json_text());
    snapshot["run"] = {{"strategy", strategy}, {"seed", seed}};
    write_file(run_dir + "/config.json", snapshot.dump(2) + "\n");

    Trainer tr(data.bundle, cfg.encoder, tc);
    TrainResult res = tr.fit();

    std::string hist = "iteration,strategy,train_loss,val_metric,test_metric\n";
    for (const EvalPoint& p : res.history)
      hist += std::to_string(p.iteration) + "," + strategy + "," + fmt(p.train_loss) + "," +
              fmt(p.val_metric) + "," + fmt(p.test_metric) + "\n";
    write_file(run_dir + "/history.csv", hist);

    ParamStore all = res.model;
    for (const auto& [name, t] : res.weighting) all.set(name, t);
    for (const auto& [name, t] : res.hint_gate) all.set(name, t);
    all.save(run_dir + "/params.bin");

    if (res.weighting.size() > 0) {
      const bool hint = strategy_uses_hint(tc.strategy);
      write_file(run_dir + "/weight_curve.csv",
                 weight_curve_csv(res.weighting, "wnet.", tr.n_aux(), hint));
    }

    RunOutcome o;
    o.dir = run_dir;
    o.strategy = strategy;
    o.seed = seed;
    o.best_iteration = res.best_iteration;
    if (res.best_iteration >= 0) {
      o.val_metric = res.best_val;
      o.test_metric = res.test_at_best;
    } else {
      // No evaluation happened during training (for instance zero
      // iterations): report the model as it stands.
      o.val_metric = tr.evaluate(tr.splits().val).metric;
      o.test_metric = tr.evaluate(tr.splits().test).metric;
    }
    return o;
  } catch (const std::exception& e) {
    std::ofstream marker(run_dir + "/_FAILED");
    marker << e.what() << "\n";
    throw;
  }
}

std::vector<RunOutcome> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool need_hub =
      std::any_of(cfg.strategies.begin(), cfg.strategies.end(),
                  [](const std::string& s) { return s == "selar-hint"; });
  fs::create_directories(cfg.out_dir);

  std::vector<RunOutcome> outcomes;
  for (uint64_t seed : cfg.seeds) {
    PreparedData data = prepare_data(cfg, seed, need_hub);
    for (const std::string& strategy : cfg.strategies) {
      const std::string dir =
          cfg.out_dir + "/" + strategy + "-seed" + std::to_string(seed);
      outcomes.push_back(run_single(cfg, data, strategy, seed, dir));
    }
  }

  std::string runs = "strategy,seed,val_metric,test_metric,best_iteration,dir\n";
  for (const RunOutcome& o : outcomes)
    runs += o.strategy + "," + std::to_string(o.seed) + "," + fmt(o.val_metric) + "," +
            fmt(o.test_metric) + "," + std::to_string(o.best_iteration) + "," + o.dir + "\n";
  write_file(cfg.out_dir + "/runs.csv", runs);

  std::string summary = "encoder";
  for (const std::string& s : cfg.strategies) summary += "," + s;
  summary += "\n";
  summary += to_string(cfg.encoder.arch);
  for (const std::string& s : cfg.strategies) {
    double total = 0.0;
    int64_t count = 0;
    for (const RunOutcome& o : outcomes)
      if (o.strategy == s) {
        total += o.test_metric;
        ++count;
      }
    summary += "," + fmt(count > 0 ? total / static_cast<double>(count) : 0.0);
  }
  summary += "\n";
  write_file(cfg.out_dir + "/summary.csv", summary);
  return outcomes;
}

}  // namespace selar
