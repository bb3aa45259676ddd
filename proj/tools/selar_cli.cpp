#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selar/config.hpp"
#include "selar/error.hpp"
#include "selar/experiment.hpp"
#include "selar/gradcheck.hpp"
#include "selar/metapath.hpp"
#include "selar/params.hpp"
#include "selar/synth.hpp"
#include "selar/weight_curve.hpp"
#include "selar/weighting.hpp"

namespace {

using namespace selar;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data("cannot write " + path);
  out << content;
}

int cmd_enumerate(const std::string& config_path, uint64_t seed_override, bool has_seed) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  const uint64_t seed = has_seed ? seed_override : cfg.seeds.front();
  ExperimentConfig probe = cfg;
  probe.metapaths.clear();  // only the graph is needed here
  PreparedData data = prepare_data(probe, seed, /*need_hub=*/false);
  const HeteroGraph& g = data.bundle.graph;

  const auto specs = enumerate_composable_specs(g, 2, 4);
  const auto ranked = rank_specs_by_positives(g, specs);
  std::printf("%-40s %12s\n", "meta-path", "pairs");
  for (const auto& [spec, count] : ranked)
    std::printf("%-40s %12lld\n", spec.to_name(g).c_str(), static_cast<long long>(count));
  if (ranked.empty()) std::printf("(no composable meta-paths of length 2-4)\n");
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_override,
              uint64_t seed_override, bool has_seed, const std::string& strategy_override) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (has_seed) cfg.seeds = {seed_override};
  if (!strategy_override.empty()) {
    strategy_from_string(strategy_override);
    cfg.strategies = {strategy_override};
  }
  const auto outcomes = run_experiment(cfg);
  std::printf("%-14s %6s %12s %12s %8s\n", "strategy", "seed", "val", "test", "best_it");
  for (const RunOutcome& o : outcomes)
    std::printf("%-14s %6llu %12.6f %12.6f %8lld\n", o.strategy.c_str(),
                static_cast<unsigned long long>(o.seed), o.val_metric, o.test_metric,
                static_cast<long long>(o.best_iteration));
  std::printf("wrote %s/summary.csv\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_gradcheck(uint64_t seed, bool corrupt) {
  std::vector<GradCheckResult> results = run_op_gradchecks(seed);
  results.push_back(run_composite_gradcheck(seed));
  results.push_back(run_scalar_bilevel_check());
  results.push_back(run_meta_gradcheck(seed, corrupt));
  results.push_back(run_hint_gate_gradcheck(seed));
  results.push_back(run_zero_alpha_check(seed));

  bool all_pass = true;
  for (const GradCheckResult& r : results) {
    std::printf("%-34s max_rel_err %.3e  tol %.1e  coords %5lld  %s\n", r.name.c_str(),
                r.max_rel_err, r.tol, static_cast<long long>(r.n_coords),
                r.pass ? "PASS" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  const GradCheckResult& za = results.back();
  std::printf("zero-alpha outer gradient max|g| = %.3e\n", za.max_abs_analytic);
  return all_pass ? 0 : 1;
}

int cmd_synth_data(const std::string& config_path, const std::string& out_dir,
                   uint64_t seed_override, bool has_seed) {
  SynthConfig sc;
  uint64_t seed = 1;
  if (!config_path.empty()) {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
    if (cfg.dataset.kind != "synth")
      throw Error::config("synth-data needs a config with dataset.kind = synth");
    sc = cfg.dataset.synth;
    seed = cfg.seeds.front();
  }
  if (has_seed) seed = seed_override;
  sc.seed = seed;
  SynthDataset ds = synth_hetero(sc);
  std::filesystem::create_directories(out_dir);

  std::string nodes;
  for (int64_t v = 0; v < ds.graph.num_nodes(); ++v)
    nodes += std::to_string(v) + " " +
             ds.graph.node_type_names[static_cast<size_t>(ds.graph.node_type_of[static_cast<size_t>(v)])] +
             "\n";
  write_text(out_dir + "/nodes.txt", nodes);

  std::string edges;
  for (size_t e = 0; e < ds.graph.adjacency.size(); ++e)
    for (const auto& [u, v] : ds.graph.adjacency[e].entries())
      edges += std::to_string(u) + " " + std::to_string(v) + " " + ds.graph.edge_type_names[e] +
               "\n";
  write_text(out_dir + "/edges.txt", edges);

  ds.primary.save(out_dir + "/pairs.txt");
  std::printf("wrote %s/{nodes.txt,edges.txt,pairs.txt}  (%lld nodes, planted %s)\n",
              out_dir.c_str(), static_cast<long long>(ds.graph.num_nodes()),
              ds.planted.to_name(ds.graph).c_str());
  return 0;
}

int cmd_dump_weights(const std::string& checkpoint, const std::string& out_path) {
  ParamStore store = ParamStore::load(checkpoint);
  if (!store.has("wnet.meta"))
    throw Error::data("checkpoint has no weighting net (missing wnet.meta)");
  const Tensor& meta = store.at("wnet.meta");
  if (meta.numel() != 2) throw Error::data("wnet.meta must have 2 entries");
  const int32_t n_aux = static_cast<int32_t>(meta.at(0));
  const bool hint = meta.at(1) != 0.0;
  const std::string csv = weight_curve_csv(store, "wnet.", n_aux, hint);
  if (out_path.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_text(out_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous-graph training with meta-learned auxiliary task weighting"};
  app.require_subcommand(1);

  std::string config_path, out_dir, strategy, checkpoint, out_file;
  uint64_t seed = 0;

  auto* enumerate = app.add_subcommand("enumerate-metapaths",
                                       "list composable meta-paths with pair counts");
  enumerate->add_option("--config", config_path, "experiment config JSON")->required();
  auto* enum_seed = enumerate->add_option("--seed", seed, "dataset seed override");

  auto* train = app.add_subcommand("train", "run the strategy x seed grid");
  train->add_option("--config", config_path, "experiment config JSON")->required();
  train->add_option("--out", out_dir, "output directory override");
  auto* train_seed = train->add_option("--seed", seed, "single seed override");
  train->add_option("--strategy", strategy, "single strategy override");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gradcheck->add_option("--seed", seed, "check seed")->default_val(1);
  bool corrupt = false;
  gradcheck->add_flag("--corrupt", corrupt, "negative control: corrupt one analytic entry");

  auto* synth = app.add_subcommand("synth-data", "generate a synthetic dataset on disk");
  synth->add_option("--config", config_path, "experiment config JSON (synth section)");
  synth->add_option("--out", out_dir, "output directory")->required();
  auto* synth_seed = synth->add_option("--seed", seed, "generation seed");

  auto* dump = app.add_subcommand("dump-weights", "weight curve CSV from a checkpoint");
  dump->add_option("--checkpoint", checkpoint, "params.bin from a run")->required();
  dump->add_option("--out", out_file, "write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return cmd_enumerate(config_path, seed, enum_seed->count() > 0);
    if (train->parsed())
      return cmd_train(config_path, out_dir, seed, train_seed->count() > 0, strategy);
    if (gradcheck->parsed()) return cmd_gradcheck(seed, corrupt);
    if (synth->parsed()) return cmd_synth_data(config_path, out_dir, seed, synth_seed->count() > 0);
    if (dump->parsed()) return cmd_dump_weights(checkpoint, out_file);
  } catch (const selar::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
