#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "selar/error.hpp"
#include "selar/graph.hpp"
#include "selar/hubs.hpp"
#include "selar/labels.hpp"
#include "selar/loaders.hpp"
#include "selar/metapath.hpp"
#include "selar/rng.hpp"
#include "selar/synth.hpp"

using namespace selar;

namespace {

#define CHECK_ERROR_KIND(expr, k)            \
  do {                                       \
    bool caught = false;                     \
    try {                                    \
      expr;                                  \
    } catch (const Error& e) {               \
      caught = true;                         \
      CHECK(e.kind() == (k));                \
    }                                        \
    CHECK(caught);                           \
  } while (0)

// Two-type toy: 3 users, 2 topics, edges user->topic and topic->user.
HeteroGraph toy_graph() {
  HeteroGraphBuilder b;
  const int32_t user = b.add_node_type("user");
  const int32_t topic = b.add_node_type("topic");
  b.add_nodes(user, 3);   // 0 1 2
  b.add_nodes(topic, 2);  // 3 4
  const int32_t likes = b.add_edge_type("likes", user, topic);
  const int32_t liked_by = b.add_edge_type("liked-by", topic, user);
  b.add_edge(likes, 0, 3);
  b.add_edge(likes, 1, 3);
  b.add_edge(likes, 2, 4);
  b.add_edge(liked_by, 3, 1);
  b.add_edge(liked_by, 3, 2);
  b.add_edge(liked_by, 4, 0);
  return b.build();
}

// Random typed graph for oracle comparisons.
HeteroGraph random_typed_graph(uint64_t seed, int32_t n_types, int64_t per_type,
                               int32_t n_edge_types, double p) {
  auto rng = substream(seed, "test.randgraph");
  HeteroGraphBuilder b;
  for (int32_t t = 0; t < n_types; ++t) b.add_node_type("T" + std::to_string(t));
  for (int32_t t = 0; t < n_types; ++t) b.add_nodes(t, per_type);
  for (int32_t e = 0; e < n_edge_types; ++e) {
    const int32_t src = static_cast<int32_t>(rand_index(rng, static_cast<uint64_t>(n_types)));
    const int32_t dst = static_cast<int32_t>(rand_index(rng, static_cast<uint64_t>(n_types)));
    b.add_edge_type("E" + std::to_string(e), src, dst);
    for (int64_t u = src * per_type; u < (src + 1) * per_type; ++u)
      for (int64_t v = dst * per_type; v < (dst + 1) * per_type; ++v)
        if (u != v && rand_uniform(rng) < p) b.add_edge(e, u, v);
  }
  return b.build();
}

std::string write_temp(const char* stem, const std::string& content) {
  const std::string path = (std::filesystem::temp_directory_path() / stem).string();
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("graph builder and validation") {
  HeteroGraph g = toy_graph();
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_node_types() == 2);
  CHECK(g.num_edge_types() == 2);
  CHECK(g.node_type_index("topic") == 1);
  CHECK(g.edge_type_index("likes") == 0);
  CHECK(g.nodes_of_type(1) == std::vector<int64_t>{3, 4});
  CHECK(g.count_of_type(0) == 3);
  CHECK(g.adjacency[0].has(0, 3));
  CHECK(g.is_heterogeneous());

  // endpoint typing is enforced
  HeteroGraphBuilder b;
  const int32_t a = b.add_node_type("a");
  const int32_t c = b.add_node_type("c");
  b.add_nodes(a, 2);
  b.add_nodes(c, 2);
  const int32_t e = b.add_edge_type("e", a, c);
  CHECK_ERROR_KIND(b.add_edge(e, 2, 0), ErrorKind::Data);  // src is type c
  CHECK_ERROR_KIND(b.add_edge(e, 0, 1), ErrorKind::Data);  // dst is type a

  // feature row count must match node count
  HeteroGraphBuilder fb;
  const int32_t t0 = fb.add_node_type("x");
  fb.add_nodes(t0, 3);
  fb.set_features(Tensor::ones({2, 4}));
  CHECK_ERROR_KIND((void)fb.build(), ErrorKind::Shape);

  CHECK(g.node_type_index("nope") == -1);
  CHECK(g.edge_type_index("nope") == -1);
}

TEST_CASE("homogenize builds the shared propagation structure") {
  HeteroGraph g = toy_graph();
  Homogenized h = homogenize(g);
  // symmetric union
  CHECK(h.adj_plain->has(0, 3));
  CHECK(h.adj_plain->has(3, 0));
  CHECK(!h.adj_plain->has(0, 0));
  CHECK(h.adj->has(0, 0));  // self loops added

  // every edge symmetric
  for (const auto& [u, v] : h.adj->entries()) CHECK(h.adj->has(v, u));

  // gcn norms are 1/sqrt(deg_u deg_v) over the looped adjacency
  const auto& entries = h.adj->entries();
  REQUIRE(h.gcn_norm.numel() == static_cast<int64_t>(entries.size()));
  std::vector<int64_t> deg(static_cast<size_t>(g.num_nodes()), 0);
  for (const auto& [u, v] : entries) ++deg[static_cast<size_t>(u)];
  for (size_t k = 0; k < entries.size(); ++k) {
    const double expect = 1.0 / std::sqrt(static_cast<double>(deg[entries[k].first]) *
                                          static_cast<double>(deg[entries[k].second]));
    CHECK(h.gcn_norm.at(static_cast<int64_t>(k)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("meta-path composability checks") {
  HeteroGraph g = toy_graph();
  CHECK_ERROR_KIND(check_composable(g, MetaPathSpec{}), ErrorKind::Data);
  CHECK_ERROR_KIND(check_composable(g, MetaPathSpec{{0, 0}}), ErrorKind::Data);  // topic != user
  CHECK_ERROR_KIND(check_composable(g, MetaPathSpec{{5}}), ErrorKind::Data);
  check_composable(g, MetaPathSpec{{0, 1}});  // user->topic->user
  CHECK(spec_src_type(g, MetaPathSpec{{0, 1}}) == 0);
  CHECK(spec_dst_type(g, MetaPathSpec{{0, 1}}) == 0);
  CHECK(MetaPathSpec{{0, 1}}.to_name(g) == "likes.liked-by");
}

TEST_CASE("composition equals the exhaustive path oracle") {
  // hand case first
  HeteroGraph g = toy_graph();
  MetaPathSpec spec{{0, 1}};
  SparseBool composed = compose_adjacency(g, spec);
  auto oracle = enumerate_paths_bruteforce(g, spec);
  auto ce = composed.entries();
  std::set<std::pair<int64_t, int64_t>> got(ce.begin(), ce.end());
  CHECK(got == oracle);
  // user0 likes topic3 liked-by users 1,2
  CHECK(composed.has(0, 1));
  CHECK(composed.has(0, 2));
  CHECK(!composed.has(0, 0) == !oracle.count({0, 0}));

  // randomized graphs, all lengths
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    HeteroGraph rg = random_typed_graph(seed, 2 + seed % 3, 6, 4, 0.25);
    for (const MetaPathSpec& s : enumerate_composable_specs(rg, 2, 4)) {
      SparseBool c = compose_adjacency(rg, s);
      auto flat = c.entries();
      std::set<std::pair<int64_t, int64_t>> cs(flat.begin(), flat.end());
      CHECK(cs == enumerate_paths_bruteforce(rg, s));
    }
  }
}

TEST_CASE("path enumeration caps its cost") {
  HeteroGraph big = random_typed_graph(3, 2, 150, 2, 0.01);
  MetaPathSpec spec = enumerate_composable_specs(big, 2, 2).front();
  CHECK_ERROR_KIND((void)enumerate_paths_bruteforce(big, spec, 100), ErrorKind::Contract);
}

TEST_CASE("spec enumeration and ranking") {
  HeteroGraph g = toy_graph();
  auto specs = enumerate_composable_specs(g, 2, 3);
  CHECK(!specs.empty());
  for (const auto& s : specs) {
    CHECK(s.length() >= 2);
    CHECK(s.length() <= 3);
    check_composable(g, s);
  }
  CHECK(std::is_sorted(specs.begin(), specs.end()));

  auto ranked = rank_specs_by_positives(g, specs);
  for (size_t i = 0; i + 1 < ranked.size(); ++i) CHECK(ranked[i].second >= ranked[i + 1].second);
  for (const auto& [spec, count] : ranked)
    CHECK(count == static_cast<int64_t>(compose_adjacency(g, spec).entries().size()));
}

TEST_CASE("paper-style schema yields the expected length-2 paths") {
  // papers/authors/subjects with PA, AP, PS, SP edge types
  HeteroGraphBuilder b;
  const int32_t P = b.add_node_type("paper");
  const int32_t A = b.add_node_type("author");
  const int32_t S = b.add_node_type("subject");
  b.add_nodes(P, 3);
  b.add_nodes(A, 2);
  b.add_nodes(S, 2);
  const int32_t pa = b.add_edge_type("PA", P, A);
  const int32_t ap = b.add_edge_type("AP", A, P);
  const int32_t ps = b.add_edge_type("PS", P, S);
  const int32_t sp = b.add_edge_type("SP", S, P);
  b.add_edge(pa, 0, 3);
  b.add_edge(ap, 3, 1);
  b.add_edge(ps, 1, 5);
  b.add_edge(sp, 5, 2);
  HeteroGraph g = b.build();

  auto specs = enumerate_composable_specs(g, 2, 2);
  auto has = [&](std::vector<int32_t> seq) {
    return std::find(specs.begin(), specs.end(), MetaPathSpec{std::move(seq)}) != specs.end();
  };
  CHECK(has({pa, ap}));  // paper-author-paper
  CHECK(has({ps, sp}));  // paper-subject-paper
  CHECK(has({ap, pa}));
  CHECK(!has({pa, ps}));  // author endpoint cannot feed PS

  // a schema with no composable pairs gives an empty listing
  HeteroGraphBuilder nb;
  const int32_t x = nb.add_node_type("x");
  const int32_t yy = nb.add_node_type("y");
  const int32_t z = nb.add_node_type("z");
  nb.add_nodes(x, 1);
  nb.add_nodes(yy, 1);
  nb.add_nodes(z, 1);
  nb.add_edge_type("xy", x, yy);
  nb.add_edge_type("zx", z, x);
  // xy ends at y, zx starts at z: nothing composes with xy; zx.xy works though
  auto none = enumerate_composable_specs(nb.build(), 2, 2);
  CHECK(none == std::vector<MetaPathSpec>{MetaPathSpec{{1, 0}}});
}

TEST_CASE("pair label sampling") {
  SparseBool m(6, 6,
               {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 0}, {5, 2}, {2, 2}});
  PairLabelSet l = build_pair_labels(m, 5, 7, 42, 3);
  CHECK(l.task_id == 3);
  CHECK(l.count_pos() == 5);
  CHECK(l.count_neg() == 7);
  std::set<std::pair<int64_t, int64_t>> seen;
  for (const PairSample& p : l.pairs) {
    CHECK(seen.insert({p.u, p.v}).second);  // unique
    if (p.y == 1) CHECK(m.has(p.u, p.v));
    else {
      CHECK(!m.has(p.u, p.v));
      CHECK(p.u != p.v);  // negative self pairs excluded by default
    }
  }
  // deterministic
  PairLabelSet l2 = build_pair_labels(m, 5, 7, 42, 3);
  CHECK(l == l2);
  PairLabelSet l3 = build_pair_labels(m, 5, 7, 43, 3);
  CHECK(l != l3);

  // infeasible requests name the shortfall: 8 nonzeros, 23 non-self zeros
  CHECK_ERROR_KIND((void)build_pair_labels(m, 9, 7, 1), ErrorKind::Data);
  CHECK_ERROR_KIND((void)build_pair_labels(m, 2, 24, 1), ErrorKind::Data);

  // candidate rectangle restricts negatives; exactly {(0,3),(1,2)} are free
  NegativeSamplingOptions opts;
  opts.candidate_rows = {0, 1};
  opts.candidate_cols = {1, 2, 3};
  PairLabelSet lr = build_pair_labels(m, 2, 2, 7, 0, opts);
  for (const PairSample& p : lr.pairs)
    if (p.y == 0) CHECK(((p.u == 0 && p.v == 3) || (p.u == 1 && p.v == 2)));
  CHECK_ERROR_KIND((void)build_pair_labels(m, 2, 3, 7, 0, opts), ErrorKind::Data);

  // allowing self pairs unlocks the 5 diagonal zeros; taking all 28 zeros
  // must include them
  NegativeSamplingOptions self_ok;
  self_ok.exclude_self_pairs = false;
  PairLabelSet ls = build_pair_labels(m, 0, 28, 11, 0, self_ok);
  int64_t diag = 0;
  for (const PairSample& p : ls.pairs) diag += (p.u == p.v);
  CHECK(diag == 5);

  // save / load round trip
  const std::string path =
      (std::filesystem::temp_directory_path() / "selar_labels_test.txt").string();
  l.save(path);
  CHECK(PairLabelSet::load(path) == l);
  std::filesystem::remove(path);

  const std::string mixed = write_temp("selar_labels_mixed.txt", "1 0 1 1\n2 0 2 0\n");
  CHECK_ERROR_KIND((void)PairLabelSet::load(mixed), ErrorKind::Data);
  std::filesystem::remove(mixed);
}

TEST_CASE("hub augmentation invariants") {
  HeteroGraph g = toy_graph();
  HeteroGraph h = augment_with_hubs(g);
  CHECK(h.num_nodes() == g.num_nodes() + g.num_node_types());
  CHECK(h.num_node_types() == g.num_node_types() + 1);
  CHECK(h.num_edge_types() == g.num_edge_types() + 2 * g.num_node_types());

  // original structure intact
  for (int32_t e = 0; e < g.num_edge_types(); ++e) {
    CHECK(h.edge_type_names[static_cast<size_t>(e)] == g.edge_type_names[static_cast<size_t>(e)]);
    for (const auto& [u, v] : g.adjacency[static_cast<size_t>(e)].entries())
      CHECK(h.adjacency[static_cast<size_t>(e)].has(u, v));
  }

  // each hub touches every node of its type, both directions
  for (int32_t t = 0; t < g.num_node_types(); ++t) {
    const int64_t hub = g.num_nodes() + t;
    const int32_t to_hub = h.edge_type_index("to-hub:" + g.node_type_names[static_cast<size_t>(t)]);
    const int32_t from_hub =
        h.edge_type_index("from-hub:" + g.node_type_names[static_cast<size_t>(t)]);
    REQUIRE(to_hub >= 0);
    REQUIRE(from_hub >= 0);
    for (int64_t v : g.nodes_of_type(t)) {
      CHECK(h.adjacency[static_cast<size_t>(to_hub)].has(v, hub));
      CHECK(h.adjacency[static_cast<size_t>(from_hub)].has(hub, v));
    }
  }
  h.validate();

  // features padded with zero rows
  HeteroGraphBuilder fb;
  const int32_t t0 = fb.add_node_type("n");
  fb.add_nodes(t0, 2);
  Tensor feats({2, 3});
  feats.at(0, 0) = 5.0;
  fb.set_features(feats);
  HeteroGraph fh = augment_with_hubs(fb.build());
  REQUIRE(fh.features.has_value());
  CHECK(fh.features->dim(0) == 3);
  CHECK(fh.features->at(0, 0) == 5.0);
  CHECK(fh.features->at(2, 0) == 0.0);

  // repeated augmentation stays well formed (fresh names)
  HeteroGraph hh = augment_with_hubs(h);
  hh.validate();
  CHECK(hh.num_nodes() == h.num_nodes() + h.num_node_types());
}

TEST_CASE("kg loader") {
  // 3 users, 4 entities (items 0..3), two relations
  const std::string inter = write_temp("selar_kg_inter.txt",
                                       "# user item label\n"
                                       "0 0 1\n"
                                       "0 1 0\n"
                                       "1 1 1\n"
                                       "2 2 1\n"
                                       "2 3 0\n");
  const std::string trip = write_temp("selar_kg_trip.txt",
                                      "0 0 1\n"
                                      "1 0 2\n"
                                      "2 1 3\n");
  KgDataset ds = load_kg_dataset(inter, trip);
  CHECK(ds.n_users == 3);
  CHECK(ds.n_items == 4);
  CHECK(ds.n_entities == 4);
  CHECK(ds.graph.num_nodes() == 7);
  CHECK(ds.graph.node_type_names[0] == "user");
  CHECK(ds.user_node(1) == 1);
  CHECK(ds.entity_node(0) == 3);

  // only positive interactions became edges
  const int32_t ui = ds.graph.edge_type_index("user-item");
  CHECK(ds.graph.adjacency[static_cast<size_t>(ui)].entries().size() == 3);
  CHECK(ds.graph.adjacency[static_cast<size_t>(ui)].has(0, ds.entity_node(0)));
  CHECK(!ds.graph.adjacency[static_cast<size_t>(ui)].has(0, ds.entity_node(1)));

  // all interactions, both labels, form the primary task
  CHECK(ds.primary.pairs.size() == 5);
  CHECK(ds.primary.count_pos() == 3);
  CHECK(ds.primary.task_id == 0);

  // relations became their own edge types
  CHECK(ds.graph.num_edge_types() == 3);  // user-item + r0 + r1

  std::filesystem::remove(inter);
  std::filesystem::remove(trip);

  const std::string bad = write_temp("selar_kg_bad.txt", "0 -3 1\n");
  const std::string empty_trip = write_temp("selar_kg_empty.txt", "# none\n");
  bool caught = false;
  try {
    (void)load_kg_dataset(bad, empty_trip);
  } catch (const Error& e) {
    caught = true;
    CHECK(std::string(e.what()).find(":1") != std::string::npos);  // path:line context
  }
  CHECK(caught);
  std::filesystem::remove(bad);
  std::filesystem::remove(empty_trip);
}

TEST_CASE("typed loader") {
  const std::string nodes = write_temp("selar_ty_nodes.txt",
                                       "0 paper 0.5 1.0\n"
                                       "1 paper 0.25 0.0\n"
                                       "2 author 1.0 1.0\n"
                                       "3 author 0.0 0.5\n"
                                       "4 paper 0.75 0.25\n");
  const std::string edges = write_temp("selar_ty_edges.txt",
                                       "0 2 writes\n"
                                       "1 2 writes\n"
                                       "4 3 writes\n"
                                       "2 0 wrote-by\n");
  const std::string labels = write_temp("selar_ty_labels.txt", "0 1\n1 0\n4 1\n");
  TypedDataset ds = load_typed_graph(nodes, edges, labels);
  CHECK(ds.graph.num_nodes() == 5);
  CHECK(ds.graph.num_node_types() == 2);
  CHECK(ds.graph.node_type_of[4] == 0);  // appearance order: paper first
  REQUIRE(ds.graph.features.has_value());
  CHECK(ds.graph.features->at(4, 0) == 0.75);
  CHECK(ds.n_classes == 2);
  CHECK(ds.node_labels[2] == -1);
  CHECK(ds.labeled_nodes() == std::vector<int64_t>{0, 1, 4});

  // inconsistent endpoint types for one edge name
  const std::string bad_edges = write_temp("selar_ty_bad_edges.txt",
                                           "0 2 writes\n"
                                           "2 0 writes\n");
  CHECK_ERROR_KIND((void)load_typed_graph(nodes, bad_edges, labels), ErrorKind::Data);

  // node ids must be dense 0..n-1
  const std::string gappy = write_temp("selar_ty_gappy.txt", "0 a\n2 a\n");
  const std::string no_edges = write_temp("selar_ty_noedges.txt", "# none\n");
  const std::string no_labels = write_temp("selar_ty_nolabels.txt", "0 0\n");
  CHECK_ERROR_KIND((void)load_typed_graph(gappy, no_edges, no_labels), ErrorKind::Data);

  // duplicate label
  const std::string dup = write_temp("selar_ty_dup.txt", "0 1\n0 0\n");
  CHECK_ERROR_KIND((void)load_typed_graph(nodes, edges, dup), ErrorKind::Data);

  for (const auto& p : {nodes, edges, labels, bad_edges, gappy, no_edges, no_labels, dup})
    std::filesystem::remove(p);
}

TEST_CASE("synthetic generator") {
  SynthConfig cfg;
  cfg.n_per_type = 30;
  cfg.n_node_types = 2;
  cfg.n_edge_types = 2;
  cfg.edge_prob = 0.08;
  cfg.planted_edge_seq = {0, 1};
  cfg.signal_strength = 1.0;
  cfg.base_positive_rate = 0.0;  // labels become exactly planted reachability
  cfg.n_primary_pairs = 60;
  cfg.seed = 17;

  SynthDataset ds = synth_hetero(cfg);
  CHECK(ds.graph.num_nodes() == 60);
  CHECK(ds.graph.num_edge_types() == 2);
  check_composable(ds.graph, ds.planted);
  CHECK(ds.planted.edge_seq == std::vector<int32_t>{0, 1});
  CHECK(ds.primary.pairs.size() == 60);

  SparseBool reach = compose_adjacency(ds.graph, ds.planted);
  for (const PairSample& p : ds.primary.pairs)
    CHECK(static_cast<bool>(p.y) == reach.has(p.u, p.v));

  // determinism
  SynthDataset ds2 = synth_hetero(cfg);
  CHECK(ds2.primary == ds.primary);
  CHECK(ds2.graph.node_type_of == ds.graph.node_type_of);
  for (int32_t e = 0; e < ds.graph.num_edge_types(); ++e)
    CHECK(ds2.graph.adjacency[static_cast<size_t>(e)] ==
          ds.graph.adjacency[static_cast<size_t>(e)]);

  SynthConfig bad = cfg;
  bad.n_node_types = 0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::Config);
  bad = cfg;
  bad.planted_edge_seq = {0, 0};  // does not compose around the type cycle
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::Config);
  bad = cfg;
  bad.edge_prob = 1.5;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::Config);
}
