#include "selar/loaders.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "selar/error.hpp"

namespace selar {

namespace {

// Ids above this are treated as file corruption rather than data.
constexpr int64_t kMaxId = 10'000'000;

struct LineReader {
  std::ifstream is;
  std::string path;
  int64_t lineno = 0;

  explicit LineReader(const std::string& p) : is(p), path(p) {
    if (!is) throw Error::data("cannot open " + p);
  }

  std::string where() const { return path + ":" + std::to_string(lineno); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error::data(where() + ": " + msg);
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      size_t i = line.find_first_not_of(" \t");
      if (i == std::string::npos || line[i] == '#') continue;
      fields.clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) fields.push_back(tok);
      return true;
    }
    return false;
  }

  int64_t to_id(const std::string& tok) const {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      fail("expected an integer, got '" + tok + "'");
    }
    if (v < 0) fail("negative id '" + tok + "'");
    if (v > kMaxId) fail("id '" + tok + "' exceeds the supported range");
    return v;
  }

  double to_real(const std::string& tok) const {
    try {
      size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail("expected a real number, got '" + tok + "'");
    }
  }
};

}  // namespace

KgDataset load_kg_dataset(const std::string& interactions_path,
                          const std::string& triples_path) {
  struct Interaction {
    int64_t user, item;
    int8_t y;
  };
  std::vector<Interaction> interactions;
  int64_t max_user = -1, max_item = -1;
  {
    LineReader r(interactions_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 3) r.fail("expected 'user item label'");
      const int64_t u = r.to_id(f[0]);
      const int64_t i = r.to_id(f[1]);
      const int64_t y = r.to_id(f[2]);
      if (y != 0 && y != 1) r.fail("label must be 0 or 1");
      interactions.push_back({u, i, static_cast<int8_t>(y)});
      max_user = std::max(max_user, u);
      max_item = std::max(max_item, i);
    }
  }
  if (interactions.empty()) {
    throw Error::data(interactions_path + ": no interactions");
  }

  struct Triple {
    int64_t head, rel, tail;
  };
  std::vector<Triple> triples;
  int64_t max_entity = max_item;
  {
    LineReader r(triples_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 3) r.fail("expected 'head relation tail'");
      const int64_t h = r.to_id(f[0]);
      const int64_t rel = r.to_id(f[1]);
      const int64_t t = r.to_id(f[2]);
      triples.push_back({h, rel, t});
      max_entity = std::max({max_entity, h, t});
    }
  }

  KgDataset ds;
  ds.n_users = max_user + 1;
  ds.n_items = max_item + 1;
  ds.n_entities = max_entity + 1;
  if (ds.n_users + ds.n_entities > kMaxId) {
    throw Error::data("kg dataset: node count exceeds the supported range");
  }

  HeteroGraphBuilder b;
  const int32_t user_t = b.add_node_type("user");
  const int32_t item_t = b.add_node_type("item");
  const bool has_pure_entities = ds.n_entities > ds.n_items;
  const int32_t entity_t = has_pure_entities ? b.add_node_type("entity") : -1;

  b.add_nodes(user_t, ds.n_users);
  b.add_nodes(item_t, ds.n_items);
  if (has_pure_entities) b.add_nodes(entity_t, ds.n_entities - ds.n_items);

  auto entity_type = [&](int64_t e) { return e < ds.n_items ? item_t : entity_t; };

  const int32_t ui_t = b.add_edge_type("user-item", user_t, item_t);
  std::set<std::pair<int64_t, int64_t>> ui_seen;
  for (const auto& it : interactions) {
    if (it.y == 1 && ui_seen.emplace(it.user, it.item).second) {
      b.add_edge(ui_t, ds.user_node(it.user), ds.entity_node(it.item));
    }
  }

  // A relation that connects more than one (source type, destination type)
  // pair is split per pair, since an edge type carries exactly one pair.
  std::map<int64_t, std::set<std::pair<int32_t, int32_t>>> rel_pairs;
  for (const auto& t : triples) {
    rel_pairs[t.rel].emplace(entity_type(t.head), entity_type(t.tail));
  }
  const std::vector<std::string> type_names = {"user", "item", "entity"};
  std::map<std::pair<int64_t, std::pair<int32_t, int32_t>>, int32_t> rel_edge_type;
  for (const auto& [rel, pairs] : rel_pairs) {
    for (const auto& pr : pairs) {
      std::string name = "r" + std::to_string(rel);
      if (pairs.size() > 1) {
        name += ":" + type_names[static_cast<size_t>(pr.first)] + "-" +
                type_names[static_cast<size_t>(pr.second)];
      }
      rel_edge_type[{rel, pr}] = b.add_edge_type(name, pr.first, pr.second);
    }
  }
  for (const auto& t : triples) {
    const auto key = std::make_pair(
        t.rel, std::make_pair(entity_type(t.head), entity_type(t.tail)));
    b.add_edge(rel_edge_type.at(key), ds.entity_node(t.head), ds.entity_node(t.tail));
  }

  ds.graph = b.build();

  ds.primary.task_id = 0;
  ds.primary.pairs.reserve(interactions.size());
  for (const auto& it : interactions) {
    ds.primary.pairs.push_back({ds.user_node(it.user), ds.entity_node(it.item), it.y});
  }
  return ds;
}

TypedDataset load_typed_graph(const std::string& nodes_path,
                              const std::string& edges_path,
                              const std::string& labels_path) {
  struct NodeRow {
    std::string type;
    std::vector<double> feats;
  };
  std::map<int64_t, NodeRow> rows;
  int64_t feat_width = -1;
  {
    LineReader r(nodes_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() < 2) r.fail("expected 'node_id type_name [features...]'");
      const int64_t id = r.to_id(f[0]);
      NodeRow row;
      row.type = f[1];
      for (size_t i = 2; i < f.size(); ++i) row.feats.push_back(r.to_real(f[i]));
      if (feat_width < 0) {
        feat_width = static_cast<int64_t>(row.feats.size());
      } else if (static_cast<int64_t>(row.feats.size()) != feat_width) {
        r.fail("feature width differs from earlier rows");
      }
      if (!rows.emplace(id, std::move(row)).second) {
        r.fail("duplicate node id " + std::to_string(id));
      }
    }
  }
  if (rows.empty()) throw Error::data(nodes_path + ": no nodes");
  const int64_t n = static_cast<int64_t>(rows.size());
  if (rows.rbegin()->first != n - 1) {
    throw Error::data(nodes_path + ": node ids must be exactly 0.." +
                      std::to_string(n - 1));
  }

  HeteroGraphBuilder b;
  std::map<std::string, int32_t> type_ids;
  for (const auto& [id, row] : rows) {
    auto it = type_ids.find(row.type);
    if (it == type_ids.end()) {
      it = type_ids.emplace(row.type, b.add_node_type(row.type)).first;
    }
    b.add_node(it->second);
  }

  if (feat_width > 0) {
    Tensor features({n, feat_width});
    for (const auto& [id, row] : rows) {
      for (int64_t j = 0; j < feat_width; ++j) features.at(id, j) = row.feats[static_cast<size_t>(j)];
    }
    b.set_features(std::move(features));
  }

  {
    LineReader r(edges_path);
    std::vector<std::string> f;
    std::map<std::string, int32_t> edge_ids;
    std::vector<int32_t> src_of, dst_of;
    auto node_type = [&](int64_t v) {
      return type_ids.at(rows.at(v).type);
    };
    while (r.next(f)) {
      if (f.size() != 3) r.fail("expected 'src dst edge_type'");
      const int64_t u = r.to_id(f[0]);
      const int64_t v = r.to_id(f[1]);
      if (u >= n || v >= n) r.fail("edge endpoint is not a known node");
      const std::string& ename = f[2];
      auto it = edge_ids.find(ename);
      if (it == edge_ids.end()) {
        const int32_t id = b.add_edge_type(ename, node_type(u), node_type(v));
        it = edge_ids.emplace(ename, id).first;
        src_of.push_back(node_type(u));
        dst_of.push_back(node_type(v));
      } else if (src_of[static_cast<size_t>(it->second)] != node_type(u) ||
                 dst_of[static_cast<size_t>(it->second)] != node_type(v)) {
        r.fail("edge type " + ename + " used with inconsistent endpoint types");
      }
      b.add_edge(it->second, u, v);
    }
  }

  TypedDataset ds;
  ds.node_labels.assign(static_cast<size_t>(n), -1);
  {
    LineReader r(labels_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 2) r.fail("expected 'node_id class_id'");
      const int64_t id = r.to_id(f[0]);
      const int64_t cls = r.to_id(f[1]);
      if (id >= n) r.fail("label references unknown node " + std::to_string(id));
      if (ds.node_labels[static_cast<size_t>(id)] != -1) {
        r.fail("duplicate label for node " + std::to_string(id));
      }
      ds.node_labels[static_cast<size_t>(id)] = static_cast<int32_t>(cls);
      ds.n_classes = std::max(ds.n_classes, static_cast<int32_t>(cls) + 1);
    }
  }

  ds.graph = b.build();
  return ds;
}

std::vector<int64_t> TypedDataset::labeled_nodes() const {
  std::vector<int64_t> out;
  for (size_t i = 0; i < node_labels.size(); ++i) {
    if (node_labels[i] >= 0) out.push_back(static_cast<int64_t>(i));
  }
  return out;
}

}  // namespace selar
