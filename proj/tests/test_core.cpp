#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "selar/error.hpp"
#include "selar/metrics.hpp"
#include "selar/ops.hpp"
#include "selar/params.hpp"
#include "selar/rng.hpp"
#include "selar/sparse_bool.hpp"
#include "selar/split.hpp"
#include "selar/tape.hpp"
#include "selar/tensor.hpp"

using namespace selar;

namespace {

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

#define CHECK_ERROR_KIND(expr, k)            \
  do {                                       \
    bool caught = false;                     \
    try {                                    \
      expr;                                  \
    } catch (const Error& e) {               \
      caught = true;                         \
      CHECK(kind_is(e, k));                  \
    }                                        \
    CHECK(caught);                           \
  } while (0)

std::string temp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("tensor shapes and access") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rank() == 2);
  t.at(1, 2) = 4.5;
  CHECK(t.at(5) == 4.5);  // row major
  CHECK(Tensor::scalar(3.0).item() == 3.0);
  CHECK(Tensor::ones({4}).at(3) == 1.0);
  CHECK(Tensor::full({2, 2}, -2.5).at(1, 1) == -2.5);
  Tensor r = Tensor::row({1.0, 2.0, 3.0});
  CHECK(r.dim(0) == 1);
  CHECK(r.dim(1) == 3);
  CHECK_ERROR_KIND((void)t.item(), ErrorKind::Shape);
  CHECK_ERROR_KIND((void)t.reshaped({4, 2}), ErrorKind::Shape);
  CHECK(t.reshaped({3, 2}).at(2, 1) == 4.5);
  t.at(0, 0) = std::nan("");
  CHECK(!t.all_finite());
}

TEST_CASE("rng substreams are named and deterministic") {
  auto a1 = substream(7, "init");
  auto a2 = substream(7, "init");
  auto b = substream(7, "sampler");
  CHECK(a1() == a2());
  CHECK(a1() == a2());
  auto a3 = substream(7, "init");
  auto b2 = substream(7, "sampler");
  CHECK(a3() != b2());  // different names, different streams

  auto rng = substream(1, "x");
  for (int i = 0; i < 1000; ++i) {
    const double u = rand_uniform(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rand_index(rng, 10) < 10);
  }
  CHECK_THROWS_AS((void)rand_index(rng, 0), Error);

  std::vector<int64_t> v{0, 1, 2, 3, 4, 5, 6, 7};
  auto r1 = substream(3, "s");
  auto r2 = substream(3, "s");
  auto w = v;
  shuffle_pinned(v, r1);
  shuffle_pinned(w, r2);
  CHECK(v == w);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int64_t>{0, 1, 2, 3, 4, 5, 6, 7});

  std::vector<int64_t> p{0, 1, 2, 3, 4};
  CHECK_ERROR_KIND(partial_shuffle(p, 9, r1), ErrorKind::Contract);
}

TEST_CASE("sparse bool semantics") {
  SparseBool s(3, 4, {{2, 1}, {0, 3}, {0, 3}, {1, 0}});  // dup collapses
  CHECK(s.entries().size() == 3);
  CHECK(s.entries()[0] == std::pair<int64_t, int64_t>{0, 3});  // sorted
  CHECK(s.has(2, 1));
  CHECK(!s.has(2, 2));
  CHECK(s.row_degree(0) == 1);

  SparseBool t = s.transposed();
  CHECK(t.rows() == 4);
  CHECK(t.has(1, 2));
  CHECK(t.transposed() == s);

  CHECK_ERROR_KIND(SparseBool(2, 2, {{2, 0}}), ErrorKind::Shape);

  // boolean product vs dense brute force, randomized
  auto rng = substream(11, "sparse");
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t n = 3 + static_cast<int64_t>(rand_index(rng, 4));
    const int64_t m = 3 + static_cast<int64_t>(rand_index(rng, 4));
    const int64_t k = 3 + static_cast<int64_t>(rand_index(rng, 4));
    std::vector<std::pair<int64_t, int64_t>> ae, be;
    std::vector<std::vector<bool>> ad(n, std::vector<bool>(m));
    std::vector<std::vector<bool>> bd(m, std::vector<bool>(k));
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < m; ++j)
        if (rand_uniform(rng) < 0.3) {
          ae.push_back({i, j});
          ad[i][j] = true;
        }
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < k; ++j)
        if (rand_uniform(rng) < 0.3) {
          be.push_back({i, j});
          bd[i][j] = true;
        }
    SparseBool a(n, m, ae), b2(m, k, be);
    SparseBool c = a.multiply(b2);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < k; ++j) {
        bool expect = false;
        for (int64_t l = 0; l < m; ++l) expect = expect || (ad[i][l] && bd[l][j]);
        CHECK(c.has(i, j) == expect);
      }
  }

  SparseBool id3 = SparseBool::identity(3);
  CHECK(id3.has(2, 2));
  SparseBool u = s.union_with(SparseBool(3, 4, {{2, 2}}));
  CHECK(u.has(2, 2));
  CHECK(u.has(0, 3));
  CHECK_ERROR_KIND(s.with_self_loops(), ErrorKind::Shape);  // needs square
  SparseBool sq(4, 4, {{0, 3}, {1, 0}, {2, 1}});
  SparseBool loops = sq.with_self_loops();
  CHECK(loops.has(0, 0));
  CHECK(loops.has(0, 3));
  CHECK(loops.with_self_loops() == loops);
}

TEST_CASE("tape forward and first-order gradients match closed forms") {
  Tape t;
  Var a = t.leaf(Tensor::scalar(0.8), true);
  Var b = t.leaf(Tensor::scalar(-1.3), true);
  // f = sigmoid(a) * b + exp(a*b)
  Var f = t.add(t.mul(t.sigmoid(a), b), t.exp(t.mul(a, b)));
  const double av = 0.8, bv = -1.3;
  const double sg = 1.0 / (1.0 + std::exp(-av));
  CHECK(f.item() == doctest::Approx(sg * bv + std::exp(av * bv)).epsilon(1e-14));

  std::vector<Var> params{a, b};
  auto g = t.gradient(f, params);
  const double dfa = sg * (1 - sg) * bv + bv * std::exp(av * bv);
  const double dfb = sg + av * std::exp(av * bv);
  CHECK(g[0].item() == doctest::Approx(dfa).epsilon(1e-12));
  CHECK(g[1].item() == doctest::Approx(dfb).epsilon(1e-12));
}

TEST_CASE("tape gradient bookkeeping") {
  Tape t;
  Var a = t.leaf(Tensor::scalar(2.0), true);
  Var unused = t.leaf(Tensor::ones({3}), true);
  Var f = t.mul(a, a);

  const size_t before = t.node_count();
  std::vector<Var> params{a, unused};
  auto g = t.gradient(f, params);
  CHECK(g[0].item() == 4.0);
  CHECK(g[1].value().at(0) == 0.0);  // unreachable -> zeros
  CHECK(g[1].value().at(2) == 0.0);
  // non-retained backward rewinds, leaving only the returned constants
  CHECK(t.node_count() == before + params.size());
  CHECK(!t.requires_grad(g[0]));

  // relu and clamp gates are exact zeros outside their active regions
  Tape t2;
  Var x = t2.leaf(Tensor::scalar(-0.5), true);
  std::vector<Var> px{x};
  CHECK(t2.gradient(t2.relu(x), px)[0].item() == 0.0);
  CHECK(t2.gradient(t2.clamp(x, 0.0, 1.0), px)[0].item() == 0.0);
  CHECK(t2.gradient(t2.leaky_relu(x, 0.25), px)[0].item() == 0.25);

  // gradient of a non-scalar output is refused
  Tape t3;
  Var m = t3.leaf(Tensor::ones({2, 2}), true);
  std::vector<Var> pm{m};
  CHECK_ERROR_KIND((void)t3.gradient(m, pm), ErrorKind::Contract);
}

TEST_CASE("nested gradients require a retained backward") {
  {
    Tape t;
    Var w = t.leaf(Tensor::scalar(1.5), true);
    Var f = t.scale(0.5, t.mul(w, w));
    std::vector<Var> pw{w};
    Var g = t.gradient(f, pw, {.retain_graph = true})[0];  // g = w
    Var h = t.mul(g, g);                                   // h = w^2
    Var dh = t.nested_gradient(h, pw)[0];                  // dh/dw = 2w
    CHECK(dh.item() == doctest::Approx(3.0).epsilon(1e-14));
  }
  {
    Tape t;
    Var w = t.leaf(Tensor::scalar(1.5), true);
    Var f = t.mul(w, w);
    std::vector<Var> pw{w};
    CHECK_ERROR_KIND((void)t.nested_gradient(f, pw), ErrorKind::Contract);
  }
  {
    // non-retained gradients are constants: differentiating through them
    // is refused rather than silently zero
    Tape t;
    Var w = t.leaf(Tensor::scalar(1.5), true);
    Var f = t.mul(w, w);
    std::vector<Var> pw{w};
    Var g = t.gradient(f, pw)[0];
    CHECK(!t.requires_grad(g));
    Var h = t.mul(g, g);
    CHECK_ERROR_KIND((void)t.nested_gradient(h, pw), ErrorKind::Contract);
  }
}

TEST_CASE("non-finite values are caught at the op that makes them") {
  Tape t;
  Var x = t.leaf(Tensor::scalar(-1.0), true);
  CHECK_ERROR_KIND((void)t.log(x), ErrorKind::Numeric);
  Var zero = t.constant(0.0);
  Var one = t.constant(1.0);
  CHECK_ERROR_KIND((void)t.div(one, zero), ErrorKind::Numeric);
  bool named = false;
  try {
    (void)t.log(x);
  } catch (const Error& e) {
    named = std::string(e.what()).find("log") != std::string::npos;
  }
  CHECK(named);
}

TEST_CASE("matrix ops agree with hand calculations") {
  Tape t;
  Tensor a({2, 3});
  for (int64_t i = 0; i < 6; ++i) a.at(i) = static_cast<double>(i + 1);
  Tensor b({3, 2});
  for (int64_t i = 0; i < 6; ++i) b.at(i) = static_cast<double>(i) - 2.0;
  Var va = t.constant(a), vb = t.constant(b);
  Var c = t.matmul(va, vb);
  // row 0: [1,2,3] . cols of b
  CHECK(c.value().at(0, 0) == 1 * -2 + 2 * 0 + 3 * 2);
  CHECK(c.value().at(0, 1) == 1 * -1 + 2 * 1 + 3 * 3);
  CHECK(t.transpose(va).value().at(2, 1) == a.at(1, 2));
  CHECK(t.sum(va).item() == 21.0);
  CHECK(t.mean(va).item() == 3.5);
  CHECK(t.broadcast_scalar(t.constant(2.5), {2, 2}).value().at(1, 1) == 2.5);
  Var cat = t.concat_rows(va, t.constant(Tensor::ones({1, 3})));
  CHECK(cat.value().dim(0) == 3);
  CHECK(cat.value().at(2, 0) == 1.0);
  CHECK(t.slice_rows(cat, 2, 3).value().at(0, 2) == 1.0);
  CHECK(t.slice_cols(va, 1, 3).value().at(1, 0) == a.at(1, 1));

  auto idx = std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{1, 1, 0});
  Var gathered = t.gather_rows(va, idx);
  CHECK(gathered.value().at(0, 0) == a.at(1, 0));
  CHECK(gathered.value().at(2, 2) == a.at(0, 2));
  Var scattered = t.scatter_add_rows(gathered, idx, 2);
  // rows 0 and 1 of `gathered` both land on row 1
  CHECK(scattered.value().at(1, 0) == 2 * a.at(1, 0));
  CHECK(scattered.value().at(0, 2) == a.at(0, 2));
}

TEST_CASE("sparse propagation matches dense reference") {
  auto s = std::make_shared<const SparseBool>(
      3, 4, std::vector<std::pair<int64_t, int64_t>>{{0, 1}, {1, 0}, {1, 3}, {2, 2}});
  Tape t;
  auto rng = substream(5, "spmm");
  Tensor vals({4});
  for (int64_t i = 0; i < 4; ++i) vals.at(i) = rand_range(rng, -1, 1);
  Tensor x({4, 2});
  for (int64_t i = 0; i < 8; ++i) x.at(i) = rand_range(rng, -1, 1);
  Var out = t.spmm(s, t.constant(vals), t.constant(x));
  // dense recompute
  const auto& es = s->entries();
  Tensor dense({3, 2});
  for (size_t k = 0; k < es.size(); ++k)
    for (int64_t j = 0; j < 2; ++j)
      dense.at(es[k].first, j) += vals.at(static_cast<int64_t>(k)) * x.at(es[k].second, j);
  for (int64_t i = 0; i < 6; ++i) CHECK(out.value().at(i) == doctest::Approx(dense.at(i)));

  Tensor g({3, 2});
  for (int64_t i = 0; i < 6; ++i) g.at(i) = rand_range(rng, -1, 1);
  Var outT = t.spmm_t(s, t.constant(vals), t.constant(g));
  Tensor denseT({4, 2});
  for (size_t k = 0; k < es.size(); ++k)
    for (int64_t j = 0; j < 2; ++j)
      denseT.at(es[k].second, j) += vals.at(static_cast<int64_t>(k)) * g.at(es[k].first, j);
  for (int64_t i = 0; i < 8; ++i) CHECK(outT.value().at(i) == doctest::Approx(denseT.at(i)));

  Var ed = t.edge_dot(s, t.constant(g), t.constant(x));
  for (size_t k = 0; k < es.size(); ++k) {
    double dot = 0;
    for (int64_t j = 0; j < 2; ++j) dot += g.at(es[k].first, j) * x.at(es[k].second, j);
    CHECK(ed.value().at(static_cast<int64_t>(k)) == doctest::Approx(dot));
  }

  Var seg = t.segment_sum(s, t.constant(vals));
  CHECK(seg.value().at(1) == doctest::Approx(vals.at(1) + vals.at(2)));
  Var gat = t.segment_gather(s, seg);
  CHECK(gat.value().at(2) == seg.value().at(1));  // entry 2 sits in row 1
  Var segc = t.segment_sum_cols(s, t.constant(vals));
  CHECK(segc.value().at(3) == doctest::Approx(vals.at(2)));
  Var gatc = t.segment_gather_cols(s, segc);
  CHECK(gatc.value().at(0) == segc.value().at(1));  // entry 0 targets column 1
}

TEST_CASE("loss ops and their plain twins") {
  Tape t;
  Tensor probs_t({3});
  probs_t.at(0) = 0.2;
  probs_t.at(1) = 0.75;
  probs_t.at(2) = 1.0;  // exercises clamping
  Tensor y_t({3});
  y_t.at(0) = 0.0;
  y_t.at(1) = 1.0;
  y_t.at(2) = 0.0;
  Var bce = binary_cross_entropy(t.constant(probs_t), t.constant(y_t));
  CHECK(bce.value().at(0) == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
  CHECK(bce.value().at(1) == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
  CHECK(std::isfinite(bce.value().at(2)));  // clamped away from log(0)
  for (int64_t i = 0; i < 3; ++i)
    CHECK(bce_value(probs_t.at(i), y_t.at(i)) == bce.value().at(i));  // bitwise

  Tensor logits({2, 3});
  logits.at(0, 0) = 0.3;
  logits.at(0, 1) = -1.2;
  logits.at(0, 2) = 2.0;
  logits.at(1, 0) = 100.0;  // peaked row, checks the stabilization shift
  logits.at(1, 1) = 100.0;
  logits.at(1, 2) = -50.0;
  const std::vector<int32_t> cls{2, 0};
  Var ce = softmax_cross_entropy(t.constant(logits), cls);
  for (int64_t i = 0; i < 2; ++i) {
    double mx = std::max({logits.at(i, 0), logits.at(i, 1), logits.at(i, 2)});
    double z = 0;
    for (int64_t c = 0; c < 3; ++c) z += std::exp(logits.at(i, c) - mx);
    const double expect = -(logits.at(i, cls[static_cast<size_t>(i)]) - mx - std::log(z));
    CHECK(ce.value().at(i) == doctest::Approx(expect).epsilon(1e-12));
    const double* row = &logits.at(i, 0);
    CHECK(ce_value(row, 3, cls[static_cast<size_t>(i)]) == ce.value().at(i));
  }

  Var sm = softmax_rows(t.constant(logits));
  for (int64_t i = 0; i < 2; ++i) {
    double rowsum = sm.value().at(i, 0) + sm.value().at(i, 1) + sm.value().at(i, 2);
    CHECK(rowsum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // shifting a logits row by a constant leaves the loss unchanged
  Tensor shifted = logits;
  for (int64_t c = 0; c < 3; ++c) shifted.at(0, c) += 7.5;
  Var ce2 = softmax_cross_entropy(t.constant(shifted), cls);
  CHECK(ce2.value().at(0) == doctest::Approx(ce.value().at(0)).epsilon(1e-12));

  auto s = std::make_shared<const SparseBool>(
      2, 3, std::vector<std::pair<int64_t, int64_t>>{{0, 0}, {0, 2}, {1, 1}});
  Tensor scores({3});
  scores.at(0) = 0.4;
  scores.at(1) = -1.0;
  scores.at(2) = 2.2;
  Var ns = neighbor_softmax(s, t.constant(scores));
  CHECK(ns.value().at(0) + ns.value().at(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ns.value().at(2) == doctest::Approx(1.0).epsilon(1e-12));  // single-entry row
  // stable softmax within row 0: entries 0.4 and -1.0, row max 0.4
  const double e0 = std::exp(0.0), e1 = std::exp(-1.0 - 0.4);
  CHECK(ns.value().at(0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));

  auto us = std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{0, 1});
  auto vs = std::make_shared<const std::vector<int64_t>>(std::vector<int64_t>{1, 0});
  Tensor z({2, 2});
  z.at(0, 0) = 1.0;
  z.at(0, 1) = 2.0;
  z.at(1, 0) = -3.0;
  z.at(1, 1) = 0.5;
  Var ps = pair_scores(t.constant(z), us, vs);
  CHECK(ps.value().at(0) == doctest::Approx(1.0 * -3.0 + 2.0 * 0.5));
  CHECK(ps.value().at(1) == doctest::Approx(-3.0 * 1.0 + 0.5 * 2.0));
}

TEST_CASE("param store round trip is bit exact") {
  ParamStore p;
  auto rng = substream(9, "params");
  Tensor w({4, 3});
  for (int64_t i = 0; i < 12; ++i) w.at(i) = rand_range(rng, -2, 2);
  Tensor b({3});
  b.at(0) = -0.0;  // sign of zero must survive
  b.at(1) = 1e-300;
  b.at(2) = 12345.6789;
  p.set("layer.W", w);
  p.set("layer.b", b);
  p.set("z.scalar", Tensor::scalar(0.25));

  const std::string path = temp_path("selar_params_test.bin");
  p.save(path);
  ParamStore q = ParamStore::load(path);
  CHECK(q == p);
  CHECK(std::signbit(q.at("layer.b").at(0)));

  // lexicographic iteration order
  std::vector<std::string> names;
  for (const auto& [name, tensor] : q) names.push_back(name);
  CHECK(std::is_sorted(names.begin(), names.end()));

  // corrupt magic
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f != nullptr);
    std::fputc('X', f);
    std::fclose(f);
  }
  CHECK_ERROR_KIND((void)ParamStore::load(path), ErrorKind::Data);
  std::filesystem::remove(path);

  std::map<std::string, Tensor> grads;
  grads.emplace("layer.b", Tensor::ones({3}));
  sgd_step(p, grads, 0.5);
  CHECK(p.at("layer.b").at(2) == doctest::Approx(12345.6789 - 0.5));
  CHECK(p.at("layer.W").at(0) == w.at(0));  // untouched
}

TEST_CASE("auc matches the quadratic oracle") {
  auto oracle = [](std::span<const double> s, std::span<const int8_t> y) {
    double wins = 0, total = 0;
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = 0; j < s.size(); ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        total += 1;
        if (s[i] > s[j]) wins += 1;
        else if (s[i] == s[j]) wins += 0.5;
      }
    return wins / total;
  };

  auto rng = substream(21, "auc");
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 5 + rand_index(rng, 40);
    std::vector<double> s(n);
    std::vector<int8_t> y(n);
    bool has0 = false, has1 = false;
    for (size_t i = 0; i < n; ++i) {
      // coarse grid forces plenty of ties
      s[i] = static_cast<double>(rand_index(rng, 6)) / 5.0;
      y[i] = static_cast<int8_t>(rand_index(rng, 2));
      (y[i] ? has1 : has0) = true;
    }
    if (!has0 || !has1) {
      y[0] = 0;
      y[n - 1] = 1;
    }
    CHECK(auc_score(s, y) == doctest::Approx(oracle(s, y)).epsilon(1e-12));
  }

  std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  std::vector<int8_t> perfect{1, 1, 0, 0};
  CHECK(auc_score(s, perfect) == 1.0);
  std::vector<int8_t> inverted{0, 0, 1, 1};
  CHECK(auc_score(s, inverted) == 0.0);
  std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(auc_score(flat, perfect) == 0.5);

  std::vector<int8_t> onlypos{1, 1, 1, 1};
  CHECK_ERROR_KIND((void)auc_score(s, onlypos), ErrorKind::Data);
  std::vector<int8_t> bad{0, 2, 1, 0};
  CHECK_ERROR_KIND((void)auc_score(s, bad), ErrorKind::Data);
}

TEST_CASE("f1 fixtures") {
  // three classes; class 2 never predicted, class 1 perfect
  std::vector<int32_t> pred{0, 0, 1, 1, 0, 0};
  std::vector<int32_t> truth{0, 2, 1, 1, 2, 0};
  F1Scores f = f1_scores(pred, truth, 3);
  // micro: tp=4 fp=2 fn=2 -> 2*4/(2*4+2+2) = 8/12
  CHECK(f.micro == doctest::Approx(8.0 / 12.0).epsilon(1e-12));
  // class0: tp2 fp2 fn0 -> 4/6; class1: 1; class2: 0
  CHECK(f.macro == doctest::Approx((4.0 / 6.0 + 1.0 + 0.0) / 3.0).epsilon(1e-12));

  // class absent from both predictions and truth contributes zero
  F1Scores g = f1_scores(std::vector<int32_t>{0, 0}, std::vector<int32_t>{0, 0}, 2);
  CHECK(g.micro == 1.0);
  CHECK(g.macro == doctest::Approx(0.5));
  CHECK_ERROR_KIND((void)f1_scores(std::vector<int32_t>{3}, std::vector<int32_t>{0}, 2),
                   ErrorKind::Data);
}

TEST_CASE("splits partition and stratify") {
  std::vector<int32_t> labels(100);
  for (size_t i = 0; i < 100; ++i) labels[i] = i < 30 ? 1 : 0;
  SplitSpec spec;
  spec.seed = 4;
  SplitIndices s = split_indices(100, labels, spec);
  CHECK(s.train.size() == 80);
  CHECK(s.val.size() == 10);
  CHECK(s.test.size() == 10);
  std::set<int64_t> seen;
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    CHECK(std::is_sorted(part->begin(), part->end()));
    for (int64_t i : *part) CHECK(seen.insert(i).second);  // disjoint
  }
  CHECK(seen.size() == 100);

  // stratified: class proportions preserved within one item per class
  auto count_pos = [&](const std::vector<int64_t>& part) {
    int64_t c = 0;
    for (int64_t i : part) c += labels[static_cast<size_t>(i)];
    return c;
  };
  CHECK(count_pos(s.train) == 24);
  CHECK(count_pos(s.val) == 3);
  CHECK(count_pos(s.test) == 3);

  SplitIndices s2 = split_indices(100, labels, spec);
  CHECK(s.train == s2.train);
  spec.seed = 5;
  SplitIndices s3 = split_indices(100, labels, spec);
  CHECK(s.train != s3.train);

  SplitSpec bad = spec;
  bad.train_frac = 0.9;
  CHECK_ERROR_KIND((void)split_indices(100, labels, bad), ErrorKind::Config);
  SplitSpec tiny = spec;
  std::vector<int32_t> few{0, 1};
  CHECK_ERROR_KIND((void)split_indices(2, few, tiny), ErrorKind::Data);
  std::vector<int32_t> wrong(5, 0);
  CHECK_ERROR_KIND((void)split_indices(100, wrong, spec), ErrorKind::Contract);
}
