#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "coplaynet/evaluate.hpp"
#include "coplaynet/rng.hpp"
#include "coplaynet/stats.hpp"
#include "coplaynet/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coplaynet;
using perfnet::Edge;
using perfnet::PerformanceNetwork;

namespace {

struct FnPredictor final : models::Predictor {
  std::function<double(int, int)> fn;
  std::string label{"fn"};
  double predict(int src, int dst) const override { return fn(src, dst); }
  std::string name() const override { return label; }
};

PerformanceNetwork grid_network(int nodes, std::uint64_t seed) {
  PerformanceNetwork net;
  net.kind = perfnet::NetworkKind::spn;
  for (int i = 0; i < nodes; ++i) {
    const std::string digits = std::to_string(i);
    net.node_ids.push_back("g" + std::string(4 - digits.size(), '0') + digits);
  }
  auto rng = make_rng(seed, "grid");
  std::normal_distribution<double> w(0.0, 1.0);
  for (int i = 0; i < nodes; ++i)
    for (int off = 1; off <= 3; ++off)
      net.edges.push_back({i, (i + off) % nodes, w(rng), 3});
  std::sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
  });
  return net;
}

}  // namespace

TEST_SUITE_BEGIN("evaluate");

TEST_CASE("split hides exactly the rounded fraction") {
  const auto net = grid_network(10, 1);  // 30 edges
  REQUIRE(net.edges.size() == 30);
  const auto split = eval::split_edges(net, {0.20, 7});
  CHECK(split.test_edges.size() == 6);
  CHECK(split.train.edges.size() == 24);

  // Ten edges at 20% hide exactly two.
  PerformanceNetwork ten = net;
  ten.edges.resize(10);
  const auto small = eval::split_edges(ten, {0.20, 7});
  CHECK(small.test_edges.size() == 2);
}

TEST_CASE("split is a seed-deterministic partition") {
  const auto net = grid_network(12, 2);
  const auto a = eval::split_edges(net, {0.25, 42});
  const auto b = eval::split_edges(net, {0.25, 42});
  REQUIRE(a.test_edges.size() == b.test_edges.size());
  for (std::size_t i = 0; i < a.test_edges.size(); ++i) {
    CHECK(a.test_edges[i].src == b.test_edges[i].src);
    CHECK(a.test_edges[i].dst == b.test_edges[i].dst);
  }

  // train and test form the original edge set with no overlap.
  std::set<std::pair<int, int>> seen;
  for (const auto& e : a.train.edges) seen.insert({e.src, e.dst});
  for (const auto& e : a.test_edges) {
    CHECK(seen.count({e.src, e.dst}) == 0);
    seen.insert({e.src, e.dst});
  }
  CHECK(seen.size() == net.edges.size());
  CHECK(a.train.node_ids == net.node_ids);

  // A different seed produces a different test set.
  const auto c = eval::split_edges(net, {0.25, 43});
  bool any_difference = c.test_edges.size() != a.test_edges.size();
  for (std::size_t i = 0; !any_difference && i < a.test_edges.size(); ++i)
    any_difference = a.test_edges[i].src != c.test_edges[i].src ||
                     a.test_edges[i].dst != c.test_edges[i].dst;
  CHECK(any_difference);
}

TEST_CASE("split rejects fractions that round to nothing or everything") {
  const auto net = grid_network(4, 3);
  CHECK_THROWS_AS(eval::split_edges(net, {0.001, 1}), DataError);
  CHECK_THROWS_AS(eval::split_edges(net, {0.999, 1}), DataError);
  CHECK_THROWS_AS(eval::split_edges(net, {1.5, 1}), DataError);
}

TEST_CASE("sampling the whole network returns every node") {
  const auto net = grid_network(25, 4);
  eval::SampleSpec spec;
  spec.target_nodes = 25;
  spec.seed = 9;
  const auto nodes = eval::sample_subnetwork(net, spec, 0);
  REQUIRE(nodes.size() == 25);
  for (int i = 0; i < 25; ++i) CHECK(nodes[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("sampled nodes induce a subgraph of the original") {
  const auto net = oracles::heavy_tailed_network(400, 4, 5);
  eval::SampleSpec spec;
  spec.target_nodes = 120;
  spec.seed = 10;
  const auto nodes = eval::sample_subnetwork(net, spec, 0);
  CHECK(nodes.size() == 120);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  const auto induced = eval::induced_edges(net.edges, nodes);
  CHECK_FALSE(induced.empty());
  for (const auto& e : induced) {
    CHECK(std::binary_search(nodes.begin(), nodes.end(), e.src));
    CHECK(std::binary_search(nodes.begin(), nodes.end(), e.dst));
  }
  CHECK_THROWS_AS(
      eval::sample_subnetwork(net, {1000000, 0.15, 1, 1}, 0), DataError);
}

TEST_CASE("sampled weight distribution tracks the full network") {
  const auto net = oracles::heavy_tailed_network(2000, 5, 6);
  eval::SampleSpec spec;
  spec.target_nodes = 512;
  spec.seed = 11;
  std::vector<double> full;
  for (const auto& e : net.edges) full.push_back(e.weight);
  for (int s = 0; s < 3; ++s) {
    const auto nodes = eval::sample_subnetwork(net, spec, s);
    std::vector<double> sampled;
    for (const auto& e : eval::induced_edges(net.edges, nodes))
      sampled.push_back(e.weight);
    REQUIRE(sampled.size() > 100);
    CHECK(stats::ks_statistic(full, sampled) <= 0.1);
  }
}

TEST_CASE("mse closed cases and naive recomputation") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(eval::mse(a, a) == 0.0);
  CHECK(eval::mse(std::vector<double>{1.0, 0.0},
                  std::vector<double>{0.0, 0.0}) == 0.5);
  CHECK(eval::mse(std::vector<double>{1.0, 0.0},
                  std::vector<double>{0.0, 0.0}, true) == 1.0);
  CHECK_THROWS_AS(eval::mse(a, std::vector<double>{1.0}), DataError);

  auto rng = make_rng(12, "mse");
  std::normal_distribution<double> w(0.0, 3.0);
  std::vector<double> test(100), pred(100);
  for (std::size_t i = 0; i < 100; ++i) {
    test[i] = w(rng);
    pred[i] = w(rng);
  }
  CHECK(eval::mse(test, pred) == doctest::Approx(oracles::mse(test, pred)).epsilon(1e-14));
}

TEST_CASE("avg_rec_at_k closed cases") {
  std::vector<Edge> test_edges;
  auto rng = make_rng(13, "avgrec");
  std::normal_distribution<double> w(0.0, 1.0);
  for (int i = 0; i < 10; ++i) test_edges.push_back({i, (i + 1) % 10, w(rng), 3});

  FnPredictor ideal;
  std::map<std::pair<int, int>, double> truth;
  for (const auto& e : test_edges) truth[{e.src, e.dst}] = e.weight;
  ideal.fn = [&truth](int i, int j) { return truth.at({i, j}); };

  double max_weight = test_edges[0].weight;
  double sum = 0.0;
  for (const auto& e : test_edges) {
    max_weight = std::max(max_weight, e.weight);
    sum += e.weight;
  }
  CHECK(eval::avg_rec_at_k(test_edges, ideal, 1) == max_weight);

  FnPredictor constant;
  constant.fn = [](int, int) { return 0.25; };
  CHECK(eval::avg_rec_at_k(test_edges, constant, 10) ==
        doctest::Approx(sum / 10.0).epsilon(1e-14));

  CHECK_THROWS_AS(eval::avg_rec_at_k(test_edges, ideal, 0), DataError);
  CHECK_THROWS_AS(eval::avg_rec_at_k(test_edges, ideal, 11), DataError);
}

TEST_CASE("avg_rec_at_k matches the selection oracle with ties") {
  std::vector<Edge> test_edges;
  auto rng = make_rng(14, "avgrec-oracle");
  std::uniform_int_distribution<int> iw(-2, 2);
  for (int i = 0; i < 12; ++i)
    test_edges.push_back({i, (i + 3) % 12, static_cast<double>(iw(rng)), 3});

  FnPredictor pred;
  std::vector<double> scores(test_edges.size());
  for (auto& s : scores) s = static_cast<double>(iw(rng));
  std::map<std::pair<int, int>, double> score_of;
  for (std::size_t i = 0; i < test_edges.size(); ++i)
    score_of[{test_edges[i].src, test_edges[i].dst}] = scores[i];
  pred.fn = [&score_of](int i, int j) { return score_of.at({i, j}); };

  for (std::size_t k = 1; k <= test_edges.size(); ++k)
    CHECK(eval::avg_rec_at_k(test_edges, pred, k) ==
          oracles::avg_rec_at_k(test_edges, scores, k));
}

TEST_CASE("mane closed cases") {
  // Node 0: two train links, two test links.
  const std::vector<Edge> train{{0, 1, 3.0, 3}, {0, 2, 1.0, 3}};
  const std::vector<Edge> test{{0, 3, 2.0, 3}, {0, 4, 0.5, 3}};

  FnPredictor truth;
  truth.fn = [&](int, int dst) { return dst == 3 ? 2.0 : 0.5; };
  const auto ideal = eval::mane(test, train, truth);
  CHECK(ideal.value == 0.0);
  CHECK(ideal.eligible_nodes == 1);

  // One test link predicted into its true slot keeps MANE at zero.
  const std::vector<Edge> single_test{{0, 3, 2.0, 3}};
  FnPredictor keeps_position;
  keeps_position.fn = [](int, int) { return 2.5; };  // still between 3.0 and 1.0
  CHECK(eval::mane(single_test, train, keeps_position).value == 0.0);

  // Pushing the same link to the top displaces it by one rank:
  // MANE(0) = 1 / (|train| * |test|) = 1/2.
  FnPredictor to_top;
  to_top.fn = [](int, int) { return 10.0; };
  CHECK(eval::mane(single_test, train, to_top).value == 0.5);

  // Nodes without train links are skipped and counted.
  const std::vector<Edge> orphan_test{{7, 3, 2.0, 3}};
  CHECK_THROWS_AS(eval::mane(orphan_test, train, truth), DataError);
  const std::vector<Edge> both_test{{0, 3, 2.0, 3}, {7, 3, 2.0, 3}};
  const auto partial = eval::mane(both_test, train, keeps_position);
  CHECK(partial.eligible_nodes == 1);
  CHECK(partial.skipped_nodes == 1);
}

TEST_CASE("mane equals the exhaustive ranking oracle") {
  auto rng = make_rng(15, "mane-oracle");
  std::normal_distribution<double> w(0.0, 1.0);
  std::vector<Edge> train, test;
  for (int src = 0; src < 5; ++src) {
    for (int dst = 0; dst < 8; ++dst) {
      if (src == dst) continue;
      Edge e{src, dst, w(rng), 3};
      ((src + dst) % 3 == 0 ? test : train).push_back(e);
    }
  }
  // Adversarial scores decorrelated from the truth.
  std::map<std::pair<int, int>, double> score_of;
  for (const auto& e : test) score_of[{e.src, e.dst}] = w(rng);
  FnPredictor adversary;
  adversary.fn = [&score_of](int i, int j) { return score_of.at({i, j}); };

  const auto got = eval::mane(test, train, adversary);
  const double expected = oracles::mane(
      test, train, [&](int i, int j) { return adversary.fn(i, j); });
  CHECK(got.value == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("benchmark sanity on a small planted instance") {
  synth::PlantedConfig pc;
  pc.nodes = 40;
  pc.d_true = 2;
  pc.noise = 0.05;
  pc.density = 0.6;
  pc.seed = 16;
  auto planted = synth::generate_planted_network(pc);

  eval::BenchmarkConfig cfg;
  cfg.d_sweep = {4};
  cfg.model_list = {eval::ModelKind::baseline, eval::ModelKind::factorization};
  cfg.sample.target_nodes = 40;
  cfg.sample.samples = 2;
  cfg.gf.epochs = 150;
  cfg.k_list = {1, 5, 10};
  cfg.seed = 99;
  const auto report = eval::run_benchmark(planted.net, cfg);
  CHECK(report.failures.empty());

  for (const auto& row : report.aggregates) {
    if (row.model == "baseline") {
      CHECK(row.gain_mean == 0.0);  // baseline against itself
      CHECK(row.gain_std == 0.0);
    }
    if (row.model == "ideal" && row.metric == "mse") {
      CHECK(row.mean == 0.0);
      CHECK(row.gain_mean == doctest::Approx(100.0));
    }
    if (row.model == "ideal" && row.metric == "mane")
      CHECK(row.mean == 0.0);
  }

  // The ideal ranking upper-bounds every model at every k in every sample.
  std::map<std::tuple<int, std::string>, double> ideal_at;  // (sample, metric)
  for (const auto& c : report.cells)
    if (c.model == "ideal" && c.metric.rfind("avgrec@", 0) == 0)
      ideal_at[{c.sample, c.metric}] = c.value;
  std::size_t compared = 0;
  for (const auto& c : report.cells) {
    if (c.model == "ideal" || c.model == "_sample") continue;
    if (c.metric.rfind("avgrec@", 0) != 0) continue;
    CHECK(c.value <= ideal_at.at({c.sample, c.metric}) + 1e-12);
    ++compared;
  }
  CHECK(compared > 0);

  // Whole-benchmark determinism under a fixed seed.
  const auto replay = eval::run_benchmark(planted.net, cfg);
  REQUIRE(replay.cells.size() == report.cells.size());
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    CHECK(replay.cells[i].model == report.cells[i].model);
    CHECK(replay.cells[i].metric == report.cells[i].metric);
    CHECK(replay.cells[i].value == report.cells[i].value);
  }
}

TEST_SUITE_END();
