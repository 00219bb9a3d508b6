#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "coplaynet/ingest.hpp"
#include "coplaynet/io.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/rating.hpp"
#include "coplaynet/rng.hpp"
#include "coplaynet/synth.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace coplaynet;
using perfnet::DecayConfig;
using perfnet::NetworkKind;
using perfnet::PerformanceNetwork;

namespace {

rating::RatingTimeline make_timeline(const std::string& id,
                                     const std::vector<double>& mus) {
  rating::RatingTimeline tl;
  tl.account_id = id;
  for (std::size_t i = 0; i < mus.size(); ++i)
    tl.points.push_back({i, {mus[i], 8.0}});
  return tl;
}

PlayerHistory history_with_mates(
    const std::string& id,
    const std::vector<std::array<std::string, 4>>& mates) {
  PlayerHistory h;
  h.account_id = id;
  for (std::size_t i = 0; i < mates.size(); ++i)
    h.entries.push_back({i, "m" + std::to_string(i), mates[i]});
  return h;
}

// Small pipeline front end shared by the aggregation tests.
struct RatedLog {
  std::map<std::string, PlayerHistory> histories;
  std::map<std::string, rating::RatingTimeline> timelines;
};

RatedLog rate_synthetic(int players, int matches, std::uint64_t seed) {
  synth::SynthConfig cfg;
  cfg.players = players;
  cfg.matches = matches;
  cfg.seed = seed;
  const auto log = synth::generate_match_log(cfg);
  const auto valid = ingest::filter_valid_matches(log.matches);
  const auto exp = ingest::filter_experienced_players(valid, 1);
  return {exp.histories, rating::rate_dataset(valid, exp.histories, {})};
}

PerformanceNetwork random_weight_network(int nodes, double edge_prob,
                                         std::uint64_t seed,
                                         bool integer_weights = false) {
  PerformanceNetwork net;
  net.kind = NetworkKind::spn;
  for (int i = 0; i < nodes; ++i)
    net.node_ids.push_back("n" + std::string(3 - std::to_string(i).size(), '0') +
                           std::to_string(i));
  auto rng = make_rng(seed, "random-net");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> w(0.0, 1.0);
  std::uniform_int_distribution<int> iw(-3, 3);
  std::uniform_int_distribution<int> count(1, 6);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      if (i == j || coin(rng) >= edge_prob) continue;
      net.edges.push_back(
          {i, j, integer_weights ? static_cast<double>(iw(rng)) : w(rng),
           count(rng)});
    }
  return net;
}

}  // namespace

TEST_SUITE_BEGIN("perfnet");

TEST_CASE("short-term weight is the rating delta toward each teammate") {
  const auto h = history_with_mates("p", {{{"a", "b", "c", "d"}}});
  const auto tl = make_timeline("p", {26.0});
  for (const std::string mate : {"a", "b", "c", "d"})
    CHECK(perfnet::short_term_weight(h, tl, 0, mate, 25.0) == 1.0);
  CHECK_THROWS_AS(perfnet::short_term_weight(h, tl, 0, "z", 25.0), DataError);
}

TEST_CASE("short-term weight of an unchanged rating is zero") {
  const auto h = history_with_mates(
      "p", {{{"a", "b", "c", "d"}}, {{"a", "b", "c", "d"}}});
  const auto tl = make_timeline("p", {25.0, 25.0});
  CHECK(perfnet::short_term_weight(h, tl, 1, "a", 25.0) == 0.0);
}

TEST_CASE("per-match short-term weights reproduce hand-enumerated deltas") {
  const auto h = history_with_mates("p", {{{"a", "b", "c", "d"}},
                                          {{"a", "b", "c", "d"}},
                                          {{"a", "b", "c", "d"}}});
  const auto tl = make_timeline("p", {25.5, 25.3, 25.4});
  CHECK(perfnet::short_term_weight(h, tl, 0, "a", 25.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(perfnet::short_term_weight(h, tl, 1, "a", 25.0) ==
        doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(perfnet::short_term_weight(h, tl, 2, "a", 25.0) ==
        doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("long-term weight reduces to short-term when co-playing now") {
  const auto h = history_with_mates(
      "p", {{{"a", "b", "c", "d"}}, {{"a", "b", "c", "d"}}});
  const auto tl = make_timeline("p", {25.7, 26.2});
  CHECK(perfnet::long_term_weight(h, tl, 1, "a", 25.0, {}) ==
        perfnet::short_term_weight(h, tl, 1, "a", 25.0));
}

TEST_CASE("long-term weight decays with the co-play gap") {
  // Teammate "x" appears only at match 0; delta at match 2 is +0.5.
  const auto h = history_with_mates("p", {{{"x", "b", "c", "d"}},
                                          {{"e", "f", "g", "h"}},
                                          {{"e", "f", "g", "h"}}});
  const auto tl = make_timeline("p", {25.0, 25.5, 26.0});
  const double w = perfnet::long_term_weight(h, tl, 2, "x", 25.0, {});
  CHECK(w == 0.5 * std::exp(-2.0));
  CHECK(w == doctest::Approx(0.06766764161830635).epsilon(1e-12));
}

TEST_CASE("long-term weight is zero before the first co-play") {
  const auto h = history_with_mates(
      "p", {{{"e", "f", "g", "h"}}, {{"x", "b", "c", "d"}}});
  const auto tl = make_timeline("p", {25.5, 26.0});
  CHECK(perfnet::long_term_weight(h, tl, 0, "x", 25.0, {}) == 0.0);
}

TEST_CASE("long-term horizon cuts stale contributions") {
  std::vector<std::array<std::string, 4>> mates(60, {"e", "f", "g", "h"});
  mates[0] = {"x", "f", "g", "h"};
  const auto h = history_with_mates("p", mates);
  std::vector<double> mus(60);
  for (std::size_t i = 0; i < mus.size(); ++i)
    mus[i] = 25.0 + 0.1 * static_cast<double>(i + 1);
  const auto tl = make_timeline("p", mus);

  DecayConfig cfg;  // horizon 50
  CHECK(perfnet::long_term_weight(h, tl, 50, "x", 25.0, cfg) != 0.0);
  CHECK(perfnet::long_term_weight(h, tl, 51, "x", 25.0, cfg) == 0.0);
  cfg.horizon = std::nullopt;
  CHECK(perfnet::long_term_weight(h, tl, 51, "x", 25.0, cfg) != 0.0);
}

TEST_CASE("the printed growth form of the exponent stays available") {
  const auto h = history_with_mates("p", {{{"x", "b", "c", "d"}},
                                          {{"e", "f", "g", "h"}},
                                          {{"e", "f", "g", "h"}}});
  const auto tl = make_timeline("p", {25.0, 25.5, 26.0});
  DecayConfig growth;
  growth.literal_growth_exponent = true;
  CHECK(perfnet::long_term_weight(h, tl, 2, "x", 25.0, growth) ==
        0.5 * std::exp(2.0));
}

TEST_CASE("single co-played match produces the trivial edge") {
  const std::vector<std::string> ids{"a", "b", "c", "d", "e",
                                     "f", "g", "h", "i", "j"};
  std::map<std::string, PlayerHistory> histories =
      ingest::build_histories({fixtures::make_match("m0", 1, ids)},
                              {ids.begin(), ids.end()});
  std::map<std::string, rating::RatingTimeline> timelines;
  for (const auto& id : ids) timelines[id] = make_timeline(id, {26.0});

  const auto net = perfnet::aggregate_network(histories, timelines,
                                              NetworkKind::spn, {}, 25.0);
  const auto* edge = net.find_edge(net.index_of("a"), net.index_of("b"));
  REQUIRE(edge != nullptr);
  CHECK(edge->weight == 1.0);
  CHECK(edge->co_play_count == 1);
  // 10 players x 4 teammates, both directions present.
  CHECK(net.edges.size() == 40);
}

TEST_CASE("aggregation equals the brute-force oracle exactly") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const auto rated = rate_synthetic(10, 20, seed);
    for (const auto kind : {NetworkKind::spn, NetworkKind::lpn}) {
      const auto net = perfnet::aggregate_network(rated.histories,
                                                  rated.timelines, kind, {},
                                                  25.0);
      const auto expected = oracles::aggregate_network(
          rated.histories, rated.timelines, kind, {}, 25.0);
      REQUIRE(net.edges.size() == expected.edges.size());
      CHECK(net.node_ids == expected.node_ids);
      for (std::size_t i = 0; i < net.edges.size(); ++i) {
        CHECK(net.edges[i].src == expected.edges[i].src);
        CHECK(net.edges[i].dst == expected.edges[i].dst);
        CHECK(net.edges[i].weight == expected.edges[i].weight);  // bitwise
        CHECK(net.edges[i].co_play_count == expected.edges[i].co_play_count);
      }
    }
  }
}

TEST_CASE("spn and lpn share structure; only weights differ") {
  const auto rated = rate_synthetic(12, 30, 9);
  const auto spn = perfnet::aggregate_network(rated.histories, rated.timelines,
                                              NetworkKind::spn, {}, 25.0);
  const auto lpn = perfnet::aggregate_network(rated.histories, rated.timelines,
                                              NetworkKind::lpn, {}, 25.0);
  CHECK(spn.node_ids == lpn.node_ids);
  REQUIRE(spn.edges.size() == lpn.edges.size());
  for (std::size_t i = 0; i < spn.edges.size(); ++i) {
    CHECK(spn.edges[i].src == lpn.edges[i].src);
    CHECK(spn.edges[i].dst == lpn.edges[i].dst);
    CHECK(spn.edges[i].co_play_count == lpn.edges[i].co_play_count);
  }
}

TEST_CASE("consecutive-only co-play makes lpn equal spn") {
  // Fixed 5v5 teams every match: every teammate pair co-plays in every
  // match, so i_pt always equals i.
  const std::vector<std::string> ids{"a", "b", "c", "d", "e",
                                     "f", "g", "h", "i", "j"};
  std::vector<MatchRecord> matches;
  for (int m = 0; m < 15; ++m)
    matches.push_back(
        fixtures::make_match("m" + std::to_string(m), m, ids, m % 3 != 0));
  const auto histories =
      ingest::build_histories(matches, {ids.begin(), ids.end()});
  const auto timelines = rating::rate_dataset(matches, histories, {});

  const auto spn = perfnet::aggregate_network(histories, timelines,
                                              NetworkKind::spn, {}, 25.0);
  const auto lpn = perfnet::aggregate_network(histories, timelines,
                                              NetworkKind::lpn, {}, 25.0);
  REQUIRE(spn.edges.size() == lpn.edges.size());
  for (std::size_t i = 0; i < spn.edges.size(); ++i)
    CHECK(spn.edges[i].weight == lpn.edges[i].weight);
}

TEST_CASE("lpn weight magnitude is bounded by the sum of delta magnitudes") {
  const auto rated = rate_synthetic(10, 20, 21);
  const auto lpn = perfnet::aggregate_network(rated.histories, rated.timelines,
                                              NetworkKind::lpn, {}, 25.0);
  for (const auto& e : lpn.edges) {
    const auto& id = lpn.node_ids[static_cast<std::size_t>(e.src)];
    const auto& tl = rated.timelines.at(id);
    double bound = 0.0;
    for (std::size_t i = 0; i < tl.points.size(); ++i) {
      const double prev = i == 0 ? 25.0 : tl.points[i - 1].rating.mu;
      bound += std::abs(tl.points[i].rating.mu - prev);
    }
    CHECK(std::abs(e.weight) <= bound + 1e-12);
  }
}

TEST_CASE("zero deltas make every lpn weight zero regardless of decay") {
  const auto h = history_with_mates(
      "p", {{{"q", "b", "c", "d"}}, {{"e", "f", "g", "h"}}});
  const auto hq = history_with_mates(
      "q", {{{"p", "b", "c", "d"}}, {{"e2", "f2", "g2", "h2"}}});
  std::map<std::string, PlayerHistory> histories{{"p", h}, {"q", hq}};
  std::map<std::string, rating::RatingTimeline> timelines{
      {"p", make_timeline("p", {25.0, 25.0})},
      {"q", make_timeline("q", {25.0, 25.0})}};
  const auto lpn = perfnet::aggregate_network(histories, timelines,
                                              NetworkKind::lpn, {}, 25.0);
  for (const auto& e : lpn.edges) CHECK(e.weight == 0.0);
}

TEST_CASE("threshold keeps counts of three and drops below") {
  PerformanceNetwork net;
  net.kind = NetworkKind::spn;
  net.node_ids = {"a", "b", "c"};
  net.edges = {{0, 1, 1.0, 2}, {1, 2, 1.0, 3}, {2, 0, 1.0, 5}};
  const auto out = perfnet::threshold_edges(net);
  REQUIRE(out.edges.size() == 2);
  CHECK(out.edges[0].co_play_count == 3);
  CHECK(out.node_ids == net.node_ids);  // isolated nodes kept here

  PerformanceNetwork ones = net;
  for (auto& e : ones.edges) e.co_play_count = 1;
  CHECK(perfnet::threshold_edges(ones).edges.empty());
}

TEST_CASE("lcc picks the larger weak component and reindexes") {
  PerformanceNetwork net;
  net.kind = NetworkKind::spn;
  net.node_ids = {"a", "b", "c", "d", "e", "f", "g", "h"};
  // Component 1: a<-b->c->d->e (size 5, weak). Component 2: f->g->h.
  net.edges = {{1, 0, 1.0, 3}, {1, 2, 1.0, 3}, {2, 3, 1.0, 3},
               {3, 4, 1.0, 3}, {5, 6, 1.0, 3}, {6, 7, 1.0, 3}};
  const auto lcc = perfnet::largest_connected_component(net);
  CHECK(lcc.node_ids == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(lcc.edges.size() == 4);

  // A connected graph is its own LCC.
  const auto again = perfnet::largest_connected_component(lcc);
  CHECK(again.node_ids == lcc.node_ids);
  CHECK(again.edges.size() == lcc.edges.size());

  // Thresholding then LCC is idempotent on its own output.
  const auto thresholded = perfnet::threshold_edges(lcc);
  const auto twice = perfnet::largest_connected_component(thresholded);
  CHECK(twice.node_ids == lcc.node_ids);
}

TEST_CASE("lcc of an empty network is empty") {
  PerformanceNetwork net;
  net.kind = NetworkKind::spn;
  const auto lcc = perfnet::largest_connected_component(net);
  CHECK(lcc.node_ids.empty());
  CHECK(lcc.edges.empty());
}

TEST_CASE("lcc matches the flood-fill oracle on random thresholded nets") {
  for (const std::uint64_t seed : {31ULL, 32ULL, 33ULL}) {
    auto net = random_weight_network(200, 0.008, seed);
    net = perfnet::threshold_edges(net, 3);
    const auto lcc = perfnet::largest_connected_component(net);
    CHECK(lcc.node_ids == oracles::lcc_node_ids(net));
  }
}

TEST_CASE("global tau hits the closed cases") {
  PerformanceNetwork spn = random_weight_network(8, 0.5, 41);
  PerformanceNetwork lpn = spn;
  lpn.kind = NetworkKind::lpn;
  CHECK(perfnet::kendall_tau_global(spn, lpn) == doctest::Approx(1.0));

  // Exactly reversed ranking.
  std::vector<double> weights;
  for (const auto& e : spn.edges) weights.push_back(e.weight);
  std::sort(weights.begin(), weights.end());
  PerformanceNetwork reversed = spn;
  std::vector<std::size_t> order(spn.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spn.edges[a].weight < spn.edges[b].weight;
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    reversed.edges[order[rank]].weight =
        weights[order.size() - 1 - rank];
  CHECK(perfnet::kendall_tau_global(spn, reversed) == doctest::Approx(-1.0));
}

TEST_CASE("global tau equals the pair-count oracle exactly, ties included") {
  for (const std::uint64_t seed : {51ULL, 52ULL, 53ULL, 54ULL}) {
    // Integer weights so ties actually occur.
    const auto spn = random_weight_network(10, 0.4, seed, true);
    auto lpn = random_weight_network(10, 0.4, seed, true);
    lpn.kind = NetworkKind::lpn;
    lpn.node_ids = spn.node_ids;
    lpn.edges = spn.edges;
    auto rng = make_rng(seed, "lpn-weights");
    std::uniform_int_distribution<int> iw(-3, 3);
    for (auto& e : lpn.edges) e.weight = static_cast<double>(iw(rng));

    std::vector<double> x, y;
    for (std::size_t i = 0; i < spn.edges.size(); ++i) {
      x.push_back(spn.edges[i].weight);
      y.push_back(lpn.edges[i].weight);
    }
    const double got = perfnet::kendall_tau_global(spn, lpn);
    CHECK(got == oracles::kendall_tau_b(x, y));
  }
}

TEST_CASE("tau is undefined below two edges or on constant weights") {
  PerformanceNetwork a;
  a.kind = NetworkKind::spn;
  a.node_ids = {"x", "y"};
  a.edges = {{0, 1, 1.0, 3}};
  auto b = a;
  b.kind = NetworkKind::lpn;
  CHECK_THROWS_AS(perfnet::kendall_tau_global(a, b), DataError);
}

TEST_CASE("per-player tau covers the closed cases and the oracle") {
  const auto spn = random_weight_network(50, 0.2, 61);
  auto lpn = spn;
  lpn.kind = NetworkKind::lpn;
  const auto identical = perfnet::kendall_tau_per_player(spn, lpn);
  for (const auto& [id, tau] : identical.tau) CHECK(tau == doctest::Approx(1.0));

  // Swap the top two out-weights of one player: a 2-edge node flips to -1.
  PerformanceNetwork two;
  two.kind = NetworkKind::spn;
  two.node_ids = {"a", "b", "c"};
  two.edges = {{0, 1, 2.0, 3}, {0, 2, 1.0, 3}};
  PerformanceNetwork two_swapped = two;
  two_swapped.kind = NetworkKind::lpn;
  two_swapped.edges[0].weight = 1.0;
  two_swapped.edges[1].weight = 2.0;
  const auto swapped = perfnet::kendall_tau_per_player(two, two_swapped);
  CHECK(swapped.tau.at("a") == doctest::Approx(-1.0));
  CHECK(swapped.skipped == 2);  // b and c have no out-edges

  // Random per-player weights against the pair-count oracle.
  auto scrambled = spn;
  scrambled.kind = NetworkKind::lpn;
  auto rng = make_rng(62, "scramble");
  std::normal_distribution<double> w(0.0, 1.0);
  for (auto& e : scrambled.edges) e.weight = w(rng);
  const auto per_player = perfnet::kendall_tau_per_player(spn, scrambled);
  for (const auto& [id, tau] : per_player.tau) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < spn.edges.size(); ++i) {
      if (spn.node_ids[static_cast<std::size_t>(spn.edges[i].src)] != id)
        continue;
      x.push_back(spn.edges[i].weight);
      y.push_back(scrambled.edges[i].weight);
    }
    CHECK(tau == oracles::kendall_tau_b(x, y));
  }
  std::size_t histogram_total = 0;
  for (const auto& bin : per_player.histogram) histogram_total += bin.count;
  CHECK(histogram_total == per_player.tau.size());
}

TEST_CASE("network tsv round-trips and refuses isolated nodes") {
  fixtures::TempDir dir("perfnet_tsv");
  const auto net = random_weight_network(12, 0.4, 71);
  io::write_network_tsv(dir.file("net.tsv"), net);
  const auto loaded = io::read_network_tsv(dir.file("net.tsv"));
  CHECK(loaded.kind == net.kind);
  CHECK(loaded.node_ids == net.node_ids);
  REQUIRE(loaded.edges.size() == net.edges.size());
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    CHECK(loaded.edges[i].src == net.edges[i].src);
    CHECK(loaded.edges[i].dst == net.edges[i].dst);
    CHECK(loaded.edges[i].weight == net.edges[i].weight);
    CHECK(loaded.edges[i].co_play_count == net.edges[i].co_play_count);
  }

  PerformanceNetwork isolated = net;
  isolated.node_ids.push_back("zzz");
  CHECK_THROWS_AS(io::write_network_tsv(dir.file("bad.tsv"), isolated),
                  DataError);
}

TEST_SUITE_END();
