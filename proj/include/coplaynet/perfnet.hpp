#pragma once

#include <map>
#include <optional>

#include "coplaynet/rating.hpp"
#include "coplaynet/stats.hpp"
#include "coplaynet/types.hpp"

namespace coplaynet::perfnet {

enum class NetworkKind { spn, lpn };

const char* kind_name(NetworkKind kind);            // "SPN" | "LPN"
NetworkKind parse_kind(std::string_view name);

struct Edge {
  int src;
  int dst;
  double weight;
  int co_play_count;
};

// Directed weighted co-play network. Nodes are the retained players,
// indexed by position in the sorted id list; edges sorted by (src, dst).
struct PerformanceNetwork {
  NetworkKind kind{NetworkKind::spn};
  std::vector<std::string> node_ids;
  std::vector<Edge> edges;

  int index_of(const std::string& id) const;  // -1 when absent
  const Edge* find_edge(int src, int dst) const;
  std::size_t node_count() const { return node_ids.size(); }
};

struct DecayConfig {
  // Contributions older than this match-index gap are dropped; the default
  // cut is numerically irrelevant (factor < 2e-22) but keeps accumulation
  // O(active teammates).
  std::optional<int> horizon = 50;
  // The growth form of the exponent, kept behind a flag for comparison runs.
  bool literal_growth_exponent = false;
};

// Rating delta of the history owner at match i, attributed to teammate t.
double short_term_weight(const PlayerHistory& history,
                         const rating::RatingTimeline& timeline, std::size_t i,
                         const std::string& teammate, double mu0);

// Same delta discounted by exp(-(i - i_pt)) where i_pt is the most recent
// co-play index; zero before the first co-play.
double long_term_weight(const PlayerHistory& history,
                        const rating::RatingTimeline& timeline, std::size_t i,
                        const std::string& teammate, double mu0,
                        const DecayConfig& cfg);

PerformanceNetwork aggregate_network(
    const std::map<std::string, PlayerHistory>& histories,
    const std::map<std::string, rating::RatingTimeline>& timelines,
    NetworkKind kind, const DecayConfig& cfg, double mu0);

// Drops edges whose pair co-played fewer than min_count matches. Nodes are
// kept even when isolated; LCC extraction deals with them next.
PerformanceNetwork threshold_edges(const PerformanceNetwork& net,
                                   int min_count = 3);

// Node-induced subgraph on the largest weakly connected component, ties
// broken by the smallest account id in the component.
PerformanceNetwork largest_connected_component(const PerformanceNetwork& net);

// Tau-b over the two weight vectors on the common edge list. Requires the
// two networks to share nodes and edges.
double kendall_tau_global(const PerformanceNetwork& spn,
                          const PerformanceNetwork& lpn);

struct PerPlayerTau {
  std::map<std::string, double> tau;
  std::size_t skipped{0};  // < 2 out-edges, or tau undefined
  std::vector<stats::HistogramBin> histogram;  // fixed [-1, 1] bins
};

PerPlayerTau kendall_tau_per_player(const PerformanceNetwork& spn,
                                    const PerformanceNetwork& lpn);

}  // namespace coplaynet::perfnet
