#include "coplaynet/perfnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coplaynet::perfnet {

const char* kind_name(NetworkKind kind) {
  return kind == NetworkKind::spn ? "SPN" : "LPN";
}

NetworkKind parse_kind(std::string_view name) {
  if (name == "SPN" || name == "spn") return NetworkKind::spn;
  if (name == "LPN" || name == "lpn") return NetworkKind::lpn;
  throw DataError("unknown network kind: " + std::string(name));
}

int PerformanceNetwork::index_of(const std::string& id) const {
  const auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
  if (it == node_ids.end() || *it != id) return -1;
  return static_cast<int>(it - node_ids.begin());
}

const Edge* PerformanceNetwork::find_edge(int src, int dst) const {
  const auto it = std::lower_bound(
      edges.begin(), edges.end(), std::pair{src, dst},
      [](const Edge& e, const std::pair<int, int>& key) {
        return std::pair{e.src, e.dst} < key;
      });
  if (it == edges.end() || it->src != src || it->dst != dst) return nullptr;
  return &*it;
}

namespace {

// mu after history entry i; entry -1 is the initial rating.
double mu_at(const rating::RatingTimeline& timeline, std::ptrdiff_t i,
             double mu0) {
  if (i < 0) return mu0;
  const auto idx = static_cast<std::size_t>(i);
  if (idx >= timeline.points.size() ||
      timeline.points[idx].match_index != idx)
    throw DataError("rating gap: " + timeline.account_id + " at index " +
                    std::to_string(i));
  return timeline.points[idx].rating.mu;
}

double delta_at(const rating::RatingTimeline& timeline, std::size_t i,
                double mu0) {
  return mu_at(timeline, static_cast<std::ptrdiff_t>(i), mu0) -
         mu_at(timeline, static_cast<std::ptrdiff_t>(i) - 1, mu0);
}

double decay_factor(std::size_t gap, const DecayConfig& cfg) {
  const double g = static_cast<double>(gap);
  return cfg.literal_growth_exponent ? std::exp(g) : std::exp(-g);
}

void sort_edges(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
  });
}

}  // namespace

double short_term_weight(const PlayerHistory& history,
                         const rating::RatingTimeline& timeline, std::size_t i,
                         const std::string& teammate, double mu0) {
  if (i >= history.entries.size())
    throw DataError("short_term_weight: match index out of range");
  const auto& mates = history.entries[i].teammates;
  if (std::find(mates.begin(), mates.end(), teammate) == mates.end())
    throw DataError("short_term_weight: " + teammate +
                    " is not a teammate at index " + std::to_string(i));
  return delta_at(timeline, i, mu0);
}

double long_term_weight(const PlayerHistory& history,
                        const rating::RatingTimeline& timeline, std::size_t i,
                        const std::string& teammate, double mu0,
                        const DecayConfig& cfg) {
  if (i >= history.entries.size())
    throw DataError("long_term_weight: match index out of range");
  // Most recent co-play index at or before i; zero contribution before the
  // first co-play.
  std::ptrdiff_t last = -1;
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i); k >= 0; --k) {
    const auto& mates = history.entries[static_cast<std::size_t>(k)].teammates;
    if (std::find(mates.begin(), mates.end(), teammate) != mates.end()) {
      last = k;
      break;
    }
  }
  if (last < 0) return 0.0;
  const std::size_t gap = i - static_cast<std::size_t>(last);
  if (cfg.horizon && gap > static_cast<std::size_t>(*cfg.horizon)) return 0.0;
  return decay_factor(gap, cfg) * delta_at(timeline, i, mu0);
}

PerformanceNetwork aggregate_network(
    const std::map<std::string, PlayerHistory>& histories,
    const std::map<std::string, rating::RatingTimeline>& timelines,
    NetworkKind kind, const DecayConfig& cfg, double mu0) {
  PerformanceNetwork net;
  net.kind = kind;
  net.node_ids.reserve(histories.size());
  for (const auto& [id, hist] : histories) net.node_ids.push_back(id);
  // std::map iteration is already sorted; keep the assumption explicit.
  std::sort(net.node_ids.begin(), net.node_ids.end());

  std::map<std::pair<int, int>, Edge> edges;
  const auto accumulate = [&](int src, int dst, double weight, int count) {
    auto [it, inserted] =
        edges.try_emplace({src, dst}, Edge{src, dst, 0.0, 0});
    it->second.weight += weight;
    it->second.co_play_count += count;
  };

  for (const auto& [id, history] : histories) {
    const int src = net.index_of(id);
    const auto tl_it = timelines.find(id);
    if (tl_it == timelines.end())
      throw DataError("rating gap: no timeline for " + id);
    const auto& timeline = tl_it->second;

    // Retained teammates seen so far, with their latest co-play index.
    std::map<int, std::size_t> last_co_play;
    for (std::size_t i = 0; i < history.entries.size(); ++i) {
      const double delta = delta_at(timeline, i, mu0);
      for (const auto& mate : history.entries[i].teammates) {
        const int dst = net.index_of(mate);
        if (dst < 0) continue;  // non-retained teammates never become nodes
        last_co_play[dst] = i;
        accumulate(src, dst, kind == NetworkKind::spn
                                 ? delta
                                 : decay_factor(0, cfg) * delta,
                   1);
      }
      if (kind == NetworkKind::lpn) {
        for (const auto& [dst, last] : last_co_play) {
          if (last == i) continue;  // contributed above with factor one
          const std::size_t gap = i - last;
          if (cfg.horizon && gap > static_cast<std::size_t>(*cfg.horizon))
            continue;
          accumulate(src, dst, decay_factor(gap, cfg) * delta, 0);
        }
      }
    }
  }

  net.edges.reserve(edges.size());
  for (const auto& [key, edge] : edges) net.edges.push_back(edge);
  sort_edges(net.edges);
  return net;
}

PerformanceNetwork threshold_edges(const PerformanceNetwork& net,
                                   int min_count) {
  PerformanceNetwork out;
  out.kind = net.kind;
  out.node_ids = net.node_ids;
  for (const auto& e : net.edges)
    if (e.co_play_count >= min_count) out.edges.push_back(e);
  return out;
}

PerformanceNetwork largest_connected_component(
    const PerformanceNetwork& net) {
  if (net.node_ids.empty()) return PerformanceNetwork{net.kind, {}, {}};

  const int n = static_cast<int>(net.node_ids.size());
  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& e : net.edges) {
    adjacency[e.src].push_back(e.dst);
    adjacency[e.dst].push_back(e.src);
  }

  int n_components = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    const int comp = n_components++;
    stack.push_back(start);
    component[start] = comp;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adjacency[u]) {
        if (component[v] < 0) {
          component[v] = comp;
          stack.push_back(v);
        }
      }
    }
  }

  std::vector<int> size(n_components, 0);
  for (int v = 0; v < n; ++v) ++size[component[v]];
  // Largest component; ties go to the one containing the smallest id, which
  // is the first one discovered since node ids are sorted.
  int best = 0;
  for (int c = 1; c < n_components; ++c)
    if (size[c] > size[best]) best = c;

  PerformanceNetwork out;
  out.kind = net.kind;
  std::vector<int> remap(n, -1);
  for (int v = 0; v < n; ++v) {
    if (component[v] == best) {
      remap[v] = static_cast<int>(out.node_ids.size());
      out.node_ids.push_back(net.node_ids[v]);
    }
  }
  for (const auto& e : net.edges) {
    if (remap[e.src] >= 0 && remap[e.dst] >= 0)
      out.edges.push_back({remap[e.src], remap[e.dst], e.weight,
                           e.co_play_count});
  }
  sort_edges(out.edges);
  return out;
}

namespace {

// Common edge list of two same-structure networks, as two weight vectors.
std::pair<std::vector<double>, std::vector<double>> aligned_weights(
    const PerformanceNetwork& spn, const PerformanceNetwork& lpn) {
  if (spn.node_ids != lpn.node_ids || spn.edges.size() != lpn.edges.size())
    throw DataError("kendall_tau: networks must share nodes and edges");
  std::vector<double> x, y;
  x.reserve(spn.edges.size());
  y.reserve(spn.edges.size());
  for (std::size_t i = 0; i < spn.edges.size(); ++i) {
    const auto& a = spn.edges[i];
    const auto& b = lpn.edges[i];
    if (a.src != b.src || a.dst != b.dst)
      throw DataError("kendall_tau: edge lists do not align");
    x.push_back(a.weight);
    y.push_back(b.weight);
  }
  return {std::move(x), std::move(y)};
}

}  // namespace

double kendall_tau_global(const PerformanceNetwork& spn,
                          const PerformanceNetwork& lpn) {
  auto [x, y] = aligned_weights(spn, lpn);
  if (x.size() < 2)
    throw DataError("kendall_tau_global: need at least 2 edges");
  return stats::kendall_tau_b(x, y);
}

PerPlayerTau kendall_tau_per_player(const PerformanceNetwork& spn,
                                    const PerformanceNetwork& lpn) {
  aligned_weights(spn, lpn);  // structural check

  PerPlayerTau result;
  std::vector<std::vector<std::pair<int, double>>> out_spn(
      spn.node_ids.size()),
      out_lpn(lpn.node_ids.size());
  for (const auto& e : spn.edges) out_spn[e.src].emplace_back(e.dst, e.weight);
  for (const auto& e : lpn.edges) out_lpn[e.src].emplace_back(e.dst, e.weight);

  std::vector<double> values;
  for (std::size_t p = 0; p < spn.node_ids.size(); ++p) {
    if (out_spn[p].size() < 2) {
      ++result.skipped;
      continue;
    }
    std::vector<double> x, y;
    for (std::size_t k = 0; k < out_spn[p].size(); ++k) {
      x.push_back(out_spn[p][k].second);
      y.push_back(out_lpn[p][k].second);
    }
    try {
      const double tau = stats::kendall_tau_b(x, y);
      result.tau[spn.node_ids[p]] = tau;
      values.push_back(tau);
    } catch (const DataError&) {
      ++result.skipped;  // constant out-weights, tau undefined
    }
  }
  if (!values.empty())
    result.histogram = stats::histogram(values, -1.0, 1.0, 20);
  return result;
}

}  // namespace coplaynet::perfnet
