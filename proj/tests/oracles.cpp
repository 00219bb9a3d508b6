#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "coplaynet/rng.hpp"

namespace oracles {

using namespace coplaynet;

namespace {

double gauss_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

double simpson(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = simpson(f, a, mid);
  const double right = simpson(f, mid, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, mid, b, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  // Unit-width panels keep the adaptive refinement local.
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(lo + 1.0, b);
    total += adaptive_simpson(f, lo, hi, simpson(f, lo, hi), 1e-14, 40);
    lo = hi;
  }
  return total;
}

}  // namespace

TruncatedMoments truncated_standard_moments(double lo, double hi) {
  const double a = std::max(lo, -45.0);
  const double b = std::min(hi, 45.0);
  const double mass = integrate(gauss_pdf, a, b);
  const double m1 = integrate([](double z) { return z * gauss_pdf(z); }, a, b);
  const double m2 =
      integrate([](double z) { return z * z * gauss_pdf(z); }, a, b);
  const double mean = m1 / mass;
  return {mass, mean, m2 / mass - mean * mean};
}

std::pair<rating::TeamRatings, rating::TeamRatings> update_two_team(
    const rating::TeamRatings& team_a, const rating::TeamRatings& team_b,
    rating::Outcome outcome, const rating::RatingConfig& config) {
  const double tau2 = config.tau * config.tau;
  double mu_a = 0.0, mu_b = 0.0, var_sum = 0.0;
  for (const auto& r : team_a) {
    mu_a += r.mu;
    var_sum += r.sigma * r.sigma + tau2;
  }
  for (const auto& r : team_b) {
    mu_b += r.mu;
    var_sum += r.sigma * r.sigma + tau2;
  }
  const double c2 = var_sum + 10.0 * config.beta * config.beta;
  const double c = std::sqrt(c2);
  const double eps =
      rating::draw_margin(config.draw_probability, 10, config.beta);

  // The difference d between the relevant team performances is Gaussian;
  // the observed outcome truncates it. Conditioning each skill on the
  // truncation event is exact linear-Gaussian algebra once the truncated
  // moments are known, and those come from quadrature here.
  double delta;  // mean of d
  double z_lo, z_hi;
  double sign_a;  // sign of cov(s_i, d) for team-A members, +/- sigma'^2
  if (outcome == rating::Outcome::a_wins) {
    delta = mu_a - mu_b;
    z_lo = (eps - delta) / c;
    z_hi = 1e9;
    sign_a = +1.0;
  } else if (outcome == rating::Outcome::b_wins) {
    delta = mu_b - mu_a;
    z_lo = (eps - delta) / c;
    z_hi = 1e9;
    sign_a = -1.0;
  } else {
    delta = mu_a - mu_b;
    z_lo = (-eps - delta) / c;
    z_hi = (eps - delta) / c;
    sign_a = +1.0;
  }

  const auto moments = truncated_standard_moments(z_lo, z_hi);
  const double d_mean_shift = c * moments.mean;           // E[d|R] - delta
  const double d_var = c2 * moments.variance;             // Var[d|R]

  const auto condition = [&](const rating::Rating& r, double sign) {
    const double var = r.sigma * r.sigma + tau2;
    const double a_coef = sign * var / c2;
    const double mu_post = r.mu + a_coef * d_mean_shift;
    const double var_post = var - a_coef * a_coef * (c2 - d_var);
    return rating::Rating{mu_post, std::sqrt(var_post)};
  };

  rating::TeamRatings post_a{}, post_b{};
  for (std::size_t i = 0; i < 5; ++i) {
    post_a[i] = condition(team_a[i], sign_a);
    post_b[i] = condition(team_b[i], -sign_a);
  }
  return {post_a, post_b};
}

perfnet::PerformanceNetwork aggregate_network(
    const std::map<std::string, PlayerHistory>& histories,
    const std::map<std::string, rating::RatingTimeline>& timelines,
    perfnet::NetworkKind kind, const perfnet::DecayConfig& cfg, double mu0) {
  perfnet::PerformanceNetwork net;
  net.kind = kind;
  for (const auto& [id, h] : histories) net.node_ids.push_back(id);
  std::sort(net.node_ids.begin(), net.node_ids.end());

  for (int src = 0; src < static_cast<int>(net.node_ids.size()); ++src) {
    const auto& history = histories.at(net.node_ids[src]);
    const auto& timeline = timelines.at(net.node_ids[src]);
    for (int dst = 0; dst < static_cast<int>(net.node_ids.size()); ++dst) {
      if (dst == src) continue;
      const std::string& mate = net.node_ids[dst];
      double weight = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < history.entries.size(); ++i) {
        const double mu_now = timeline.points.at(i).rating.mu;
        const double mu_prev =
            i == 0 ? mu0 : timeline.points.at(i - 1).rating.mu;
        const double delta = mu_now - mu_prev;
        const auto& mates = history.entries[i].teammates;
        const bool together =
            std::find(mates.begin(), mates.end(), mate) != mates.end();
        if (together) {
          ++count;
          weight += kind == perfnet::NetworkKind::spn
                        ? delta
                        : (cfg.literal_growth_exponent ? std::exp(0.0)
                                                       : std::exp(-0.0)) *
                              delta;
          continue;
        }
        if (kind != perfnet::NetworkKind::lpn) continue;
        // Most recent co-play strictly before i, found by backward scan.
        std::ptrdiff_t last = -1;
        for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - 1; k >= 0;
             --k) {
          const auto& past = history.entries[static_cast<std::size_t>(k)];
          if (std::find(past.teammates.begin(), past.teammates.end(), mate) !=
              past.teammates.end()) {
            last = k;
            break;
          }
        }
        if (last < 0) continue;
        const auto gap = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(i) - last);
        if (cfg.horizon && gap > static_cast<std::size_t>(*cfg.horizon))
          continue;
        const double g = static_cast<double>(gap);
        weight += (cfg.literal_growth_exponent ? std::exp(g) : std::exp(-g)) *
                  delta;
      }
      if (count > 0) net.edges.push_back({src, dst, weight, count});
    }
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const perfnet::Edge& a, const perfnet::Edge& b) {
              return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
            });
  return net;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::uint64_t concordant = 0, discordant = 0, tie_x = 0, tie_y = 0,
                tie_both = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++tie_both;
      } else if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const std::uint64_t n0 = n * (n - 1) / 2;
  const std::uint64_t xtie = tie_x + tie_both;
  const std::uint64_t ytie = tie_y + tie_both;
  return static_cast<double>(static_cast<std::int64_t>(concordant) -
                             static_cast<std::int64_t>(discordant)) /
         std::sqrt(static_cast<double>(n0 - xtie) *
                   static_cast<double>(n0 - ytie));
}

std::vector<std::string> lcc_node_ids(
    const perfnet::PerformanceNetwork& net) {
  std::map<std::string, std::set<std::string>> adjacency;
  for (const auto& id : net.node_ids) adjacency[id];
  for (const auto& e : net.edges) {
    const auto& a = net.node_ids[static_cast<std::size_t>(e.src)];
    const auto& b = net.node_ids[static_cast<std::size_t>(e.dst)];
    adjacency[a].insert(b);
    adjacency[b].insert(a);
  }

  std::set<std::string> unvisited(net.node_ids.begin(), net.node_ids.end());
  std::vector<std::string> best;
  while (!unvisited.empty()) {
    std::vector<std::string> component;
    std::vector<std::string> frontier{*unvisited.begin()};
    unvisited.erase(unvisited.begin());
    while (!frontier.empty()) {
      const std::string cur = frontier.back();
      frontier.pop_back();
      component.push_back(cur);
      for (const auto& nb : adjacency[cur]) {
        const auto it = unvisited.find(nb);
        if (it != unvisited.end()) {
          unvisited.erase(it);
          frontier.push_back(nb);
        }
      }
    }
    std::sort(component.begin(), component.end());
    // Strictly larger wins; components are discovered smallest-id first, so
    // ties keep the earlier one.
    if (component.size() > best.size()) best = component;
  }
  return best;
}

double mse(std::span<const double> test_weights,
           std::span<const double> predicted) {
  double sum = 0.0;
  for (std::size_t i = 0; i < test_weights.size(); ++i)
    sum += (test_weights[i] - predicted[i]) * (test_weights[i] - predicted[i]);
  return sum / static_cast<double>(test_weights.size());
}

double avg_rec_at_k(const std::vector<perfnet::Edge>& test_edges,
                    const std::vector<double>& predicted, std::size_t k) {
  std::vector<char> used(test_edges.size(), 0);
  double sum = 0.0;
  for (std::size_t pick = 0; pick < k; ++pick) {
    std::size_t best = test_edges.size();
    for (std::size_t i = 0; i < test_edges.size(); ++i) {
      if (used[i]) continue;
      if (best == test_edges.size() || predicted[i] > predicted[best])
        best = i;  // ties keep the earlier index
    }
    used[best] = 1;
    sum += test_edges[best].weight;
  }
  return sum / static_cast<double>(k);
}

double mane(const std::vector<perfnet::Edge>& test_edges,
            const std::vector<perfnet::Edge>& train_edges,
            const std::function<double(int, int)>& predict) {
  std::set<int> nodes;
  for (const auto& e : test_edges) nodes.insert(e.src);

  double total = 0.0;
  std::size_t eligible = 0;
  for (const int node : nodes) {
    std::vector<perfnet::Edge> trains, tests;
    for (const auto& e : train_edges)
      if (e.src == node) trains.push_back(e);
    for (const auto& e : test_edges)
      if (e.src == node) tests.push_back(e);
    if (trains.empty()) continue;

    struct Entry {
      int dst;
      double w;
    };
    std::vector<Entry> by_pred, by_true;
    for (const auto& e : trains) {
      by_pred.push_back({e.dst, e.weight});
      by_true.push_back({e.dst, e.weight});
    }
    for (const auto& e : tests) {
      by_pred.push_back({e.dst, predict(node, e.dst)});
      by_true.push_back({e.dst, e.weight});
    }
    // rank = 1 + number of entries strictly ahead under (weight desc, dst asc)
    const auto rank_of = [](const std::vector<Entry>& list, int dst) {
      double w = 0.0;
      for (const auto& e : list)
        if (e.dst == dst) w = e.w;
      std::size_t ahead = 0;
      for (const auto& e : list) {
        if (e.dst == dst) continue;
        if (e.w > w || (e.w == w && e.dst < dst)) ++ahead;
      }
      return ahead + 1;
    };
    double displacement = 0.0;
    for (const auto& e : tests) {
      const double rp = static_cast<double>(rank_of(by_pred, e.dst));
      const double rt = static_cast<double>(rank_of(by_true, e.dst));
      displacement += std::abs(rp - rt);
    }
    total += displacement / (static_cast<double>(trains.size()) *
                             static_cast<double>(tests.size()));
    ++eligible;
  }
  return total / static_cast<double>(eligible);
}

double central_difference(const std::function<double()>& eval, double* coord,
                          double h) {
  const double orig = *coord;
  *coord = orig + h;
  const double fp = eval();
  *coord = orig - h;
  const double fm = eval();
  *coord = orig;
  return (fp - fm) / (2.0 * h);
}

AeGradFixture ae_gradcheck_fixture(int n, int d, std::uint64_t seed) {
  using coplaynet::models::Activation;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s =
        coplaynet::substream_seed(seed, "ae-gradcheck") + attempt;
    auto params = coplaynet::models::make_autoencoder(n, d, s);
    auto rng = coplaynet::make_rng(s, "gradcheck-data");
    coplaynet::Matrix x(n, n);
    std::normal_distribution<double> w(0.0, 1.0);
    for (double& v : x.data) v = w(rng);
    coplaynet::Mask mask(n, n);
    std::bernoulli_distribution keep(0.5);
    for (auto& m : mask.data) m = keep(rng) ? 1 : 0;

    const auto margins_ok = [&](std::vector<double> cur) {
      for (const auto* part : {&params.encoder, &params.decoder}) {
        for (const auto& layer : *part) {
          std::vector<double> next(layer.b.size());
          for (std::size_t r = 0; r < layer.b.size(); ++r) {
            double z = layer.b[r];
            for (std::size_t c = 0; c < cur.size(); ++c)
              z += layer.w(static_cast<int>(r), static_cast<int>(c)) * cur[c];
            if (layer.act == Activation::relu && std::abs(z) < 1e-2)
              return false;
            next[r] = layer.act == Activation::relu ? std::max(z, 0.0) : z;
          }
          cur = std::move(next);
        }
      }
      return true;
    };

    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      std::vector<double> raw(x.row(i).begin(), x.row(i).end());
      std::vector<double> masked = raw;
      for (int j = 0; j < n; ++j)
        if (!mask(i, j)) masked[static_cast<std::size_t>(j)] = 0.0;
      ok = margins_ok(raw) && margins_ok(masked);
    }
    if (ok) return {std::move(params), std::move(x), std::move(mask)};
  }
}

perfnet::PerformanceNetwork heavy_tailed_network(int nodes, int out_degree,
                                                 std::uint64_t seed) {
  perfnet::PerformanceNetwork net;
  net.kind = perfnet::NetworkKind::spn;
  for (int i = 0; i < nodes; ++i) {
    std::string id = "h";
    const std::string digits = std::to_string(i);
    id.append(6 - digits.size(), '0');
    id += digits;
    net.node_ids.push_back(std::move(id));
  }

  auto rng = make_rng(seed, "heavy-tailed");
  std::normal_distribution<double> noise(0.0, 1.0);
  // Endpoint multiset makes attachment degree-proportional.
  std::vector<int> endpoints;
  std::vector<int> degree(static_cast<std::size_t>(nodes), 0);
  std::set<std::pair<int, int>> present;

  for (int v = 1; v < nodes; ++v) {
    const int attach = std::min(out_degree, v);
    for (int e = 0; e < attach; ++e) {
      int u = -1;
      for (int attempt = 0; attempt < 20; ++attempt) {
        if (endpoints.empty()) {
          u = std::uniform_int_distribution<int>(0, v - 1)(rng);
        } else {
          u = endpoints[std::uniform_int_distribution<std::size_t>(
              0, endpoints.size() - 1)(rng)];
        }
        if (u != v && !present.count({v, u})) break;
        u = -1;
      }
      if (u < 0) continue;
      // Weight leans on the hub's size so sampling bias would show up.
      const double weight =
          noise(rng) +
          0.25 * std::log1p(static_cast<double>(degree[static_cast<std::size_t>(u)]));
      net.edges.push_back({v, u, weight, 3});
      present.insert({v, u});
      endpoints.push_back(v);
      endpoints.push_back(u);
      ++degree[static_cast<std::size_t>(v)];
      ++degree[static_cast<std::size_t>(u)];
    }
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const perfnet::Edge& a, const perfnet::Edge& b) {
              return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
            });
  return net;
}

}  // namespace oracles
