#include "coplaynet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coplaynet/rng.hpp"

namespace coplaynet::synth {

TeamPolicy parse_policy(const std::string& name) {
  if (name == "uniform") return TeamPolicy::uniform;
  if (name == "skill-sorted" || name == "skill_sorted")
    return TeamPolicy::skill_sorted;
  throw DataError("unknown team policy: " + name);
}

namespace {

std::string padded(const char* prefix, int value, int width) {
  std::string digits = std::to_string(value);
  std::string out = prefix;
  for (int i = static_cast<int>(digits.size()); i < width; ++i)
    out.push_back('0');
  return out + digits;
}

}  // namespace

SynthLog generate_match_log(const SynthConfig& cfg) {
  if (cfg.players < 10)
    throw DataError("generate_match_log: players must be >= 10");
  if (cfg.matches < 1)
    throw DataError("generate_match_log: matches must be >= 1");

  SynthLog log;
  std::vector<std::string> ids(static_cast<std::size_t>(cfg.players));
  std::vector<double> skill(static_cast<std::size_t>(cfg.players));
  {
    auto rng = make_rng(cfg.seed, "synth-skills");
    std::normal_distribution<double> draw(0.0, cfg.skill_sigma);
    for (int p = 0; p < cfg.players; ++p) {
      ids[static_cast<std::size_t>(p)] = padded("p", p, 6);
      skill[static_cast<std::size_t>(p)] = draw(rng);
      log.initial_latent_skill[ids[static_cast<std::size_t>(p)]] =
          skill[static_cast<std::size_t>(p)];
    }
  }

  auto rng = make_rng(cfg.seed, "synth-matches");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> duration(1200, 3600);

  std::vector<int> pool(static_cast<std::size_t>(cfg.players));
  std::iota(pool.begin(), pool.end(), 0);

  for (int m = 0; m < cfg.matches; ++m) {
    // Ten distinct participants per policy.
    std::array<int, 10> picked{};
    if (cfg.policy == TeamPolicy::uniform) {
      for (int k = 0; k < 10; ++k) {
        std::uniform_int_distribution<int> pick(k, cfg.players - 1);
        std::swap(pool[static_cast<std::size_t>(k)],
                  pool[static_cast<std::size_t>(pick(rng))]);
        picked[static_cast<std::size_t>(k)] = pool[static_cast<std::size_t>(k)];
      }
    } else {
      // Matchmaking-flavored: a contiguous window of ten in skill order.
      std::vector<int> by_skill(pool.size());
      std::iota(by_skill.begin(), by_skill.end(), 0);
      std::sort(by_skill.begin(), by_skill.end(), [&](int a, int b) {
        const double sa = skill[static_cast<std::size_t>(a)];
        const double sb = skill[static_cast<std::size_t>(b)];
        if (sa != sb) return sa < sb;
        return a < b;
      });
      std::uniform_int_distribution<int> window(0, cfg.players - 10);
      const int lo = window(rng);
      for (int k = 0; k < 10; ++k)
        picked[static_cast<std::size_t>(k)] =
            by_skill[static_cast<std::size_t>(lo + k)];
    }

    MatchRecord rec;
    rec.match_id = padded("m", m, 7);
    rec.start_time = 1'000'000 + static_cast<std::int64_t>(m) * 60;
    rec.duration = duration(rng);
    double sum_a = 0.0, sum_b = 0.0;
    for (int k = 0; k < 10; ++k) {
      // Alternating assignment keeps skill-sorted teams balanced.
      const Team team = (k % 2 == 0) ? Team::a : Team::b;
      const int p = picked[static_cast<std::size_t>(k)];
      rec.players.push_back({ids[static_cast<std::size_t>(p)], team, 0});
      (team == Team::a ? sum_a : sum_b) += skill[static_cast<std::size_t>(p)];
    }
    const double p_a_wins =
        1.0 / (1.0 + std::exp(-cfg.outcome_slope * (sum_a - sum_b)));
    rec.team_a_win = coin(rng) < p_a_wins;

    if (cfg.transfer_coefficient != 0.0) {
      // Skill transfer uses pre-match values for every participant.
      std::array<double, 10> updated{};
      for (int k = 0; k < 10; ++k) {
        const int p = picked[static_cast<std::size_t>(k)];
        double mates = 0.0;
        for (int j = 0; j < 10; ++j) {
          if (j == k || rec.players[static_cast<std::size_t>(j)].team !=
                            rec.players[static_cast<std::size_t>(k)].team)
            continue;
          mates += skill[static_cast<std::size_t>(
              picked[static_cast<std::size_t>(j)])];
        }
        mates /= 4.0;
        updated[static_cast<std::size_t>(k)] =
            skill[static_cast<std::size_t>(p)] +
            cfg.transfer_coefficient *
                (mates - skill[static_cast<std::size_t>(p)]);
      }
      for (int k = 0; k < 10; ++k)
        skill[static_cast<std::size_t>(picked[static_cast<std::size_t>(k)])] =
            updated[static_cast<std::size_t>(k)];
    }
    log.matches.push_back(std::move(rec));
  }

  for (int p = 0; p < cfg.players; ++p)
    log.latent_skill[ids[static_cast<std::size_t>(p)]] =
        skill[static_cast<std::size_t>(p)];
  return log;
}

PlantedNetwork generate_planted_network(const PlantedConfig& cfg) {
  if (cfg.nodes < 2) throw DataError("generate_planted_network: nodes >= 2");
  if (cfg.d_true < 1) throw DataError("generate_planted_network: d_true >= 1");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0))
    throw DataError("generate_planted_network: density must be in (0, 1]");

  const int n = cfg.nodes;
  const bool row_effect = cfg.row_effect_sigma > 0.0;
  if (row_effect && cfg.d_true < 2)
    throw DataError("generate_planted_network: row effect needs d_true >= 2");
  Matrix a(n, cfg.d_true), b(n, cfg.d_true);
  {
    auto rng = make_rng(cfg.seed, "planted-factors");
    // Entry scale keeps the interaction part of <a_i, b_j> near unit
    // variance.
    const int interaction_dims = row_effect ? cfg.d_true - 1 : cfg.d_true;
    std::normal_distribution<double> draw(
        0.0, std::pow(static_cast<double>(interaction_dims), -0.25));
    for (double& x : a.data) x = draw(rng);
    for (double& x : b.data) x = draw(rng);
    if (row_effect) {
      std::normal_distribution<double> level(0.0, cfg.row_effect_sigma);
      for (int i = 0; i < n; ++i) {
        a(i, 0) = level(rng);
        b(i, 0) = 1.0;
      }
    }
  }

  Matrix truth(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) truth(i, j) = dot(a.row(i), b.row(j));

  if (cfg.nonlinearity == Nonlinearity::odd_power) {
    if (!(cfg.power > 0.0))
      throw DataError("generate_planted_network: power must be > 0");
    // Signed power with its linear component regressed out, so the planted
    // weights carry no signal a bilinear model could pick up directly.
    // Rescaled to unit variance to keep both regimes on the same scale.
    const auto signed_power = [&](double z) {
      return z >= 0.0 ? std::pow(z, cfg.power) : -std::pow(-z, cfg.power);
    };
    double pz = 0.0, z2 = 0.0;
    const double pairs = static_cast<double>(n) * (n - 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double z = truth(i, j);
        pz += signed_power(z) * z;
        z2 += z * z;
      }
    const double slope = pz / z2;
    double w2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double z = truth(i, j);
        truth(i, j) = signed_power(z) - slope * z;
        w2 += truth(i, j) * truth(i, j);
      }
    const double scale = 1.0 / std::sqrt(w2 / pairs);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) truth(i, j) *= scale;
  }

  auto rng = make_rng(cfg.seed, "planted-edges");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> eps(0.0, 1.0);

  std::vector<perfnet::Edge> raw;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (cfg.density < 1.0 && coin(rng) >= cfg.density) continue;
      raw.push_back({i, j, truth(i, j) + cfg.noise * eps(rng), 3});
    }
  }

  // Drop isolated nodes so the result survives the edge-list format.
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  for (const auto& e : raw) {
    active[static_cast<std::size_t>(e.src)] = 1;
    active[static_cast<std::size_t>(e.dst)] = 1;
  }
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  PlantedNetwork out;
  out.net.kind = perfnet::NetworkKind::spn;
  for (int i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    remap[static_cast<std::size_t>(i)] =
        static_cast<int>(out.net.node_ids.size());
    out.net.node_ids.push_back(padded("n", i, 6));
  }
  const int kept = static_cast<int>(out.net.node_ids.size());
  out.true_weights = Matrix(kept, kept);
  out.source_factors = Matrix(kept, cfg.d_true);
  out.target_factors = Matrix(kept, cfg.d_true);
  for (int i = 0; i < n; ++i) {
    const int ri = remap[static_cast<std::size_t>(i)];
    if (ri < 0) continue;
    std::copy(a.row(i).begin(), a.row(i).end(),
              out.source_factors.row(ri).begin());
    std::copy(b.row(i).begin(), b.row(i).end(),
              out.target_factors.row(ri).begin());
    for (int j = 0; j < n; ++j) {
      const int rj = remap[static_cast<std::size_t>(j)];
      if (rj >= 0) out.true_weights(ri, rj) = truth(i, j);
    }
  }
  for (const auto& e : raw)
    out.net.edges.push_back({remap[static_cast<std::size_t>(e.src)],
                             remap[static_cast<std::size_t>(e.dst)], e.weight,
                             e.co_play_count});
  return out;
}

}  // namespace coplaynet::synth
