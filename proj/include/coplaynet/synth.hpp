#pragma once

#include <cstdint>
#include <map>

#include "coplaynet/linalg.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/types.hpp"

namespace coplaynet::synth {

enum class TeamPolicy { uniform, skill_sorted };

TeamPolicy parse_policy(const std::string& name);

struct SynthConfig {
  int players = 100;
  int matches = 500;
  double skill_sigma = 5.0;  // spread of latent skill across the population
  double transfer_coefficient = 0.0;
  TeamPolicy policy = TeamPolicy::uniform;
  std::uint64_t seed = 1;
  // Logistic slope per rating point of team skill-sum difference; 0.1 gives
  // ~50% upsets early and separable deciles after ~50 matches.
  double outcome_slope = 0.1;
};

struct SynthLog {
  std::vector<MatchRecord> matches;
  std::map<std::string, double> initial_latent_skill;
  std::map<std::string, double> latent_skill;  // after transfer effects
};

// 5v5 matches drawn per policy; outcome sampled from a logistic in the team
// latent-skill difference. Deterministic under seed. Generated logs pass
// every ingest validation with zero rejects.
SynthLog generate_match_log(const SynthConfig& cfg);

enum class Nonlinearity { none, odd_power };

struct PlantedConfig {
  int nodes = 200;
  int d_true = 4;
  double noise = 0.1;
  double density = 0.2;
  Nonlinearity nonlinearity = Nonlinearity::none;
  // Signed-power exponent sign(z)*|z|^p for the odd_power regime. The
  // sub-linear default compresses tails, which keeps the row manifold easy
  // to learn while its linear rank stays effectively full.
  double power = 1.0 / 3.0;
  // When positive, the first factor coordinate becomes a per-source level:
  // b_j carries a constant 1 there and a_i draws from N(0, row_effect_sigma),
  // planting consistent per-player baseline influence.
  double row_effect_sigma = 0.0;
  std::uint64_t seed = 1;
};

struct PlantedNetwork {
  perfnet::PerformanceNetwork net;  // observed (noisy) weights
  Matrix true_weights;              // noiseless weight for every ordered pair
  Matrix source_factors;            // n x d_true
  Matrix target_factors;            // n x d_true
};

// w_ij = phi(<a_i, b_j>) + noise: phi identity in the linear regime, or a
// signed power with its linear component regressed out so the best bilinear
// predictor carries no direct signal. Isolated nodes (possible at low
// density) are dropped so the result round-trips the edge-list format.
PlantedNetwork generate_planted_network(const PlantedConfig& cfg);

}  // namespace coplaynet::synth
