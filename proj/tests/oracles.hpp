// Independent oracles used by the unit and acceptance suites. Everything in
// here recomputes results through a different route than the library code it
// checks: quadrature instead of closed forms, pair enumeration instead of
// merge counting, per-pair scans instead of running accumulators.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coplaynet/models.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/rating.hpp"
#include "coplaynet/types.hpp"

namespace oracles {

// --- truncated-Gaussian moments by adaptive Simpson -----------------------

struct TruncatedMoments {
  double mass;
  double mean;
  double variance;
};

// Moments of a standard normal restricted to [lo, hi] (either side may be
// +/- infinity in spirit; integration clips at |z| = 45).
TruncatedMoments truncated_standard_moments(double lo, double hi);

// Posterior ratings for the two-team update, derived from the numerically
// integrated truncated moments plus exact conditional-Gaussian algebra.
std::pair<coplaynet::rating::TeamRatings, coplaynet::rating::TeamRatings>
update_two_team(const coplaynet::rating::TeamRatings& team_a,
                const coplaynet::rating::TeamRatings& team_b,
                coplaynet::rating::Outcome outcome,
                const coplaynet::rating::RatingConfig& config);

// --- network aggregation by brute-force double loop -----------------------

coplaynet::perfnet::PerformanceNetwork aggregate_network(
    const std::map<std::string, coplaynet::PlayerHistory>& histories,
    const std::map<std::string, coplaynet::rating::RatingTimeline>& timelines,
    coplaynet::perfnet::NetworkKind kind,
    const coplaynet::perfnet::DecayConfig& cfg, double mu0);

// --- Kendall tau by O(n^2) pair counting -----------------------------------

double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// --- largest weakly connected component by flood fill ----------------------

std::vector<std::string> lcc_node_ids(
    const coplaynet::perfnet::PerformanceNetwork& net);

// --- naive metric recomputations -------------------------------------------

double mse(std::span<const double> test_weights,
           std::span<const double> predicted);

// Repeated max selection instead of sorting.
double avg_rec_at_k(const std::vector<coplaynet::perfnet::Edge>& test_edges,
                    const std::vector<double>& predicted, std::size_t k);

// Exhaustive rank enumeration per node.
double mane(const std::vector<coplaynet::perfnet::Edge>& test_edges,
            const std::vector<coplaynet::perfnet::Edge>& train_edges,
            const std::function<double(int, int)>& predict);

// --- finite differences ------------------------------------------------------

// Central difference of `eval` with respect to the coordinate at `coord`.
double central_difference(const std::function<double()>& eval, double* coord,
                          double h = 1e-5);

// Random autoencoder parameters and data whose pre-activations stay clear of
// the rectifier kinks, so central differences remain on one linear piece.
struct AeGradFixture {
  coplaynet::models::AutoencoderParams params;
  coplaynet::Matrix x;
  coplaynet::Mask mask;
};
AeGradFixture ae_gradcheck_fixture(int n, int d, std::uint64_t seed);

// --- synthetic fixtures -------------------------------------------------------

// Preferential-attachment network: heavy-tailed degrees, weakly connected by
// construction, weights mildly correlated with hub size.
coplaynet::perfnet::PerformanceNetwork heavy_tailed_network(
    int nodes, int out_degree, std::uint64_t seed);

}  // namespace oracles
