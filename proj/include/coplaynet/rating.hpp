#pragma once

#include <array>
#include <map>
#include <utility>

#include "coplaynet/types.hpp"

namespace coplaynet::rating {

// Gaussian skill belief: mean and uncertainty, both in rating points.
struct Rating {
  double mu{25.0};
  double sigma{25.0 / 3.0};
};

struct RatingConfig {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;   // performance noise
  double tau = 25.0 / 300.0;  // dynamics noise, applied before every update
  double draw_probability = 0.10;
};

// Throws DataError when a config invariant is violated.
void validate(const RatingConfig& config);

Rating initial_rating(const RatingConfig& config);

enum class Outcome { a_wins, b_wins, draw };

using TeamRatings = std::array<Rating, 5>;

// Two-team Bayesian update, moment matched at the team-difference factor.
// Throws DataError on non-finite inputs.
std::pair<TeamRatings, TeamRatings> update_two_team(const TeamRatings& team_a,
                                                    const TeamRatings& team_b,
                                                    Outcome outcome,
                                                    const RatingConfig& config);

struct TimelinePoint {
  std::size_t match_index;
  Rating rating;
};

struct RatingTimeline {
  std::string account_id;
  std::vector<TimelinePoint> points;
};

// Single forward pass in match order. All ten participants are rated
// (unseen players start at the default); timelines are recorded only for
// players present in `histories`.
std::map<std::string, RatingTimeline> rate_dataset(
    const std::vector<MatchRecord>& matches,
    const std::map<std::string, PlayerHistory>& histories,
    const RatingConfig& config);

struct DecileRow {
  std::string group;  // "bottom" | "median" | "top"
  std::size_t match_index;
  double mean_mu;
  double std_mu;
};

// Groups players by final-rating percentile (bottom 10%, 45-55%, top 10%)
// and reports the mean/std of mu at each match index per group.
std::vector<DecileRow> decile_timeline_report(
    const std::map<std::string, RatingTimeline>& timelines);

// Truncated-Gaussian correction terms, exposed for direct testing.
double v_decisive(double t, double eps);
double w_decisive(double t, double eps);
double v_draw(double t, double eps);
double w_draw(double t, double eps);
double draw_margin(double draw_probability, int player_count, double beta);

}  // namespace coplaynet::rating
