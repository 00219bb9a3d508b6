#include "coplaynet/rating.hpp"

#include <algorithm>
#include <cmath>

#include "coplaynet/stats.hpp"

namespace coplaynet::rating {

namespace {

using stats::norm_cdf;
using stats::norm_cdf_inv;
using stats::norm_pdf;

// Underflow floor applied to the cumulative before division.
constexpr double kCdfFloor = 1e-300;

void require_finite(const TeamRatings& team, const char* side) {
  for (const auto& r : team) {
    if (!std::isfinite(r.mu) || !std::isfinite(r.sigma) || r.sigma <= 0.0)
      throw DataError(std::string("update_two_team: non-finite rating on ") +
                      side);
  }
}

struct TeamStats {
  double mu_sum = 0.0;
  double var_sum = 0.0;  // tau-inflated
};

TeamStats team_stats(const TeamRatings& team, double tau) {
  TeamStats s;
  for (const auto& r : team) {
    s.mu_sum += r.mu;
    s.var_sum += r.sigma * r.sigma + tau * tau;
  }
  return s;
}

// Shared shift: each player's mean moves by +/- (sigma'^2 / c) * v and the
// variance shrinks by the factor (1 - (sigma'^2 / c^2) * w).
TeamRatings apply_update(const TeamRatings& team, double tau, double c,
                         double v, double w, double sign) {
  TeamRatings out;
  for (std::size_t i = 0; i < team.size(); ++i) {
    const double var = team[i].sigma * team[i].sigma + tau * tau;
    const double mu = team[i].mu + sign * (var / c) * v;
    const double var_post = var * (1.0 - (var / (c * c)) * w);
    if (!(var_post > 0.0) || !std::isfinite(mu))
      throw NumericError("update_two_team: posterior collapsed");
    out[i] = Rating{mu, std::sqrt(var_post)};
  }
  return out;
}

}  // namespace

void validate(const RatingConfig& config) {
  if (!(config.sigma0 > 0.0)) throw DataError("rating config: sigma0 must be > 0");
  if (!(config.beta > 0.0)) throw DataError("rating config: beta must be > 0");
  if (!(config.tau >= 0.0)) throw DataError("rating config: tau must be >= 0");
  if (!(config.draw_probability >= 0.0 && config.draw_probability < 1.0))
    throw DataError("rating config: draw_probability must be in [0, 1)");
  if (!std::isfinite(config.mu0)) throw DataError("rating config: mu0 must be finite");
}

Rating initial_rating(const RatingConfig& config) {
  validate(config);
  return Rating{config.mu0, config.sigma0};
}

double draw_margin(double draw_probability, int player_count, double beta) {
  if (draw_probability <= 0.0) return 0.0;
  return norm_cdf_inv(0.5 * (draw_probability + 1.0)) *
         std::sqrt(static_cast<double>(player_count)) * beta;
}

double v_decisive(double t, double eps) {
  const double x = t - eps;
  const double denom = std::max(norm_cdf(x), kCdfFloor);
  return norm_pdf(x) / denom;
}

double w_decisive(double t, double eps) {
  const double v = v_decisive(t, eps);
  return v * (v + t - eps);
}

double v_draw(double t, double eps) {
  const double a = -eps - t;
  const double b = eps - t;
  const double denom = std::max(norm_cdf(b) - norm_cdf(a), kCdfFloor);
  return (norm_pdf(a) - norm_pdf(b)) / denom;
}

double w_draw(double t, double eps) {
  const double a = -eps - t;
  const double b = eps - t;
  const double denom = std::max(norm_cdf(b) - norm_cdf(a), kCdfFloor);
  const double v = (norm_pdf(a) - norm_pdf(b)) / denom;
  return v * v + (b * norm_pdf(b) - a * norm_pdf(a)) / denom;
}

std::pair<TeamRatings, TeamRatings> update_two_team(const TeamRatings& team_a,
                                                    const TeamRatings& team_b,
                                                    Outcome outcome,
                                                    const RatingConfig& config) {
  validate(config);
  require_finite(team_a, "team A");
  require_finite(team_b, "team B");

  const int total_players = static_cast<int>(team_a.size() + team_b.size());
  const auto sa = team_stats(team_a, config.tau);
  const auto sb = team_stats(team_b, config.tau);
  const double c2 = sa.var_sum + sb.var_sum +
                    total_players * config.beta * config.beta;
  const double c = std::sqrt(c2);
  const double eps =
      draw_margin(config.draw_probability, total_players, config.beta) / c;

  if (outcome == Outcome::draw) {
    if (config.draw_probability <= 0.0)
      throw NumericError("update_two_team: draw with zero draw probability");
    const double t = (sa.mu_sum - sb.mu_sum) / c;
    const double v = v_draw(t, eps);
    const double w = w_draw(t, eps);
    return {apply_update(team_a, config.tau, c, v, w, +1.0),
            apply_update(team_b, config.tau, c, v, w, -1.0)};
  }

  const bool a_wins = outcome == Outcome::a_wins;
  const double t =
      (a_wins ? sa.mu_sum - sb.mu_sum : sb.mu_sum - sa.mu_sum) / c;
  const double v = v_decisive(t, eps);
  const double w = w_decisive(t, eps);
  return {apply_update(team_a, config.tau, c, v, w, a_wins ? +1.0 : -1.0),
          apply_update(team_b, config.tau, c, v, w, a_wins ? -1.0 : +1.0)};
}

std::map<std::string, RatingTimeline> rate_dataset(
    const std::vector<MatchRecord>& matches,
    const std::map<std::string, PlayerHistory>& histories,
    const RatingConfig& config) {
  validate(config);

  std::vector<const MatchRecord*> ordered;
  ordered.reserve(matches.size());
  for (const auto& m : matches) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(),
            [](const MatchRecord* a, const MatchRecord* b) {
              if (a->start_time != b->start_time)
                return a->start_time < b->start_time;
              return a->match_id < b->match_id;
            });

  std::map<std::string, Rating> current;
  std::map<std::string, RatingTimeline> timelines;
  std::map<std::string, std::size_t> next_index;
  for (const auto& [id, hist] : histories) {
    timelines[id] = RatingTimeline{id, {}};
    next_index[id] = 0;
  }

  for (const MatchRecord* match : ordered) {
    if (!match->team_a_win.has_value())
      throw DataError("rate_dataset: match without outcome: " +
                      match->match_id);
    if (match->players.size() != 10)
      throw DataError("rate_dataset: match without 10 players: " +
                      match->match_id);

    TeamRatings a{}, b{};
    std::array<const std::string*, 5> a_ids{}, b_ids{};
    std::size_t na = 0, nb = 0;
    for (const auto& slot : match->players) {
      auto [it, inserted] =
          current.try_emplace(slot.account_id, initial_rating(config));
      if (slot.team == Team::a) {
        a[na] = it->second;
        a_ids[na++] = &slot.account_id;
      } else {
        b[nb] = it->second;
        b_ids[nb++] = &slot.account_id;
      }
    }
    if (na != 5 || nb != 5)
      throw DataError("rate_dataset: teams must be 5v5: " + match->match_id);

    const Outcome outcome =
        *match->team_a_win ? Outcome::a_wins : Outcome::b_wins;
    auto [post_a, post_b] = update_two_team(a, b, outcome, config);

    for (std::size_t i = 0; i < 5; ++i) current[*a_ids[i]] = post_a[i];
    for (std::size_t i = 0; i < 5; ++i) current[*b_ids[i]] = post_b[i];

    for (const auto& slot : match->players) {
      auto it = timelines.find(slot.account_id);
      if (it == timelines.end()) continue;
      const std::size_t idx = next_index[slot.account_id]++;
      it->second.points.push_back({idx, current[slot.account_id]});
    }
  }
  return timelines;
}

std::vector<DecileRow> decile_timeline_report(
    const std::map<std::string, RatingTimeline>& timelines) {
  std::vector<const RatingTimeline*> players;
  for (const auto& [id, tl] : timelines)
    if (!tl.points.empty()) players.push_back(&tl);
  if (players.size() < 10)
    throw DataError("decile_timeline_report: insufficient population");

  std::sort(players.begin(), players.end(),
            [](const RatingTimeline* a, const RatingTimeline* b) {
              const double fa = a->points.back().rating.mu;
              const double fb = b->points.back().rating.mu;
              if (fa != fb) return fa < fb;
              return a->account_id < b->account_id;
            });

  const std::size_t n = players.size();
  const auto cut = [&](double q) {
    return static_cast<std::size_t>(std::floor(q * static_cast<double>(n)));
  };
  struct Group {
    const char* name;
    std::size_t lo, hi;
  };
  const Group groups[] = {{"bottom", 0, cut(0.10)},
                          {"median", cut(0.45), cut(0.55)},
                          {"top", n - cut(0.10), n}};

  std::vector<DecileRow> rows;
  for (const auto& g : groups) {
    std::size_t max_len = 0;
    for (std::size_t p = g.lo; p < g.hi; ++p)
      max_len = std::max(max_len, players[p]->points.size());
    for (std::size_t idx = 0; idx < max_len; ++idx) {
      std::vector<double> mus;
      for (std::size_t p = g.lo; p < g.hi; ++p) {
        const auto& pts = players[p]->points;
        if (idx < pts.size()) mus.push_back(pts[idx].rating.mu);
      }
      if (mus.empty()) continue;
      rows.push_back(
          {g.name, idx, stats::mean(mus), stats::stddev(mus)});
    }
  }
  return rows;
}

}  // namespace coplaynet::rating
