#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coplaynet/evaluate.hpp"
#include "coplaynet/ingest.hpp"
#include "coplaynet/models.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/rating.hpp"
#include "coplaynet/stats.hpp"

namespace coplaynet::io {

// Shortest representation that round-trips a double; stable across runs.
std::string format_double(double v);

std::vector<std::string> split(std::string_view line, char delim);

std::string read_file(const std::string& path);      // DataError if unreadable
void write_file(const std::string& path, std::string_view content);
std::uint64_t fnv1a64_file(const std::string& path);

// --- match logs -----------------------------------------------------------

void write_matches_jsonl(const std::string& path,
                         const std::vector<MatchRecord>& matches);
void write_matches_csv(const std::string& path,
                       const std::vector<MatchRecord>& matches);

// --- ingest artifacts ------------------------------------------------------

void write_rejects_csv(const std::string& path,
                       const std::vector<ingest::Reject>& rejects);
void write_histories_tsv(const std::string& path,
                         const std::map<std::string, PlayerHistory>& histories);
std::map<std::string, PlayerHistory> read_histories_tsv(
    const std::string& path);

// --- rating artifacts ------------------------------------------------------

void write_timelines_csv(
    const std::string& path,
    const std::map<std::string, rating::RatingTimeline>& timelines);
std::map<std::string, rating::RatingTimeline> read_timelines_csv(
    const std::string& path);
void write_decile_csv(const std::string& path,
                      const std::vector<rating::DecileRow>& rows);

// --- networks ---------------------------------------------------------------

// TSV edge list with a one-line header carrying kind and node count. The
// format cannot represent isolated nodes; writing such a network throws.
void write_network_tsv(const std::string& path,
                       const perfnet::PerformanceNetwork& net);
perfnet::PerformanceNetwork read_network_tsv(const std::string& path);

void write_histogram_csv(const std::string& path,
                         const std::vector<stats::HistogramBin>& bins);

// --- models ------------------------------------------------------------------

void save_factorization(
    const std::string& path, const models::FactorizationParams& params,
    std::uint64_t seed,
    const std::map<std::string, std::string>& config_echo = {});
models::FactorizationParams load_factorization(const std::string& path);
void save_autoencoder(
    const std::string& path, const models::AutoencoderParams& params,
    std::uint64_t seed, bool masked,
    const std::map<std::string, std::string>& config_echo = {});
models::AutoencoderParams load_autoencoder(const std::string& path,
                                           bool* masked = nullptr);
void write_embedding_csv(const std::string& path,
                         const std::vector<std::string>& node_ids,
                         const Matrix& y);

// --- evaluation -------------------------------------------------------------

void write_report_cells_csv(const std::string& path,
                            const std::vector<eval::MetricCell>& cells);
void write_report_aggregates_csv(const std::string& path,
                                 const std::vector<eval::AggregateRow>& rows);
// One file per (kind, d): exactly the columns k,model,value.
void write_curve_csv(const std::string& path,
                     const std::vector<eval::CurvePoint>& points);

// --- split artifacts ----------------------------------------------------------

void write_edges_tsv(const std::string& path,
                     const std::vector<perfnet::Edge>& edges,
                     const std::vector<std::string>& node_ids);
std::vector<perfnet::Edge> read_edges_tsv(
    const std::string& path, const std::vector<std::string>& node_ids);

}  // namespace coplaynet::io
