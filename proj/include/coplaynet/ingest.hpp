#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>

#include "coplaynet/types.hpp"

namespace coplaynet::ingest {

enum class LogFormat { jsonl, csv };

LogFormat parse_format(std::string_view name);  // "jsonl" | "csv"

struct Reject {
  std::size_t record_ordinal;  // 0-based record index within the input
  std::string reason;
};

struct ParseResult {
  std::vector<MatchRecord> matches;  // sorted by (start_time, match_id)
  std::vector<Reject> rejects;
};

// Returns the reject reason for an invalid record, nullopt when valid.
std::optional<std::string> validate_match(const MatchRecord& match);

// Unreadable file is fatal (DataError); malformed records are rejected
// per record and never abort the parse.
ParseResult parse_match_log(const std::string& path, LogFormat format);
ParseResult parse_match_log_text(std::string_view text, LogFormat format);

// Keeps matches with a present winner flag and all ten players staying to
// the end. Pure and idempotent; preserves temporal order.
std::vector<MatchRecord> filter_valid_matches(
    const std::vector<MatchRecord>& matches);

struct ExperiencedResult {
  std::set<std::string> players;
  std::map<std::string, PlayerHistory> histories;
};

// Players need at least min_matches valid matches before their rating is
// meaningful; matches themselves are never dropped here, so histories can
// reference teammates that did not make the cut.
ExperiencedResult filter_experienced_players(
    const std::vector<MatchRecord>& matches, std::size_t min_matches = 46);

std::map<std::string, PlayerHistory> build_histories(
    const std::vector<MatchRecord>& matches,
    const std::set<std::string>& players);

}  // namespace coplaynet::ingest
