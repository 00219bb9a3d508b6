#include "coplaynet/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coplaynet::ingest {

namespace {

using nlohmann::json;

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// match_id / account_id may arrive as a string or an integer.
std::string id_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  throw DataError("id must be a string or an integer");
}

std::optional<Team> parse_team(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "A") return Team::a;
    if (s == "B") return Team::b;
    return std::nullopt;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<std::int64_t>();
    if (n == 0) return Team::a;
    if (n == 1) return Team::b;
  }
  return std::nullopt;
}

std::optional<MatchRecord> record_from_json(std::string_view line,
                                            std::string* reason) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    *reason = "bad-json";
    return std::nullopt;
  }
  if (!j.is_object()) {
    *reason = "bad-json";
    return std::nullopt;
  }
  for (const char* field : {"match_id", "start_time", "duration",
                            "radiant_win", "players"}) {
    if (!j.contains(field)) {
      *reason = "missing-field";
      return std::nullopt;
    }
  }
  MatchRecord rec;
  try {
    rec.match_id = id_to_string(j["match_id"]);
    if (!j["start_time"].is_number() || !j["duration"].is_number())
      throw DataError("numbers expected");
    rec.start_time = j["start_time"].get<std::int64_t>();
    rec.duration = j["duration"].get<std::int64_t>();
    if (j["radiant_win"].is_null()) {
      rec.team_a_win = std::nullopt;
    } else if (j["radiant_win"].is_boolean()) {
      rec.team_a_win = j["radiant_win"].get<bool>();
    } else {
      throw DataError("radiant_win must be bool or null");
    }
    if (!j["players"].is_array()) throw DataError("players must be an array");
    for (const auto& p : j["players"]) {
      PlayerSlot slot;
      if (!p.contains("account_id") || !p.contains("team") ||
          !p.contains("leaver_status")) {
        *reason = "missing-field";
        return std::nullopt;
      }
      slot.account_id = id_to_string(p["account_id"]);
      const auto team = parse_team(p["team"]);
      if (!team) throw DataError("bad team");
      slot.team = *team;
      if (!p["leaver_status"].is_number_integer() &&
          !p["leaver_status"].is_number_unsigned())
        throw DataError("bad leaver_status");
      slot.leaver_status = p["leaver_status"].get<int>();
      rec.players.push_back(std::move(slot));
    }
  } catch (const std::exception&) {
    *reason = "bad-field-value";
    return std::nullopt;
  }
  return rec;
}

constexpr std::string_view kCsvHeader =
    "match_id,start_time,duration,radiant_win,account_id,team,leaver_status";

struct CsvRow {
  std::string match_id;
  std::int64_t start_time;
  std::int64_t duration;
  std::optional<bool> team_a_win;
  PlayerSlot slot;
};

std::optional<CsvRow> parse_csv_row(const std::string& line,
                                    std::string* reason) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 7) {
    *reason = "bad-field-value";
    return std::nullopt;
  }
  CsvRow row;
  try {
    row.match_id = trim(fields[0]);
    row.start_time = std::stoll(trim(fields[1]));
    row.duration = std::stoll(trim(fields[2]));
    std::string win = trim(fields[3]);
    std::transform(win.begin(), win.end(), win.begin(), ::tolower);
    if (win.empty() || win == "null") {
      row.team_a_win = std::nullopt;
    } else if (win == "true" || win == "1") {
      row.team_a_win = true;
    } else if (win == "false" || win == "0") {
      row.team_a_win = false;
    } else {
      throw DataError("bad radiant_win");
    }
    row.slot.account_id = trim(fields[4]);
    const std::string team = trim(fields[5]);
    if (team == "A" || team == "0") {
      row.slot.team = Team::a;
    } else if (team == "B" || team == "1") {
      row.slot.team = Team::b;
    } else {
      throw DataError("bad team");
    }
    row.slot.leaver_status = std::stoi(trim(fields[6]));
  } catch (const std::exception&) {
    *reason = "bad-field-value";
    return std::nullopt;
  }
  if (row.match_id.empty()) {
    *reason = "bad-field-value";
    return std::nullopt;
  }
  return row;
}

void sort_by_time(std::vector<MatchRecord>& matches) {
  std::sort(matches.begin(), matches.end(),
            [](const MatchRecord& a, const MatchRecord& b) {
              if (a.start_time != b.start_time)
                return a.start_time < b.start_time;
              return a.match_id < b.match_id;
            });
}

ParseResult parse_jsonl(std::istream& in) {
  ParseResult result;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const std::size_t record_ordinal = ordinal++;
    std::string reason;
    auto rec = record_from_json(line, &reason);
    if (!rec) {
      result.rejects.push_back({record_ordinal, reason});
      continue;
    }
    if (auto invalid = validate_match(*rec)) {
      result.rejects.push_back({record_ordinal, *invalid});
      continue;
    }
    if (!seen_ids.insert(rec->match_id).second) {
      result.rejects.push_back({record_ordinal, "duplicate-match-id"});
      continue;
    }
    result.matches.push_back(std::move(*rec));
  }
  sort_by_time(result.matches);
  return result;
}

ParseResult parse_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    return {};  // empty file: no records, no rejects
  if (trim(header) != kCsvHeader)
    throw DataError("csv header must be exactly: " + std::string(kCsvHeader));

  // Rows grouped by match_id in order of first appearance; one group is one
  // record for reject accounting.
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<CsvRow>> groups;
  std::vector<std::pair<std::size_t, std::string>> row_rejects;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    std::string reason;
    auto row = parse_csv_row(line, &reason);
    if (!row) {
      row_rejects.emplace_back(group_order.size(), reason);
      continue;
    }
    auto [it, inserted] = groups.try_emplace(row->match_id);
    if (inserted) group_order.push_back(row->match_id);
    it->second.push_back(std::move(*row));
  }

  ParseResult result;
  for (const auto& [ordinal, reason] : row_rejects)
    result.rejects.push_back({ordinal, reason});
  for (std::size_t ordinal = 0; ordinal < group_order.size(); ++ordinal) {
    const auto& rows = groups[group_order[ordinal]];
    MatchRecord rec;
    rec.match_id = rows.front().match_id;
    rec.start_time = rows.front().start_time;
    rec.duration = rows.front().duration;
    rec.team_a_win = rows.front().team_a_win;
    bool consistent = true;
    for (const auto& row : rows) {
      if (row.start_time != rec.start_time || row.duration != rec.duration ||
          row.team_a_win != rec.team_a_win) {
        consistent = false;
        break;
      }
      rec.players.push_back(row.slot);
    }
    if (!consistent) {
      result.rejects.push_back({ordinal, "inconsistent-match-fields"});
      continue;
    }
    if (auto invalid = validate_match(rec)) {
      result.rejects.push_back({ordinal, *invalid});
      continue;
    }
    result.matches.push_back(std::move(rec));
  }
  std::sort(result.rejects.begin(), result.rejects.end(),
            [](const auto& a, const auto& b) {
              return a.record_ordinal < b.record_ordinal;
            });
  sort_by_time(result.matches);
  return result;
}

}  // namespace

LogFormat parse_format(std::string_view name) {
  if (name == "jsonl") return LogFormat::jsonl;
  if (name == "csv") return LogFormat::csv;
  throw DataError("unknown log format: " + std::string(name) +
                  " (expected jsonl or csv)");
}

std::optional<std::string> validate_match(const MatchRecord& match) {
  if (match.match_id.empty()) return "bad-field-value";
  if (match.players.size() != 10) return "bad-slot-count";
  int team_a = 0;
  for (const auto& slot : match.players) {
    if (slot.account_id.empty()) return "empty-account-id";
    if (slot.team == Team::a) ++team_a;
  }
  if (team_a != 5) return "bad-team-split";
  std::set<std::string> ids;
  for (const auto& slot : match.players)
    if (!ids.insert(slot.account_id).second) return "duplicate-player";
  return std::nullopt;
}

ParseResult parse_match_log(const std::string& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open match log: " + path);
  return format == LogFormat::jsonl ? parse_jsonl(in) : parse_csv(in);
}

ParseResult parse_match_log_text(std::string_view text, LogFormat format) {
  std::istringstream in{std::string(text)};
  return format == LogFormat::jsonl ? parse_jsonl(in) : parse_csv(in);
}

std::vector<MatchRecord> filter_valid_matches(
    const std::vector<MatchRecord>& matches) {
  std::vector<MatchRecord> out;
  for (const auto& m : matches) {
    if (!m.team_a_win.has_value()) continue;
    const bool all_stayed =
        std::all_of(m.players.begin(), m.players.end(),
                    [](const PlayerSlot& s) { return s.leaver_status == 0; });
    if (all_stayed) out.push_back(m);
  }
  return out;
}

ExperiencedResult filter_experienced_players(
    const std::vector<MatchRecord>& matches, std::size_t min_matches) {
  std::map<std::string, std::size_t> counts;
  for (const auto& m : matches)
    for (const auto& slot : m.players) ++counts[slot.account_id];
  ExperiencedResult result;
  for (const auto& [id, n] : counts)
    if (n >= min_matches) result.players.insert(id);
  result.histories = build_histories(matches, result.players);
  return result;
}

std::map<std::string, PlayerHistory> build_histories(
    const std::vector<MatchRecord>& matches,
    const std::set<std::string>& players) {
  std::vector<MatchRecord> ordered = matches;
  std::sort(ordered.begin(), ordered.end(),
            [](const MatchRecord& a, const MatchRecord& b) {
              if (a.start_time != b.start_time)
                return a.start_time < b.start_time;
              return a.match_id < b.match_id;
            });

  std::map<std::string, PlayerHistory> histories;
  for (const auto& id : players) histories[id] = PlayerHistory{id, {}};

  for (const auto& match : ordered) {
    for (const auto& slot : match.players) {
      auto it = histories.find(slot.account_id);
      if (it == histories.end()) continue;
      HistoryEntry entry;
      entry.match_index = it->second.entries.size();
      entry.match_id = match.match_id;
      std::size_t k = 0;
      for (const auto& other : match.players) {
        if (other.team == slot.team && other.account_id != slot.account_id)
          entry.teammates[k++] = other.account_id;
      }
      it->second.entries.push_back(std::move(entry));
    }
  }
  return histories;
}

}  // namespace coplaynet::ingest
