#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coplaynet {

// Error categories map onto CLI exit codes: DataError -> 2, NumericError -> 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Team : std::uint8_t { a, b };

// leaver_status 0 means the player stayed to the end of the match. The
// upstream data convention is easy to misread; see README "Leaver status".
struct PlayerSlot {
  std::string account_id;
  Team team{Team::a};
  int leaver_status{0};
};

struct MatchRecord {
  std::string match_id;
  std::int64_t start_time{0};
  std::int64_t duration{0};
  // Absent when the match ended on a connection error.
  std::optional<bool> team_a_win;
  std::vector<PlayerSlot> players;  // exactly 10 once validated
};

struct HistoryEntry {
  std::size_t match_index{0};  // position within the player's ordered history
  std::string match_id;
  std::array<std::string, 4> teammates;
};

struct PlayerHistory {
  std::string account_id;
  std::vector<HistoryEntry> entries;
};

}  // namespace coplaynet
