#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "coplaynet/types.hpp"

namespace fixtures {

// A 5v5 match from ten account ids; first five on team A.
inline coplaynet::MatchRecord make_match(
    const std::string& match_id, std::int64_t start_time,
    const std::vector<std::string>& ids, bool team_a_win = true) {
  coplaynet::MatchRecord m;
  m.match_id = match_id;
  m.start_time = start_time;
  m.duration = 1800;
  m.team_a_win = team_a_win;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    m.players.push_back({ids[i],
                         i < 5 ? coplaynet::Team::a : coplaynet::Team::b, 0});
  }
  return m;
}

// Scratch directory under the build tree, wiped on construction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / "coplaynet_tests" / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace fixtures
