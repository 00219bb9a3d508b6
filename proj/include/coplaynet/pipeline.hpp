#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace coplaynet::pipeline {

// Plain-text key-value configuration with [section] headers. Keys are
// addressed as "section.key". CLI flags override config keys.
struct Config {
  std::map<std::string, std::string> values;

  static Config from_file(const std::string& path);
  static Config from_text(std::string_view text);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_str(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                std::vector<int> fallback) const;
  std::vector<std::string> get_str_list(
      const std::string& key, std::vector<std::string> fallback) const;

  // The single mandatory top-level seed; throws DataError when missing.
  std::uint64_t seed() const;
  std::string out_dir() const;
};

// Stage manifest: config echo, substream seed, input content hashes. Every
// stage output is reproducible from its manifest.
void write_manifest(const std::string& stage_dir, const std::string& stage,
                    const Config& cfg, std::uint64_t stage_seed,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_files);

// Stage entry points; each reads prior-stage artifacts from the output
// directory, writes its own subdirectory, and prints a short summary.
// Missing prior artifacts raise DataError naming the missing file.
void run_synth(const Config& cfg);
void run_ingest(const Config& cfg);
void run_rate(const Config& cfg);
void run_network(const Config& cfg);
void run_train(const Config& cfg);
void run_eval(const Config& cfg);
void run_report(const Config& cfg);

}  // namespace coplaynet::pipeline
