#include "coplaynet/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "coplaynet/evaluate.hpp"
#include "coplaynet/ingest.hpp"
#include "coplaynet/io.hpp"
#include "coplaynet/models.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/rating.hpp"
#include "coplaynet/rng.hpp"
#include "coplaynet/synth.hpp"
#include "coplaynet/types.hpp"
#include "json.hpp"

namespace coplaynet::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------------ config

Config Config::from_file(const std::string& path) {
  return from_text(io::read_file(path));
}

Config Config::from_text(std::string_view text) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line, section;
  while (std::getline(in, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError("config: malformed section header: " + line);
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config: expected key = value: " + line);
    auto trim = [](std::string s) {
      const auto lo = s.find_first_not_of(" \t");
      if (lo == std::string::npos) return std::string();
      const auto hi = s.find_last_not_of(" \t");
      return s.substr(lo, hi - lo + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw DataError("config: empty key: " + line);
    cfg.values[section.empty() ? key : section + "." + key] =
        trim(line.substr(eq + 1));
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values.count(key); }

void Config::set(const std::string& key, std::string value) {
  values[key] = std::move(value);
}

std::string Config::get_str(const std::string& key,
                            std::string fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw DataError("config: " + key + " is not a number: " + it->second);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw DataError("config: " + key + " is not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw DataError("config: " + key + " is not a bool: " + it->second);
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw DataError("config: " + key + " is not an integer: " + it->second);
  }
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      std::vector<int> fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<int> out;
  for (const auto& part : io::split(it->second, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stoi(part));
  }
  if (out.empty())
    throw DataError("config: " + key + " must list at least one integer");
  return out;
}

std::vector<std::string> Config::get_str_list(
    const std::string& key, std::vector<std::string> fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<std::string> out;
  for (auto& part : io::split(it->second, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

std::uint64_t Config::seed() const {
  if (!has("pipeline.seed"))
    throw DataError(
        "config: pipeline.seed is mandatory (pass --seed or set it)");
  return get_u64("pipeline.seed", 0);
}

std::string Config::out_dir() const { return get_str("pipeline.out", "out"); }

// ---------------------------------------------------------------- manifest

void write_manifest(const std::string& stage_dir, const std::string& stage,
                    const Config& cfg, std::uint64_t stage_seed,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_files) {
  json j;
  j["stage"] = stage;
  j["stage_seed"] = stage_seed;
  json echo;
  for (const auto& [k, v] : cfg.values) echo[k] = v;
  j["config"] = std::move(echo);
  json inputs;
  for (const auto& path : input_paths) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(io::fnv1a64_file(path)));
    inputs[path] = buf;
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = output_files;
  io::write_file(stage_dir + "/manifest.json", j.dump(2) + "\n");
}

// ------------------------------------------------------------------ stages

namespace {

std::string stage_dir(const Config& cfg, const std::string& stage) {
  const std::string dir = cfg.out_dir() + "/" + stage;
  fs::create_directories(dir);
  return dir;
}

std::string require_artifact(const std::string& path,
                             const std::string& producer) {
  if (!fs::exists(path))
    throw DataError("missing artifact " + path + " (run `" + producer +
                    "` first)");
  return path;
}

rating::RatingConfig rating_config(const Config& cfg) {
  rating::RatingConfig rc;
  rc.mu0 = cfg.get_double("rating.mu0", rc.mu0);
  rc.sigma0 = cfg.get_double("rating.sigma0", rc.sigma0);
  rc.beta = cfg.get_double("rating.beta", rc.beta);
  rc.tau = cfg.get_double("rating.tau", rc.tau);
  rc.draw_probability =
      cfg.get_double("rating.draw_probability", rc.draw_probability);
  rating::validate(rc);
  return rc;
}

perfnet::DecayConfig decay_config(const Config& cfg) {
  perfnet::DecayConfig dc;
  const int horizon = cfg.get_int("network.horizon", *dc.horizon);
  if (horizon <= 0)
    dc.horizon = std::nullopt;
  else
    dc.horizon = horizon;
  dc.literal_growth_exponent =
      cfg.get_bool("network.literal_growth", dc.literal_growth_exponent);
  return dc;
}

models::GfConfig gf_config(const Config& cfg) {
  models::GfConfig gc;
  gc.lambda = cfg.get_double("models.lambda", gc.lambda);
  gc.learning_rate = cfg.get_double("models.gf_learning_rate", gc.learning_rate);
  gc.epochs = cfg.get_int("models.gf_epochs", gc.epochs);
  return gc;
}

models::TrainConfig ae_config(const Config& cfg) {
  models::TrainConfig tc;
  tc.learning_rate = cfg.get_double("models.learning_rate", tc.learning_rate);
  tc.momentum = cfg.get_double("models.momentum", tc.momentum);
  tc.batch_size = cfg.get_int("models.batch_size", tc.batch_size);
  tc.epochs = cfg.get_int("models.epochs", tc.epochs);
  tc.patience = cfg.get_int("models.patience", tc.patience);
  return tc;
}

std::vector<eval::ModelKind> model_list(const Config& cfg) {
  const auto names = cfg.get_str_list(
      "models.list",
      {"baseline", "factorization", "traditional_ae", "teammate_ae"});
  std::vector<eval::ModelKind> kinds;
  for (const auto& n : names) kinds.push_back(eval::parse_model(n));
  return kinds;
}

std::string checkpoint_path(const std::string& dir, const std::string& model,
                            const std::string& kind, int d) {
  return dir + "/model_" + model + "_" + kind + "_d" + std::to_string(d) +
         ".json";
}

void write_planted_truth(const std::string& path,
                         const synth::PlantedNetwork& planted) {
  std::ostringstream out;
  out << "src,dst,true_weight\n";
  const auto& ids = planted.net.node_ids;
  for (int i = 0; i < planted.true_weights.rows; ++i) {
    for (int j = 0; j < planted.true_weights.cols; ++j) {
      if (i == j) continue;
      out << ids[static_cast<std::size_t>(i)] << ','
          << ids[static_cast<std::size_t>(j)] << ','
          << io::format_double(planted.true_weights(i, j)) << "\n";
    }
  }
  io::write_file(path, out.str());
}

}  // namespace

void run_synth(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "synth");
  const std::uint64_t seed = substream_seed(cfg.seed(), "synth");
  const std::string mode = cfg.get_str("synth.mode", "log");
  std::vector<std::string> outputs;

  if (mode == "log") {
    synth::SynthConfig sc;
    sc.players = cfg.get_int("synth.players", sc.players);
    sc.matches = cfg.get_int("synth.matches", sc.matches);
    sc.skill_sigma = cfg.get_double("synth.skill_sigma", sc.skill_sigma);
    sc.transfer_coefficient =
        cfg.get_double("synth.transfer", sc.transfer_coefficient);
    sc.policy = synth::parse_policy(cfg.get_str("synth.policy", "uniform"));
    sc.outcome_slope = cfg.get_double("synth.outcome_slope", sc.outcome_slope);
    sc.seed = seed;
    const auto log = synth::generate_match_log(sc);

    const std::string format = cfg.get_str("pipeline.format", "jsonl");
    if (format == "jsonl") {
      io::write_matches_jsonl(dir + "/matches.jsonl", log.matches);
      outputs.push_back("matches.jsonl");
    } else if (format == "csv") {
      io::write_matches_csv(dir + "/matches.csv", log.matches);
      outputs.push_back("matches.csv");
    } else {
      throw DataError("unknown format: " + format);
    }
    std::ostringstream skills;
    skills << "account_id,initial_skill,final_skill\n";
    for (const auto& [id, initial] : log.initial_latent_skill) {
      skills << id << ',' << io::format_double(initial) << ','
             << io::format_double(log.latent_skill.at(id)) << "\n";
    }
    io::write_file(dir + "/latent_skills.csv", skills.str());
    outputs.push_back("latent_skills.csv");
    std::cout << "synth: wrote " << log.matches.size() << " matches for "
              << sc.players << " players\n";
  } else if (mode == "planted") {
    synth::PlantedConfig pc;
    pc.nodes = cfg.get_int("synth.nodes", pc.nodes);
    pc.d_true = cfg.get_int("synth.d_true", pc.d_true);
    pc.noise = cfg.get_double("synth.noise", pc.noise);
    pc.density = cfg.get_double("synth.density", pc.density);
    pc.nonlinearity = cfg.get_str("synth.nonlinearity", "none") == "odd-power"
                          ? synth::Nonlinearity::odd_power
                          : synth::Nonlinearity::none;
    pc.seed = seed;
    const auto planted = synth::generate_planted_network(pc);
    io::write_network_tsv(dir + "/planted.tsv", planted.net);
    write_planted_truth(dir + "/planted_truth.csv", planted);
    outputs.push_back("planted.tsv");
    outputs.push_back("planted_truth.csv");
    std::cout << "synth: wrote planted network with "
              << planted.net.node_count() << " nodes, "
              << planted.net.edges.size() << " edges\n";
  } else {
    throw DataError("unknown synth mode: " + mode + " (log or planted)");
  }
  write_manifest(dir, "synth", cfg, seed, {}, outputs);
}

void run_ingest(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "ingest");
  const std::string format_name = cfg.get_str(
      "ingest.format", cfg.get_str("pipeline.format", "jsonl"));
  std::string input = cfg.get_str("ingest.input", "");
  if (input.empty())
    input = cfg.out_dir() + "/synth/matches." + format_name;
  require_artifact(input, "coplaynet synth");

  const auto parsed =
      ingest::parse_match_log(input, ingest::parse_format(format_name));
  const auto valid = ingest::filter_valid_matches(parsed.matches);
  const auto min_matches =
      static_cast<std::size_t>(cfg.get_int("ingest.min_matches", 46));
  const auto experienced =
      ingest::filter_experienced_players(valid, min_matches);

  io::write_matches_jsonl(dir + "/valid_matches.jsonl", valid);
  io::write_histories_tsv(dir + "/histories.tsv", experienced.histories);
  io::write_rejects_csv(dir + "/rejects.csv", parsed.rejects);
  write_manifest(dir, "ingest", cfg, 0, {input},
                 {"valid_matches.jsonl", "histories.tsv", "rejects.csv"});

  std::cout << "ingest: parsed " << parsed.matches.size() << " matches, "
            << parsed.rejects.size() << " rejects, kept " << valid.size()
            << " valid, retained " << experienced.players.size()
            << " players (>= " << min_matches << " matches)\n";
}

void run_rate(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "rate");
  const std::string matches_path = require_artifact(
      cfg.out_dir() + "/ingest/valid_matches.jsonl", "coplaynet ingest");
  const std::string histories_path = require_artifact(
      cfg.out_dir() + "/ingest/histories.tsv", "coplaynet ingest");

  const auto parsed =
      ingest::parse_match_log(matches_path, ingest::LogFormat::jsonl);
  const auto histories = io::read_histories_tsv(histories_path);
  const auto timelines =
      rating::rate_dataset(parsed.matches, histories, rating_config(cfg));

  io::write_timelines_csv(dir + "/timelines.csv", timelines);
  write_manifest(dir, "rate", cfg, 0, {matches_path, histories_path},
                 {"timelines.csv"});

  std::size_t points = 0;
  for (const auto& [id, tl] : timelines) points += tl.points.size();
  std::cout << "rate: " << timelines.size() << " timelines, " << points
            << " rating points\n";
}

void run_network(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "network");
  const std::string histories_path = require_artifact(
      cfg.out_dir() + "/ingest/histories.tsv", "coplaynet ingest");
  const std::string timelines_path = require_artifact(
      cfg.out_dir() + "/rate/timelines.csv", "coplaynet rate");

  const auto histories = io::read_histories_tsv(histories_path);
  const auto timelines = io::read_timelines_csv(timelines_path);
  const auto decay = decay_config(cfg);
  const double mu0 = cfg.get_double("rating.mu0", 25.0);
  const int threshold = cfg.get_int("network.threshold", 3);

  const auto spn_full = perfnet::aggregate_network(
      histories, timelines, perfnet::NetworkKind::spn, decay, mu0);
  const auto lpn_full = perfnet::aggregate_network(
      histories, timelines, perfnet::NetworkKind::lpn, decay, mu0);

  // Co-occurrence distribution before thresholding (per directed pair).
  {
    std::vector<double> counts;
    counts.reserve(spn_full.edges.size());
    for (const auto& e : spn_full.edges)
      counts.push_back(static_cast<double>(e.co_play_count));
    if (!counts.empty())
      io::write_histogram_csv(dir + "/cooccur_hist.csv",
                              stats::histogram_auto(counts, 30));
  }

  const auto spn = perfnet::largest_connected_component(
      perfnet::threshold_edges(spn_full, threshold));
  const auto lpn = perfnet::largest_connected_component(
      perfnet::threshold_edges(lpn_full, threshold));
  if (spn.node_ids != lpn.node_ids || spn.edges.size() != lpn.edges.size())
    throw NumericError("network: SPN and LPN LCCs diverged");

  io::write_network_tsv(dir + "/spn.tsv", spn);
  io::write_network_tsv(dir + "/lpn.tsv", lpn);

  const auto weight_range = [](const perfnet::PerformanceNetwork& net) {
    double lo = 0.0, hi = 0.0;
    for (const auto& e : net.edges) {
      lo = std::min(lo, e.weight);
      hi = std::max(hi, e.weight);
    }
    return std::pair{lo, hi};
  };
  std::ostringstream summary;
  summary << "scope,nodes,links,spn_weight_min,spn_weight_max,lpn_weight_min,"
             "lpn_weight_max\n";
  const auto [flo, fhi] = weight_range(spn_full);
  const auto [glo, ghi] = weight_range(lpn_full);
  summary << "network," << spn_full.node_count() << ','
          << spn_full.edges.size() << ',' << io::format_double(flo) << ','
          << io::format_double(fhi) << ',' << io::format_double(glo) << ','
          << io::format_double(ghi) << "\n";
  const auto [slo, shi] = weight_range(spn);
  const auto [llo, lhi] = weight_range(lpn);
  summary << "lcc," << spn.node_count() << ',' << spn.edges.size() << ','
          << io::format_double(slo) << ',' << io::format_double(shi) << ','
          << io::format_double(llo) << ',' << io::format_double(lhi) << "\n";
  io::write_file(dir + "/summary.csv", summary.str());

  write_manifest(dir, "network", cfg, 0, {histories_path, timelines_path},
                 {"spn.tsv", "lpn.tsv", "summary.csv", "cooccur_hist.csv"});
  std::cout << "network: LCC has " << spn.node_count() << " nodes, "
            << spn.edges.size() << " links (from " << spn_full.node_count()
            << " nodes, " << spn_full.edges.size() << " links)\n";
}

void run_train(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "train");
  const std::uint64_t seed = substream_seed(cfg.seed(), "train");
  const auto kinds = cfg.get_str_list("models.kinds", {"SPN", "LPN"});
  const auto d_sweep = cfg.get_int_list("models.d_sweep", {16, 64});
  const auto list = model_list(cfg);

  std::vector<std::string> inputs, outputs;
  for (const auto& kind : kinds) {
    const std::string net_path = require_artifact(
        cfg.out_dir() + "/network/" +
            (perfnet::parse_kind(kind) == perfnet::NetworkKind::spn
                 ? "spn.tsv"
                 : "lpn.tsv"),
        "coplaynet network");
    inputs.push_back(net_path);
    const auto net = io::read_network_tsv(net_path);
    const int n = static_cast<int>(net.node_count());

    eval::SplitSpec split_spec;
    split_spec.hide_fraction =
        cfg.get_double("split.hide_fraction", split_spec.hide_fraction);
    split_spec.seed = substream_seed(seed, "split:" + kind);
    const auto split = eval::split_edges(net, split_spec);
    io::write_edges_tsv(dir + "/train_" + kind + ".tsv", split.train.edges,
                        net.node_ids);
    io::write_edges_tsv(dir + "/test_" + kind + ".tsv", split.test_edges,
                        net.node_ids);
    outputs.push_back("train_" + kind + ".tsv");
    outputs.push_back("test_" + kind + ".tsv");

    const auto train = models::training_edges(split.train);
    const Matrix x_rows = models::adjacency_rows(train, n);
    const Mask mask = models::observation_mask(train, n);

    for (const int d : d_sweep) {
      for (const auto mk : list) {
        if (mk == eval::ModelKind::baseline) continue;
        const std::string name = eval::model_name(mk);
        const std::string path = checkpoint_path(dir, name, kind, d);
        const std::uint64_t model_seed = substream_seed(
            seed, "train:" + name + ":" + kind + ":" + std::to_string(d));
        if (mk == eval::ModelKind::factorization) {
          models::GfConfig gc = gf_config(cfg);
          gc.d = d;
          gc.seed = model_seed;
          const auto params = models::gf_train(train, n, gc);
          io::save_factorization(
              path, params, model_seed,
              {{"d", std::to_string(gc.d)},
               {"lambda", io::format_double(gc.lambda)},
               {"learning_rate", io::format_double(gc.learning_rate)},
               {"epochs", std::to_string(gc.epochs)}});
          io::write_embedding_csv(
              dir + "/embedding_" + name + "_" + kind + "_d" +
                  std::to_string(d) + ".csv",
              net.node_ids, params.u);
        } else {
          models::TrainConfig tc = ae_config(cfg);
          tc.seed = model_seed;
          const bool masked = mk == eval::ModelKind::teammate_ae;
          const auto params =
              models::ae_train(x_rows, masked ? &mask : nullptr, d, tc);
          io::save_autoencoder(
              path, params, model_seed, masked,
              {{"d", std::to_string(d)},
               {"learning_rate", io::format_double(tc.learning_rate)},
               {"momentum", io::format_double(tc.momentum)},
               {"batch_size", std::to_string(tc.batch_size)},
               {"epochs", std::to_string(tc.epochs)},
               {"patience", std::to_string(tc.patience)}});
          io::write_embedding_csv(
              dir + "/embedding_" + name + "_" + kind + "_d" +
                  std::to_string(d) + ".csv",
              net.node_ids, models::ae_embeddings(params, x_rows));
        }
        outputs.push_back(fs::path(path).filename().string());
        std::cout << "train: " << name << " " << kind << " d=" << d << "\n";
      }
    }
  }
  write_manifest(dir, "train", cfg, seed, inputs, outputs);
}

void run_eval(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "eval");
  const std::uint64_t seed = substream_seed(cfg.seed(), "eval");
  const auto kinds = cfg.get_str_list("models.kinds", {"SPN", "LPN"});
  const auto d_sweep = cfg.get_int_list("models.d_sweep", {16, 64});
  const auto list = model_list(cfg);

  eval::SampleSpec sample;
  sample.target_nodes = cfg.get_int("sample.target_nodes", sample.target_nodes);
  sample.restart_probability =
      cfg.get_double("sample.restart_probability", sample.restart_probability);
  sample.samples = cfg.get_int("sample.samples", sample.samples);

  std::vector<std::size_t> k_list;
  for (int k : cfg.get_int_list("sample.k_list", {1, 2, 5, 10, 20, 50, 100}))
    k_list.push_back(static_cast<std::size_t>(k));

  std::vector<std::string> inputs, outputs;
  std::vector<eval::MetricCell> all_cells;
  std::vector<eval::AggregateRow> all_aggregates;
  std::vector<std::string> all_failures;

  for (const auto& kind : kinds) {
    const std::string net_path = require_artifact(
        cfg.out_dir() + "/network/" +
            (perfnet::parse_kind(kind) == perfnet::NetworkKind::spn
                 ? "spn.tsv"
                 : "lpn.tsv"),
        "coplaynet network");
    const std::string train_path = require_artifact(
        cfg.out_dir() + "/train/train_" + kind + ".tsv", "coplaynet train");
    const std::string test_path = require_artifact(
        cfg.out_dir() + "/train/test_" + kind + ".tsv", "coplaynet train");
    inputs.insert(inputs.end(), {net_path, train_path, test_path});

    const auto net = io::read_network_tsv(net_path);
    const int n = static_cast<int>(net.node_count());
    const auto train_edges = io::read_edges_tsv(train_path, net.node_ids);
    const auto test_edges = io::read_edges_tsv(test_path, net.node_ids);

    models::TrainEdges train;
    for (const auto& e : train_edges) train.push_back({e.src, e.dst, e.weight});
    const Matrix x_rows = models::adjacency_rows(train, n);
    const Mask mask = models::observation_mask(train, n);

    std::vector<std::unique_ptr<models::Predictor>> owned;
    std::vector<eval::NamedPredictor> predictors;
    owned.push_back(std::make_unique<models::BaselineAverage>(
        models::baseline_average(train, n)));
    predictors.push_back({"baseline", 0, owned.back().get()});

    for (const int d : d_sweep) {
      for (const auto mk : list) {
        if (mk == eval::ModelKind::baseline) continue;
        const std::string name = eval::model_name(mk);
        const std::string path = require_artifact(
            checkpoint_path(cfg.out_dir() + "/train", name, kind, d),
            "coplaynet train");
        inputs.push_back(path);
        if (mk == eval::ModelKind::factorization) {
          auto model = std::make_unique<models::FactorizationModel>();
          model->params = io::load_factorization(path);
          owned.push_back(std::move(model));
        } else {
          bool masked = false;
          auto model = std::make_unique<models::AutoencoderModel>();
          model->params = io::load_autoencoder(path, &masked);
          model->x_rows = x_rows;
          model->masked_input = masked;
          if (masked) model->mask = mask;
          model->model_name = name;
          owned.push_back(std::move(model));
        }
        predictors.push_back({name, d, owned.back().get()});
      }
    }

    eval::SampleSpec kind_sample = sample;
    if (kind_sample.target_nodes > n) kind_sample.target_nodes = n;
    const auto report = eval::evaluate_predictors(
        net, test_edges, train_edges, predictors, kind_sample, k_list,
        substream_seed(seed, "eval:" + kind));

    all_cells.insert(all_cells.end(), report.cells.begin(),
                     report.cells.end());
    all_aggregates.insert(all_aggregates.end(), report.aggregates.begin(),
                          report.aggregates.end());
    all_failures.insert(all_failures.end(), report.failures.begin(),
                        report.failures.end());

    // AvgRec@k curve files, one per (kind, d).
    for (const int d : d_sweep) {
      std::vector<eval::CurvePoint> pts;
      for (const auto& p : report.curves)
        if (p.d == d || p.d == 0) {
          auto copy = p;
          copy.d = d;
          pts.push_back(copy);
        }
      std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return std::tie(a.k, a.model) < std::tie(b.k, b.model);
      });
      const std::string curve =
          "avgrec_" + kind + "_d" + std::to_string(d) + ".csv";
      io::write_curve_csv(dir + "/" + curve, pts);
      outputs.push_back(curve);
    }

    // Weight distributions of the full network vs the first sample (the
    // sampler-fidelity picture).
    std::vector<double> full_weights;
    for (const auto& e : net.edges) full_weights.push_back(e.weight);
    if (!full_weights.empty()) {
      io::write_histogram_csv(dir + "/weights_full_" + kind + ".csv",
                              stats::histogram_auto(full_weights, 30));
      outputs.push_back("weights_full_" + kind + ".csv");
      const auto nodes = eval::sample_subnetwork(
          net, [&] {
            auto s = kind_sample;
            s.seed = substream_seed(substream_seed(seed, "eval:" + kind),
                                    "sample");
            return s;
          }(), 0);
      std::vector<double> sampled;
      for (const auto& e : eval::induced_edges(net.edges, nodes))
        sampled.push_back(e.weight);
      if (!sampled.empty()) {
        io::write_histogram_csv(dir + "/weights_sample_" + kind + ".csv",
                                stats::histogram_auto(sampled, 30));
        outputs.push_back("weights_sample_" + kind + ".csv");
      }
    }
  }

  io::write_report_cells_csv(dir + "/results.csv", all_cells);
  io::write_report_aggregates_csv(dir + "/aggregate.csv", all_aggregates);
  outputs.insert(outputs.begin(), {"results.csv", "aggregate.csv"});
  if (!all_failures.empty()) {
    std::ostringstream f;
    for (const auto& line : all_failures) f << line << "\n";
    io::write_file(dir + "/failures.txt", f.str());
    outputs.push_back("failures.txt");
    for (const auto& line : all_failures)
      std::cerr << "eval: " << line << "\n";
  }
  write_manifest(dir, "eval", cfg, seed, inputs, outputs);
  std::cout << "eval: " << all_cells.size() << " metric cells across "
            << kinds.size() << " networks\n";
}

void run_report(const Config& cfg) {
  const std::string dir = stage_dir(cfg, "report");
  const std::string timelines_path = require_artifact(
      cfg.out_dir() + "/rate/timelines.csv", "coplaynet rate");
  const std::string histories_path = require_artifact(
      cfg.out_dir() + "/ingest/histories.tsv", "coplaynet ingest");
  const std::string spn_path =
      require_artifact(cfg.out_dir() + "/network/spn.tsv", "coplaynet network");
  const std::string lpn_path =
      require_artifact(cfg.out_dir() + "/network/lpn.tsv", "coplaynet network");
  const std::string aggregate_path = require_artifact(
      cfg.out_dir() + "/eval/aggregate.csv", "coplaynet eval");

  std::vector<std::string> outputs;

  // Rating timelines per decile group.
  const auto timelines = io::read_timelines_csv(timelines_path);
  io::write_decile_csv(dir + "/decile_timelines.csv",
                       rating::decile_timeline_report(timelines));
  outputs.push_back("decile_timelines.csv");

  // Matches-per-player distribution.
  {
    const auto histories = io::read_histories_tsv(histories_path);
    std::vector<double> counts;
    for (const auto& [id, h] : histories)
      counts.push_back(static_cast<double>(h.entries.size()));
    if (!counts.empty())
      io::write_histogram_csv(dir + "/matches_per_player_hist.csv",
                              stats::histogram_auto(counts, 30));
    outputs.push_back("matches_per_player_hist.csv");
  }

  // Rank agreement between the two networks.
  const auto spn = io::read_network_tsv(spn_path);
  const auto lpn = io::read_network_tsv(lpn_path);
  {
    std::ostringstream out;
    out << "comparison,tau\n";
    out << "spn_vs_lpn,"
        << io::format_double(perfnet::kendall_tau_global(spn, lpn)) << "\n";
    io::write_file(dir + "/kendall_global.csv", out.str());
    outputs.push_back("kendall_global.csv");

    const auto per_player = perfnet::kendall_tau_per_player(spn, lpn);
    io::write_histogram_csv(dir + "/kendall_per_player_hist.csv",
                            per_player.histogram);
    outputs.push_back("kendall_per_player_hist.csv");
  }

  // Gain summary per (kind, model, d) plus the headline aggregate table.
  {
    const std::string content = io::read_file(aggregate_path);
    std::istringstream in(content);
    std::string line;
    std::getline(in, line);  // header
    struct Row {
      std::string model, kind, metric;
      int d;
      double mean, stddev, gain_mean, gain_std;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = io::split(line, ',');
      if (f.size() != 8)
        throw DataError("bad aggregate row: " + line);
      rows.push_back({f[0], f[1], f[3], std::stoi(f[2]), std::stod(f[4]),
                      std::stod(f[5]), std::stod(f[6]), std::stod(f[7])});
    }

    std::ostringstream gains;
    gains << "kind,model,d,metric,gain_mean,gain_std\n";
    for (const auto& r : rows) {
      if (r.metric != "mse" && r.metric != "mane") continue;
      if (r.model == "baseline" || r.model == "ideal") continue;
      gains << r.kind << ',' << r.model << ',' << r.d << ',' << r.metric
            << ',' << io::format_double(r.gain_mean) << ','
            << io::format_double(r.gain_std) << "\n";
    }
    io::write_file(dir + "/gains.csv", gains.str());
    outputs.push_back("gains.csv");

    // Headline table at the largest d: mean/std of MSE and MANE per model.
    int d_max = 0;
    for (const auto& r : rows) d_max = std::max(d_max, r.d);
    std::ostringstream table;
    table << "model,mse_spn,mane_spn,mse_lpn,mane_lpn\n";
    const auto find = [&](const std::string& model, const std::string& kind,
                          const std::string& metric) -> std::string {
      for (const auto& r : rows) {
        if (r.model == model && r.kind == kind && r.metric == metric &&
            (r.d == d_max || r.d == 0))
          return io::format_double(r.mean) + "/" +
                 io::format_double(r.stddev);
      }
      return "";
    };
    for (const auto& model :
         {"baseline", "factorization", "traditional_ae", "teammate_ae"}) {
      table << model << ',' << find(model, "SPN", "mse") << ','
            << find(model, "SPN", "mane") << ',' << find(model, "LPN", "mse")
            << ',' << find(model, "LPN", "mane") << "\n";
    }
    io::write_file(dir + "/table_summary.csv", table.str());
    outputs.push_back("table_summary.csv");
  }

  write_manifest(dir, "report", cfg, 0,
                 {timelines_path, histories_path, spn_path, lpn_path,
                  aggregate_path},
                 outputs);
  std::cout << "report: wrote " << outputs.size() << " artifacts\n";
}

}  // namespace coplaynet::pipeline
