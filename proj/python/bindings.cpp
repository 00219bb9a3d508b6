#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coplaynet/evaluate.hpp"
#include "coplaynet/ingest.hpp"
#include "coplaynet/models.hpp"
#include "coplaynet/perfnet.hpp"
#include "coplaynet/rating.hpp"
#include "coplaynet/synth.hpp"
#include "coplaynet/types.hpp"

namespace py = pybind11;
using namespace coplaynet;

namespace {

// Spans do not cross the binding boundary; copy rows out of the matrix.
std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(m.rows));
  for (int i = 0; i < m.rows; ++i) {
    const auto r = m.row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

models::TrainEdges to_train_edges(
    const std::vector<std::tuple<int, int, double>>& edges) {
  models::TrainEdges out;
  out.reserve(edges.size());
  for (const auto& [i, j, w] : edges) out.push_back({i, j, w});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "co-play performance networks: rating, network construction and "
            "link-weight prediction";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<NumericError>(m, "NumericError");

  // ----- core types ---------------------------------------------------------

  py::enum_<Team>(m, "Team").value("A", Team::a).value("B", Team::b);

  py::class_<PlayerSlot>(m, "PlayerSlot")
      .def(py::init<>())
      .def(py::init([](std::string account_id, Team team, int leaver_status) {
             return PlayerSlot{std::move(account_id), team, leaver_status};
           }),
           py::arg("account_id"), py::arg("team"), py::arg("leaver_status") = 0)
      .def_readwrite("account_id", &PlayerSlot::account_id)
      .def_readwrite("team", &PlayerSlot::team)
      .def_readwrite("leaver_status", &PlayerSlot::leaver_status);

  py::class_<MatchRecord>(m, "MatchRecord")
      .def(py::init<>())
      .def_readwrite("match_id", &MatchRecord::match_id)
      .def_readwrite("start_time", &MatchRecord::start_time)
      .def_readwrite("duration", &MatchRecord::duration)
      .def_readwrite("team_a_win", &MatchRecord::team_a_win)
      .def_readwrite("players", &MatchRecord::players);

  py::class_<HistoryEntry>(m, "HistoryEntry")
      .def_readonly("match_index", &HistoryEntry::match_index)
      .def_readonly("match_id", &HistoryEntry::match_id)
      .def_readonly("teammates", &HistoryEntry::teammates);

  py::class_<PlayerHistory>(m, "PlayerHistory")
      .def_readonly("account_id", &PlayerHistory::account_id)
      .def_readonly("entries", &PlayerHistory::entries);

  py::class_<Matrix>(m, "Matrix")
      .def_readonly("rows", &Matrix::rows)
      .def_readonly("cols", &Matrix::cols)
      .def("at", [](const Matrix& m_, int r, int c) { return m_(r, c); })
      .def("tolist", &matrix_rows);

  // ----- ingest --------------------------------------------------------------

  py::class_<ingest::Reject>(m, "Reject")
      .def_readonly("record_ordinal", &ingest::Reject::record_ordinal)
      .def_readonly("reason", &ingest::Reject::reason);

  m.def(
      "parse_match_log",
      [](const std::string& path, const std::string& format) {
        auto result =
            ingest::parse_match_log(path, ingest::parse_format(format));
        return py::make_tuple(result.matches, result.rejects);
      },
      py::arg("path"), py::arg("format") = "jsonl",
      "Parse a match log; returns (matches, rejects).");
  m.def("filter_valid_matches", &ingest::filter_valid_matches);
  m.def(
      "filter_experienced_players",
      [](const std::vector<MatchRecord>& matches, std::size_t min_matches) {
        auto result = ingest::filter_experienced_players(matches, min_matches);
        return py::make_tuple(result.players, result.histories);
      },
      py::arg("matches"), py::arg("min_matches") = 46,
      "Returns (player_set, histories).");
  m.def("build_histories", &ingest::build_histories);

  // ----- rating ---------------------------------------------------------------

  py::class_<rating::Rating>(m, "Rating")
      .def(py::init<>())
      .def(py::init([](double mu, double sigma) {
             return rating::Rating{mu, sigma};
           }),
           py::arg("mu"), py::arg("sigma"))
      .def_readwrite("mu", &rating::Rating::mu)
      .def_readwrite("sigma", &rating::Rating::sigma)
      .def("__repr__", [](const rating::Rating& r) {
        return "Rating(mu=" + std::to_string(r.mu) +
               ", sigma=" + std::to_string(r.sigma) + ")";
      });

  py::class_<rating::RatingConfig>(m, "RatingConfig")
      .def(py::init<>())
      .def_readwrite("mu0", &rating::RatingConfig::mu0)
      .def_readwrite("sigma0", &rating::RatingConfig::sigma0)
      .def_readwrite("beta", &rating::RatingConfig::beta)
      .def_readwrite("tau", &rating::RatingConfig::tau)
      .def_readwrite("draw_probability",
                     &rating::RatingConfig::draw_probability);

  py::enum_<rating::Outcome>(m, "Outcome")
      .value("A_WINS", rating::Outcome::a_wins)
      .value("B_WINS", rating::Outcome::b_wins)
      .value("DRAW", rating::Outcome::draw);

  py::class_<rating::TimelinePoint>(m, "TimelinePoint")
      .def_readonly("match_index", &rating::TimelinePoint::match_index)
      .def_readonly("rating", &rating::TimelinePoint::rating);

  py::class_<rating::RatingTimeline>(m, "RatingTimeline")
      .def_readonly("account_id", &rating::RatingTimeline::account_id)
      .def_readonly("points", &rating::RatingTimeline::points);

  m.def("initial_rating", &rating::initial_rating,
        py::arg("config") = rating::RatingConfig{});
  m.def("update_two_team", &rating::update_two_team, py::arg("team_a"),
        py::arg("team_b"), py::arg("outcome"),
        py::arg("config") = rating::RatingConfig{});
  m.def("rate_dataset", &rating::rate_dataset, py::arg("matches"),
        py::arg("histories"), py::arg("config") = rating::RatingConfig{});
  m.def("decile_timeline_report", [](const std::map<std::string, rating::RatingTimeline>& timelines) {
    std::vector<std::tuple<std::string, std::size_t, double, double>> rows;
    for (const auto& r : rating::decile_timeline_report(timelines))
      rows.emplace_back(r.group, r.match_index, r.mean_mu, r.std_mu);
    return rows;
  });

  // ----- perfnet ---------------------------------------------------------------

  py::enum_<perfnet::NetworkKind>(m, "NetworkKind")
      .value("SPN", perfnet::NetworkKind::spn)
      .value("LPN", perfnet::NetworkKind::lpn);

  py::class_<perfnet::Edge>(m, "Edge")
      .def(py::init([](int src, int dst, double weight, int count) {
             return perfnet::Edge{src, dst, weight, count};
           }),
           py::arg("src"), py::arg("dst"), py::arg("weight"),
           py::arg("co_play_count") = 1)
      .def_readwrite("src", &perfnet::Edge::src)
      .def_readwrite("dst", &perfnet::Edge::dst)
      .def_readwrite("weight", &perfnet::Edge::weight)
      .def_readwrite("co_play_count", &perfnet::Edge::co_play_count);

  py::class_<perfnet::PerformanceNetwork>(m, "PerformanceNetwork")
      .def(py::init<>())
      .def_readwrite("kind", &perfnet::PerformanceNetwork::kind)
      .def_readwrite("node_ids", &perfnet::PerformanceNetwork::node_ids)
      .def_readwrite("edges", &perfnet::PerformanceNetwork::edges)
      .def("index_of", &perfnet::PerformanceNetwork::index_of)
      .def("node_count", &perfnet::PerformanceNetwork::node_count);

  py::class_<perfnet::DecayConfig>(m, "DecayConfig")
      .def(py::init<>())
      .def_readwrite("horizon", &perfnet::DecayConfig::horizon)
      .def_readwrite("literal_growth_exponent",
                     &perfnet::DecayConfig::literal_growth_exponent);

  m.def("short_term_weight", &perfnet::short_term_weight);
  m.def("long_term_weight", &perfnet::long_term_weight);
  m.def("aggregate_network", &perfnet::aggregate_network, py::arg("histories"),
        py::arg("timelines"), py::arg("kind"),
        py::arg("cfg") = perfnet::DecayConfig{}, py::arg("mu0") = 25.0);
  m.def("threshold_edges", &perfnet::threshold_edges, py::arg("net"),
        py::arg("min_count") = 3);
  m.def("largest_connected_component", &perfnet::largest_connected_component);
  m.def("kendall_tau_global", &perfnet::kendall_tau_global);
  m.def("kendall_tau_per_player",
        [](const perfnet::PerformanceNetwork& spn,
           const perfnet::PerformanceNetwork& lpn) {
          auto result = perfnet::kendall_tau_per_player(spn, lpn);
          return py::make_tuple(result.tau, result.skipped);
        });

  // ----- models ----------------------------------------------------------------

  py::class_<models::Predictor, std::shared_ptr<models::Predictor>>(
      m, "Predictor")
      .def("predict", &models::Predictor::predict)
      .def("name", &models::Predictor::name);

  m.def(
      "baseline_average",
      [](const std::vector<std::tuple<int, int, double>>& train, int n_nodes) {
        return std::shared_ptr<models::Predictor>(
            new models::BaselineAverage(
                models::baseline_average(to_train_edges(train), n_nodes)));
      },
      py::arg("train_edges"), py::arg("n_nodes"));

  m.def(
      "gf_train",
      [](const std::vector<std::tuple<int, int, double>>& train, int n_nodes,
         int d, double lambda, double learning_rate, int epochs,
         std::uint64_t seed) {
        models::GfConfig cfg;
        cfg.d = d;
        cfg.lambda = lambda;
        cfg.learning_rate = learning_rate;
        cfg.epochs = epochs;
        cfg.seed = seed;
        auto model = std::make_shared<models::FactorizationModel>();
        model->params = models::gf_train(to_train_edges(train), n_nodes, cfg);
        return std::shared_ptr<models::Predictor>(model);
      },
      py::arg("train_edges"), py::arg("n_nodes"), py::arg("d") = 16,
      py::arg("lambda_") = 1e-4, py::arg("learning_rate") = 0.02,
      py::arg("epochs") = 300, py::arg("seed") = 1);

  m.def(
      "ae_train",
      [](const std::vector<std::tuple<int, int, double>>& train, int n_nodes,
         int d, bool masked, double learning_rate, int batch_size, int epochs,
         int patience, std::uint64_t seed) {
        const auto edges = to_train_edges(train);
        const Matrix x = models::adjacency_rows(edges, n_nodes);
        const Mask mask = models::observation_mask(edges, n_nodes);
        models::TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        cfg.epochs = epochs;
        cfg.patience = patience;
        cfg.seed = seed;
        auto model = std::make_shared<models::AutoencoderModel>();
        model->params =
            models::ae_train(x, masked ? &mask : nullptr, d, cfg);
        model->x_rows = x;
        model->masked_input = masked;
        if (masked) model->mask = mask;
        model->model_name = masked ? "teammate_ae" : "traditional_ae";
        return std::shared_ptr<models::Predictor>(model);
      },
      py::arg("train_edges"), py::arg("n_nodes"), py::arg("d") = 16,
      py::arg("masked") = true, py::arg("learning_rate") = 1e-3,
      py::arg("batch_size") = 16, py::arg("epochs") = 100,
      py::arg("patience") = 20, py::arg("seed") = 1);

  // ----- evaluation ---------------------------------------------------------------

  m.def(
      "split_edges",
      [](const perfnet::PerformanceNetwork& net, double hide_fraction,
         std::uint64_t seed) {
        eval::SplitSpec spec{hide_fraction, seed};
        auto split = eval::split_edges(net, spec);
        return py::make_tuple(split.train, split.test_edges);
      },
      py::arg("net"), py::arg("hide_fraction") = 0.20, py::arg("seed") = 1,
      "Returns (train_network, test_edges).");

  m.def(
      "sample_subnetwork",
      [](const perfnet::PerformanceNetwork& net, int target_nodes,
         double restart_probability, std::uint64_t seed, int sample_index) {
        eval::SampleSpec spec;
        spec.target_nodes = target_nodes;
        spec.restart_probability = restart_probability;
        spec.seed = seed;
        return eval::sample_subnetwork(net, spec, sample_index);
      },
      py::arg("net"), py::arg("target_nodes"),
      py::arg("restart_probability") = 0.15, py::arg("seed") = 1,
      py::arg("sample_index") = 0);

  m.def(
      "mse",
      [](const std::vector<double>& test_weights,
         const std::vector<double>& predicted, bool literal_sum) {
        return eval::mse(test_weights, predicted, literal_sum);
      },
      py::arg("test_weights"), py::arg("predicted"),
      py::arg("literal_sum") = false);
  m.def(
      "avg_rec_at_k",
      [](const std::vector<perfnet::Edge>& test_edges,
         const std::shared_ptr<models::Predictor>& pred, std::size_t k) {
        return eval::avg_rec_at_k(test_edges, *pred, k);
      },
      py::arg("test_edges"), py::arg("predictor"), py::arg("k"));
  m.def(
      "mane",
      [](const std::vector<perfnet::Edge>& test_edges,
         const std::vector<perfnet::Edge>& train_edges,
         const std::shared_ptr<models::Predictor>& pred) {
        const auto result = eval::mane(test_edges, train_edges, *pred);
        return py::make_tuple(result.value, result.eligible_nodes,
                              result.skipped_nodes);
      },
      py::arg("test_edges"), py::arg("train_edges"), py::arg("predictor"),
      "Returns (value, eligible_nodes, skipped_nodes).");

  py::class_<eval::MetricCell>(m, "MetricCell")
      .def_readonly("model", &eval::MetricCell::model)
      .def_readonly("kind", &eval::MetricCell::kind)
      .def_readonly("d", &eval::MetricCell::d)
      .def_readonly("sample", &eval::MetricCell::sample)
      .def_readonly("metric", &eval::MetricCell::metric)
      .def_readonly("value", &eval::MetricCell::value);

  py::class_<eval::AggregateRow>(m, "AggregateRow")
      .def_readonly("model", &eval::AggregateRow::model)
      .def_readonly("kind", &eval::AggregateRow::kind)
      .def_readonly("d", &eval::AggregateRow::d)
      .def_readonly("metric", &eval::AggregateRow::metric)
      .def_readonly("mean", &eval::AggregateRow::mean)
      .def_readonly("std", &eval::AggregateRow::stddev)
      .def_readonly("gain_mean", &eval::AggregateRow::gain_mean)
      .def_readonly("gain_std", &eval::AggregateRow::gain_std);

  py::class_<eval::EvalReport>(m, "EvalReport")
      .def_readonly("cells", &eval::EvalReport::cells)
      .def_readonly("aggregates", &eval::EvalReport::aggregates)
      .def_readonly("failures", &eval::EvalReport::failures);

  m.def(
      "run_benchmark",
      [](const perfnet::PerformanceNetwork& net, std::vector<int> d_sweep,
         std::vector<std::string> model_names, double hide_fraction,
         int target_nodes, int samples, int gf_epochs, int ae_epochs,
         std::uint64_t seed) {
        eval::BenchmarkConfig cfg;
        cfg.d_sweep = std::move(d_sweep);
        cfg.model_list.clear();
        for (const auto& name : model_names)
          cfg.model_list.push_back(eval::parse_model(name));
        cfg.split.hide_fraction = hide_fraction;
        cfg.sample.target_nodes = target_nodes;
        cfg.sample.samples = samples;
        cfg.gf.epochs = gf_epochs;
        cfg.ae.epochs = ae_epochs;
        cfg.seed = seed;
        return eval::run_benchmark(net, cfg);
      },
      py::arg("net"), py::arg("d_sweep"),
      py::arg("models") = std::vector<std::string>{
          "baseline", "factorization", "traditional_ae", "teammate_ae"},
      py::arg("hide_fraction") = 0.20, py::arg("target_nodes") = 1024,
      py::arg("samples") = 10, py::arg("gf_epochs") = 300,
      py::arg("ae_epochs") = 100, py::arg("seed") = 1);

  // ----- synthetic data --------------------------------------------------------

  py::enum_<synth::TeamPolicy>(m, "TeamPolicy")
      .value("UNIFORM", synth::TeamPolicy::uniform)
      .value("SKILL_SORTED", synth::TeamPolicy::skill_sorted);

  py::enum_<synth::Nonlinearity>(m, "Nonlinearity")
      .value("NONE", synth::Nonlinearity::none)
      .value("ODD_POWER", synth::Nonlinearity::odd_power);

  py::class_<synth::SynthLog>(m, "SynthLog")
      .def_readonly("matches", &synth::SynthLog::matches)
      .def_readonly("initial_latent_skill",
                    &synth::SynthLog::initial_latent_skill)
      .def_readonly("latent_skill", &synth::SynthLog::latent_skill);

  m.def(
      "generate_match_log",
      [](int players, int matches, double skill_sigma,
         double transfer_coefficient, synth::TeamPolicy policy,
         std::uint64_t seed) {
        synth::SynthConfig cfg;
        cfg.players = players;
        cfg.matches = matches;
        cfg.skill_sigma = skill_sigma;
        cfg.transfer_coefficient = transfer_coefficient;
        cfg.policy = policy;
        cfg.seed = seed;
        return synth::generate_match_log(cfg);
      },
      py::arg("players") = 100, py::arg("matches") = 500,
      py::arg("skill_sigma") = 5.0, py::arg("transfer_coefficient") = 0.0,
      py::arg("policy") = synth::TeamPolicy::uniform, py::arg("seed") = 1);

  py::class_<synth::PlantedNetwork>(m, "PlantedNetwork")
      .def_readonly("net", &synth::PlantedNetwork::net)
      .def_readonly("true_weights", &synth::PlantedNetwork::true_weights);

  m.def(
      "generate_planted_network",
      [](int nodes, int d_true, double noise, double density,
         synth::Nonlinearity nonlinearity, std::uint64_t seed) {
        synth::PlantedConfig cfg;
        cfg.nodes = nodes;
        cfg.d_true = d_true;
        cfg.noise = noise;
        cfg.density = density;
        cfg.nonlinearity = nonlinearity;
        cfg.seed = seed;
        return synth::generate_planted_network(cfg);
      },
      py::arg("nodes") = 200, py::arg("d_true") = 4, py::arg("noise") = 0.1,
      py::arg("density") = 0.2,
      py::arg("nonlinearity") = synth::Nonlinearity::none, py::arg("seed") = 1);
}
