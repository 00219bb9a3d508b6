#include "coplaynet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <tuple>

#include "coplaynet/rng.hpp"

namespace coplaynet::eval {

EdgeSplit split_edges(const perfnet::PerformanceNetwork& net,
                      const SplitSpec& spec) {
  if (!(spec.hide_fraction > 0.0 && spec.hide_fraction < 1.0))
    throw DataError("split_edges: hide_fraction must lie in (0, 1)");
  const std::size_t n_edges = net.edges.size();
  const auto hidden = static_cast<std::size_t>(
      std::llround(spec.hide_fraction * static_cast<double>(n_edges)));
  if (hidden == 0 || hidden >= n_edges)
    throw DataError("split_edges: hide fraction rounds to none or all of " +
                    std::to_string(n_edges) + " edges");

  std::vector<std::size_t> order(n_edges);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(spec.seed, "split");
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<char> is_test(n_edges, 0);
  for (std::size_t i = 0; i < hidden; ++i) is_test[order[i]] = 1;

  EdgeSplit split;
  split.train.kind = net.kind;
  split.train.node_ids = net.node_ids;
  for (std::size_t i = 0; i < n_edges; ++i) {
    if (is_test[i])
      split.test_edges.push_back(net.edges[i]);
    else
      split.train.edges.push_back(net.edges[i]);
  }
  return split;
}

std::vector<int> sample_subnetwork(const perfnet::PerformanceNetwork& net,
                                   const SampleSpec& spec, int sample_index) {
  const int n = static_cast<int>(net.node_count());
  if (spec.target_nodes < 2)
    throw DataError("sample_subnetwork: target_nodes must be >= 2");
  if (spec.target_nodes > n)
    throw DataError("sample_subnetwork: target_nodes " +
                    std::to_string(spec.target_nodes) + " exceeds " +
                    std::to_string(n) + " nodes");
  if (!(spec.restart_probability > 0.0 && spec.restart_probability < 1.0))
    throw DataError("sample_subnetwork: restart probability must be in (0,1)");

  // The walk moves on the underlying undirected structure.
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
  for (const auto& e : net.edges) {
    adjacency[static_cast<std::size_t>(e.src)].push_back(e.dst);
    adjacency[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }

  auto rng = make_rng(spec.seed, "sample:" + std::to_string(sample_index));
  std::uniform_int_distribution<int> pick_start(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const int start = pick_start(rng);
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<int> collected;
  collected.reserve(static_cast<std::size_t>(spec.target_nodes));

  int cur = start;
  // Walks on a connected input terminate quickly; the cap guards against a
  // start trapped in a small component.
  const std::int64_t step_cap =
      std::max<std::int64_t>(1'000'000, 10'000LL * spec.target_nodes);
  for (std::int64_t step = 0;
       static_cast<int>(collected.size()) < spec.target_nodes; ++step) {
    if (step > step_cap)
      throw DataError("sample_subnetwork: walk stalled before reaching " +
                      std::to_string(spec.target_nodes) + " nodes");
    if (!visited[static_cast<std::size_t>(cur)]) {
      visited[static_cast<std::size_t>(cur)] = 1;
      collected.push_back(cur);
    }
    const auto& nbrs = adjacency[static_cast<std::size_t>(cur)];
    if (nbrs.empty() || coin(rng) < spec.restart_probability) {
      cur = start;
    } else {
      cur = nbrs[std::uniform_int_distribution<std::size_t>(
          0, nbrs.size() - 1)(rng)];
    }
  }
  std::sort(collected.begin(), collected.end());
  return collected;
}

std::vector<perfnet::Edge> induced_edges(
    const std::vector<perfnet::Edge>& edges, const std::vector<int>& nodes) {
  const auto contains = [&](int v) {
    return std::binary_search(nodes.begin(), nodes.end(), v);
  };
  std::vector<perfnet::Edge> out;
  for (const auto& e : edges)
    if (contains(e.src) && contains(e.dst)) out.push_back(e);
  return out;
}

double mse(std::span<const double> test_weights,
           std::span<const double> predicted, bool literal_sum) {
  if (test_weights.size() != predicted.size())
    throw DataError("mse: length mismatch");
  if (test_weights.empty()) throw DataError("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < test_weights.size(); ++i) {
    const double d = test_weights[i] - predicted[i];
    sum += d * d;
  }
  return literal_sum ? sum
                     : sum / static_cast<double>(test_weights.size());
}

double avg_rec_at_k(const std::vector<perfnet::Edge>& test_edges,
                    const models::Predictor& pred, std::size_t k) {
  if (k < 1 || k > test_edges.size())
    throw DataError("avg_rec_at_k: k out of range");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(test_edges.size());
  for (std::size_t i = 0; i < test_edges.size(); ++i)
    scored.emplace_back(pred.predict(test_edges[i].src, test_edges[i].dst), i);
  // Ties in predicted weight break on position in the canonical edge list.
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    sum += test_edges[scored[i].second].weight;
  return sum / static_cast<double>(k);
}

namespace {

struct OutLink {
  int dst;
  double weight;
};

// 1-based descending ranks of the test links within train + test out-links;
// ties break on the target id.
std::map<int, std::size_t> rank_positions(
    const std::vector<OutLink>& combined) {
  std::vector<std::size_t> order(combined.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (combined[a].weight != combined[b].weight)
      return combined[a].weight > combined[b].weight;
    return combined[a].dst < combined[b].dst;
  });
  std::map<int, std::size_t> rank;
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    rank[combined[order[pos]].dst] = pos + 1;
  return rank;
}

}  // namespace

ManeResult mane(const std::vector<perfnet::Edge>& test_edges,
                const std::vector<perfnet::Edge>& train_edges,
                const models::Predictor& pred) {
  std::map<int, std::vector<OutLink>> train_out, test_out;
  for (const auto& e : train_edges)
    train_out[e.src].push_back({e.dst, e.weight});
  for (const auto& e : test_edges) test_out[e.src].push_back({e.dst, e.weight});

  double total = 0.0;
  std::size_t eligible = 0, skipped = 0;
  for (const auto& [node, tests] : test_out) {
    const auto train_it = train_out.find(node);
    if (train_it == train_out.end() || train_it->second.empty()) {
      ++skipped;
      continue;
    }
    const auto& trains = train_it->second;

    // Observed links keep their true weights in both rankings; test links
    // carry the prediction in one and the true weight in the other.
    std::vector<OutLink> by_pred = trains;
    std::vector<OutLink> by_true = trains;
    for (const auto& t : tests) {
      by_pred.push_back({t.dst, pred.predict(node, t.dst)});
      by_true.push_back({t.dst, t.weight});
    }
    const auto rank_pred = rank_positions(by_pred);
    const auto rank_true = rank_positions(by_true);

    double displacement = 0.0;
    for (const auto& t : tests) {
      const auto rp = static_cast<double>(rank_pred.at(t.dst));
      const auto rt = static_cast<double>(rank_true.at(t.dst));
      displacement += std::abs(rp - rt);
    }
    total += displacement / (static_cast<double>(trains.size()) *
                             static_cast<double>(tests.size()));
    ++eligible;
  }
  for (const auto& [node, trains] : train_out)
    if (!test_out.count(node)) ++skipped;

  if (eligible == 0) throw DataError("mane: no eligible nodes");
  return {total / static_cast<double>(eligible), eligible, skipped};
}

// ------------------------------------------------------------- benchmark

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::baseline: return "baseline";
    case ModelKind::factorization: return "factorization";
    case ModelKind::traditional_ae: return "traditional_ae";
    case ModelKind::teammate_ae: return "teammate_ae";
  }
  return "?";
}

std::vector<std::string> valid_model_names() {
  return {"baseline", "factorization", "traditional_ae", "teammate_ae"};
}

ModelKind parse_model(const std::string& name) {
  if (name == "baseline") return ModelKind::baseline;
  if (name == "factorization") return ModelKind::factorization;
  if (name == "traditional_ae") return ModelKind::traditional_ae;
  if (name == "teammate_ae") return ModelKind::teammate_ae;
  std::string valid;
  for (const auto& v : valid_model_names()) valid += " " + v;
  throw DataError("unknown model: " + name + " (valid:" + valid + ")");
}

namespace {

// Ranks by the true hidden weight; only ever queried on test pairs.
struct IdealPredictor final : models::Predictor {
  std::map<std::pair<int, int>, double> truth;
  double predict(int src, int dst) const override {
    const auto it = truth.find({src, dst});
    return it == truth.end() ? 0.0 : it->second;
  }
  std::string name() const override { return "ideal"; }
};

struct Aggregator {
  // (model, kind, d, metric) -> per-sample values
  std::map<std::tuple<std::string, std::string, int, std::string>,
           std::map<int, double>>
      values;

  void add(const MetricCell& cell) {
    values[{cell.model, cell.kind, cell.d, cell.metric}][cell.sample] =
        cell.value;
  }
};

}  // namespace

EvalReport evaluate_predictors(const perfnet::PerformanceNetwork& net,
                               const std::vector<perfnet::Edge>& test_edges,
                               const std::vector<perfnet::Edge>& train_edges,
                               const std::vector<NamedPredictor>& predictors,
                               const SampleSpec& sample,
                               const std::vector<std::size_t>& k_list,
                               std::uint64_t seed) {
  EvalReport report;
  const std::string kind = perfnet::kind_name(net.kind);

  IdealPredictor ideal;
  for (const auto& e : test_edges) ideal.truth[{e.src, e.dst}] = e.weight;
  std::vector<NamedPredictor> scored = predictors;
  scored.insert(scored.begin(), {"ideal", 0, &ideal});

  Aggregator agg;
  for (int s = 0; s < sample.samples; ++s) {
    SampleSpec sample_spec = sample;
    sample_spec.seed = substream_seed(seed, "sample");
    std::vector<int> nodes;
    try {
      nodes = sample_subnetwork(net, sample_spec, s);
    } catch (const std::exception& e) {
      report.failures.push_back("sample " + std::to_string(s) + ": " +
                                e.what());
      continue;
    }
    const auto test_in = induced_edges(test_edges, nodes);
    const auto train_in = induced_edges(train_edges, nodes);
    report.cells.push_back({"_sample", kind, 0, s, "test_links",
                            static_cast<double>(test_in.size())});
    if (test_in.empty()) {
      report.failures.push_back("sample " + std::to_string(s) +
                                ": no test links inside the sample");
      continue;
    }

    std::vector<double> truth;
    truth.reserve(test_in.size());
    for (const auto& e : test_in) truth.push_back(e.weight);

    for (const auto& cell : scored) {
      try {
        std::vector<double> predicted;
        predicted.reserve(test_in.size());
        for (const auto& e : test_in)
          predicted.push_back(cell.pred->predict(e.src, e.dst));

        MetricCell mc{cell.model, kind, cell.d, s, "mse",
                      mse(truth, predicted)};
        report.cells.push_back(mc);
        agg.add(mc);

        const auto mane_result = mane(test_in, train_in, *cell.pred);
        mc.metric = "mane";
        mc.value = mane_result.value;
        report.cells.push_back(mc);
        agg.add(mc);

        for (const std::size_t k : k_list) {
          if (k > test_in.size()) continue;
          mc.metric = "avgrec@" + std::to_string(k);
          mc.value = avg_rec_at_k(test_in, *cell.pred, k);
          report.cells.push_back(mc);
          agg.add(mc);
        }
      } catch (const std::exception& e) {
        report.failures.push_back("metric " + cell.model + " d=" +
                                  std::to_string(cell.d) + " sample " +
                                  std::to_string(s) + ": " + e.what());
      }
    }
  }

  // Aggregates with per-sample gains against the baseline cell.
  for (const auto& [key, by_sample] : agg.values) {
    const auto& [model, cell_kind, d, metric] = key;
    std::vector<double> vals, gains;
    const bool error_metric = metric == "mse" || metric == "mane";
    for (const auto& [sample_idx, value] : by_sample) {
      vals.push_back(value);
      if (!error_metric) continue;
      const auto base_it = agg.values.find({"baseline", cell_kind, 0, metric});
      if (base_it == agg.values.end()) continue;
      const auto base_val = base_it->second.find(sample_idx);
      if (base_val == base_it->second.end() || base_val->second == 0.0)
        continue;
      gains.push_back(100.0 * (base_val->second - value) / base_val->second);
    }
    AggregateRow row{model, cell_kind, d, metric, stats::mean(vals),
                     stats::stddev(vals), 0.0, 0.0};
    if (!gains.empty()) {
      row.gain_mean = stats::mean(gains);
      row.gain_std = stats::stddev(gains);
    }
    report.aggregates.push_back(row);

    if (metric.rfind("avgrec@", 0) == 0) {
      const std::size_t k = std::stoull(metric.substr(7));
      report.curves.push_back({cell_kind, d, k, model, row.mean});
    }
  }
  std::sort(report.curves.begin(), report.curves.end(),
            [](const CurvePoint& a, const CurvePoint& b) {
              return std::tie(a.kind, a.d, a.k, a.model) <
                     std::tie(b.kind, b.d, b.k, b.model);
            });
  return report;
}

EvalReport run_benchmark(const perfnet::PerformanceNetwork& net,
                         const BenchmarkConfig& cfg) {
  const int n = static_cast<int>(net.node_count());

  SplitSpec split_spec = cfg.split;
  split_spec.seed = substream_seed(cfg.seed, "split");
  const EdgeSplit split = split_edges(net, split_spec);
  const models::TrainEdges train = models::training_edges(split.train);

  const Matrix x_rows = models::adjacency_rows(train, n);
  const Mask mask = models::observation_mask(train, n);

  std::vector<std::unique_ptr<models::Predictor>> owned;
  std::vector<NamedPredictor> predictors;
  std::vector<std::string> train_failures;

  owned.push_back(std::make_unique<models::BaselineAverage>(
      models::baseline_average(train, n)));
  predictors.push_back({"baseline", 0, owned.back().get()});

  for (const int d : cfg.d_sweep) {
    for (const ModelKind mk : cfg.model_list) {
      if (mk == ModelKind::baseline) continue;  // d-independent, added above
      const std::string name = model_name(mk);
      try {
        if (mk == ModelKind::factorization) {
          models::GfConfig gf = cfg.gf;
          gf.d = d;
          gf.seed = substream_seed(cfg.seed, "train:gf:" + std::to_string(d));
          auto model = std::make_unique<models::FactorizationModel>();
          model->params = models::gf_train(train, n, gf);
          owned.push_back(std::move(model));
        } else {
          models::TrainConfig ae = cfg.ae;
          ae.seed = substream_seed(cfg.seed,
                                   "train:" + name + ":" + std::to_string(d));
          const bool masked = mk == ModelKind::teammate_ae;
          auto model = std::make_unique<models::AutoencoderModel>();
          model->params =
              models::ae_train(x_rows, masked ? &mask : nullptr, d, ae);
          model->x_rows = x_rows;
          model->masked_input = masked;
          if (masked) model->mask = mask;
          model->model_name = name;
          owned.push_back(std::move(model));
        }
        predictors.push_back({name, d, owned.back().get()});
      } catch (const std::exception& e) {
        train_failures.push_back("train " + name + " d=" + std::to_string(d) +
                                 ": " + e.what());
      }
    }
  }

  EvalReport report =
      evaluate_predictors(net, split.test_edges, split.train.edges, predictors,
                          cfg.sample, cfg.k_list, cfg.seed);
  report.failures.insert(report.failures.begin(), train_failures.begin(),
                         train_failures.end());
  return report;
}

}  // namespace coplaynet::eval
