#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coplaynet/models.hpp"
#include "coplaynet/perfnet.hpp"

namespace coplaynet::eval {

struct SplitSpec {
  double hide_fraction = 0.20;
  std::uint64_t seed = 1;
};

struct EdgeSplit {
  perfnet::PerformanceNetwork train;      // all nodes, training edges only
  std::vector<perfnet::Edge> test_edges;  // hidden edges with true weights
};

// Hides round(hide_fraction * |E|) uniformly random edges. The training
// network keeps every node even if hiding disconnects it. Throws DataError
// when the fraction rounds to zero or to all edges.
EdgeSplit split_edges(const perfnet::PerformanceNetwork& net,
                      const SplitSpec& spec);

struct SampleSpec {
  int target_nodes = 1024;
  double restart_probability = 0.15;
  std::uint64_t seed = 1;
  int samples = 10;
};

// Random walk with restarts on the underlying undirected structure from a
// uniformly chosen start; collects distinct nodes until target_nodes are
// reached. Returns the sorted node set. sample_index selects the substream.
std::vector<int> sample_subnetwork(const perfnet::PerformanceNetwork& net,
                                   const SampleSpec& spec, int sample_index);

// Edges of `net` with both endpoints inside the (sorted) node set.
std::vector<perfnet::Edge> induced_edges(
    const std::vector<perfnet::Edge>& edges, const std::vector<int>& nodes);

// Mean of squared differences; the literal sum form of the printed metric
// stays available behind the flag.
double mse(std::span<const double> test_weights,
           std::span<const double> predicted, bool literal_sum = false);

// Mean TRUE weight of the k test links the predictor ranks highest, ties in
// predicted weight broken by position in the canonical edge list.
double avg_rec_at_k(const std::vector<perfnet::Edge>& test_edges,
                    const models::Predictor& pred, std::size_t k);

struct ManeResult {
  double value;
  std::size_t eligible_nodes;
  std::size_t skipped_nodes;
};

// Per-node normalized rank displacement of test links among the combined
// list of that node's observed (train) and test out-links, averaged over
// eligible nodes. Throws DataError when no node is eligible.
ManeResult mane(const std::vector<perfnet::Edge>& test_edges,
                const std::vector<perfnet::Edge>& train_edges,
                const models::Predictor& pred);

// ------------------------------------------------------------- benchmark

enum class ModelKind { baseline, factorization, traditional_ae, teammate_ae };

const char* model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);  // throws DataError, lists valid names
std::vector<std::string> valid_model_names();

struct BenchmarkConfig {
  SplitSpec split;
  SampleSpec sample;
  std::vector<int> d_sweep = {16, 64, 128, 256, 512, 1024};
  std::vector<ModelKind> model_list = {
      ModelKind::baseline, ModelKind::factorization,
      ModelKind::traditional_ae, ModelKind::teammate_ae};
  models::GfConfig gf;
  models::TrainConfig ae;
  std::vector<std::size_t> k_list = {1, 2, 5, 10, 20, 50, 100};
  std::uint64_t seed = 1;  // substreams for split/sample/training
};

struct MetricCell {
  std::string model;
  std::string kind;  // "SPN" | "LPN"
  int d;             // 0 for d-independent models (baseline, ideal)
  int sample;
  std::string metric;  // "mse" | "mane" | "avgrec@<k>" | "test_links"
  double value;
};

struct AggregateRow {
  std::string model;
  std::string kind;
  int d;
  std::string metric;
  double mean;
  double stddev;
  double gain_mean;  // 100 * (baseline - model) / baseline, error metrics
  double gain_std;
};

struct CurvePoint {
  std::string kind;
  int d;
  std::size_t k;
  std::string model;
  double value;  // mean over samples
};

struct EvalReport {
  std::vector<MetricCell> cells;
  std::vector<AggregateRow> aggregates;
  std::vector<CurvePoint> curves;
  std::vector<std::string> failures;
};

struct NamedPredictor {
  std::string model;
  int d;  // 0 for d-independent predictors
  const models::Predictor* pred;
};

// Scores prepared predictors plus the implicit ideal ranking over sampled
// subnetworks, then aggregates with per-sample gains against "baseline".
EvalReport evaluate_predictors(const perfnet::PerformanceNetwork& net,
                               const std::vector<perfnet::Edge>& test_edges,
                               const std::vector<perfnet::Edge>& train_edges,
                               const std::vector<NamedPredictor>& predictors,
                               const SampleSpec& sample,
                               const std::vector<std::size_t>& k_list,
                               std::uint64_t seed);

// Full protocol: split, train every (model, d), sample subnetworks, score
// test links inside each sample, aggregate and compute gains vs baseline.
// A failing model marks its cells as failed without aborting the others.
EvalReport run_benchmark(const perfnet::PerformanceNetwork& net,
                         const BenchmarkConfig& cfg);

}  // namespace coplaynet::eval
