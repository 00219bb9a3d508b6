#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "coplaynet/linalg.hpp"
#include "coplaynet/perfnet.hpp"

namespace coplaynet::models {

struct TrainEdge {
  int src;
  int dst;
  double weight;
};
using TrainEdges = std::vector<TrainEdge>;

TrainEdges training_edges(const perfnet::PerformanceNetwork& net);

// Dense adjacency rows of the training network: zeros at hidden and
// unobserved positions. The mask is 1 exactly on training edges.
Matrix adjacency_rows(const TrainEdges& train, int n_nodes);
Mask observation_mask(const TrainEdges& train, int n_nodes);

struct Predictor {
  virtual ~Predictor() = default;
  // Predicted link weight for the ordered pair (src, dst). Throws DataError
  // for unknown node indices.
  virtual double predict(int src, int dst) const = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------- baseline

struct BaselineAverage final : Predictor {
  int n_nodes{0};
  double mean_weight{0.0};
  double predict(int src, int dst) const override;
  std::string name() const override { return "baseline"; }
};

// Predicts the mean training-edge weight for every pair. Throws DataError
// on an empty training set.
BaselineAverage baseline_average(const TrainEdges& train, int n_nodes);

// ---------------------------------------------------- graph factorization

struct FactorizationParams {
  Matrix u;  // n x d source factors
  Matrix v;  // n x d target factors
  double lambda{0.0};
};

// Squared error over observed links plus the per-edge norm regularizer,
// exactly as summed over (i, j) in E.
double gf_loss(const FactorizationParams& params, const TrainEdges& train);

// Gradient of gf_loss with respect to every entry of U and V.
std::pair<Matrix, Matrix> gf_loss_grad(const FactorizationParams& params,
                                       const TrainEdges& train);

struct GfConfig {
  int d = 16;
  double lambda = 1e-4;
  double learning_rate = 0.02;
  int epochs = 300;
  std::uint64_t seed = 1;
};

// SGD over observed edges; throws NumericError with diagnostics when the
// loss diverges.
FactorizationParams gf_train(const TrainEdges& train, int n_nodes,
                             const GfConfig& cfg);

struct FactorizationModel final : Predictor {
  FactorizationParams params;
  double predict(int src, int dst) const override;
  std::string name() const override { return "factorization"; }
};

// --------------------------------------------------------- autoencoders

enum class Activation { linear, relu };

struct Layer {
  Matrix w;               // out x in
  std::vector<double> b;  // out
  Activation act{Activation::linear};
};

struct AutoencoderParams {
  std::vector<Layer> encoder;
  std::vector<Layer> decoder;
  int input_dim() const;
  int embedding_dim() const;
};

// Encoder [n -> 2d -> d] with a rectifier hidden layer and linear embedding,
// decoder mirrored with a linear output (weights are signed reals).
AutoencoderParams make_autoencoder(int n, int d, std::uint64_t seed);

struct AeForward {
  std::vector<double> embedding;
  std::vector<double> reconstruction;
};

AeForward ae_forward(const AutoencoderParams& params,
                     std::span<const double> x);

// Full-reconstruction loss: sum of squared errors over ALL entries.
double traditional_ae_loss(const AutoencoderParams& params,
                           const Matrix& x_rows);

// Masked loss: squared error restricted to observed entries; the input row
// is taken through the mask too, so entries outside it carry no signal.
double teammate_ae_loss(const AutoencoderParams& params, const Matrix& x_rows,
                        const Mask& mask);

// Gradients of the sum-form loss over the given rows (all rows when `rows`
// is empty); mask == nullptr means all entries are penalized.
AutoencoderParams ae_loss_grad(const AutoencoderParams& params,
                               const Matrix& x_rows, const Mask* mask,
                               std::span<const int> rows = {});

struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 16;
  int epochs = 500;
  int patience = 20;  // epochs without improvement before the rate halves
  std::uint64_t seed = 1;
};

struct TrainTrace {
  std::vector<double> epoch_loss;
};

// Minibatch gradient descent with momentum; the learning rate halves on
// plateau. Deterministic under a fixed seed (single-threaded).
AutoencoderParams ae_train(const Matrix& x_rows, const Mask* mask, int d,
                           const TrainConfig& cfg,
                           TrainTrace* trace = nullptr);

// Encoder outputs for every row: the learned representation, n x d.
Matrix ae_embeddings(const AutoencoderParams& params, const Matrix& x_rows);

struct AutoencoderModel final : Predictor {
  AutoencoderParams params;
  Matrix x_rows;  // training adjacency rows fed back at prediction time
  bool masked_input{false};
  Mask mask;      // used only when masked_input
  std::string model_name{"autoencoder"};

  double predict(int src, int dst) const override;
  std::string name() const override { return model_name; }

 private:
  mutable std::vector<std::vector<double>> row_cache_;
  const std::vector<double>& reconstruction(int row) const;
};

}  // namespace coplaynet::models
