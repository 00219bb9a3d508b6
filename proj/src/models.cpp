#include "coplaynet/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "coplaynet/rng.hpp"

namespace coplaynet::models {

TrainEdges training_edges(const perfnet::PerformanceNetwork& net) {
  TrainEdges out;
  out.reserve(net.edges.size());
  for (const auto& e : net.edges) out.push_back({e.src, e.dst, e.weight});
  return out;
}

Matrix adjacency_rows(const TrainEdges& train, int n_nodes) {
  Matrix x(n_nodes, n_nodes);
  for (const auto& e : train) x(e.src, e.dst) = e.weight;
  return x;
}

Mask observation_mask(const TrainEdges& train, int n_nodes) {
  Mask m(n_nodes, n_nodes);
  for (const auto& e : train) m(e.src, e.dst) = 1;
  return m;
}

namespace {

void check_pair(int src, int dst, int n) {
  if (src < 0 || src >= n || dst < 0 || dst >= n)
    throw DataError("predict: unknown node index " +
                    std::to_string(src < 0 || src >= n ? src : dst));
}

}  // namespace

// ---------------------------------------------------------------- baseline

double BaselineAverage::predict(int src, int dst) const {
  check_pair(src, dst, n_nodes);
  return mean_weight;
}

BaselineAverage baseline_average(const TrainEdges& train, int n_nodes) {
  if (train.empty())
    throw DataError("baseline_average: empty training edge set");
  double sum = 0.0;
  for (const auto& e : train) sum += e.weight;
  BaselineAverage model;
  model.n_nodes = n_nodes;
  model.mean_weight = sum / static_cast<double>(train.size());
  return model;
}

// ---------------------------------------------------- graph factorization

double gf_loss(const FactorizationParams& params, const TrainEdges& train) {
  double loss = 0.0;
  for (const auto& e : train) {
    const double err = e.weight - dot(params.u.row(e.src), params.v.row(e.dst));
    double reg = 0.0;
    for (double x : params.u.row(e.src)) reg += x * x;
    for (double x : params.v.row(e.dst)) reg += x * x;
    loss += err * err + 0.5 * params.lambda * reg;
  }
  return loss;
}

std::pair<Matrix, Matrix> gf_loss_grad(const FactorizationParams& params,
                                       const TrainEdges& train) {
  Matrix du(params.u.rows, params.u.cols);
  Matrix dv(params.v.rows, params.v.cols);
  for (const auto& e : train) {
    const auto ui = params.u.row(e.src);
    const auto vj = params.v.row(e.dst);
    const double err = e.weight - dot(ui, vj);
    auto gi = du.row(e.src);
    auto gj = dv.row(e.dst);
    for (int k = 0; k < params.u.cols; ++k) {
      gi[k] += -2.0 * err * vj[k] + params.lambda * ui[k];
      gj[k] += -2.0 * err * ui[k] + params.lambda * vj[k];
    }
  }
  return {std::move(du), std::move(dv)};
}

FactorizationParams gf_train(const TrainEdges& train, int n_nodes,
                             const GfConfig& cfg) {
  if (cfg.d < 1) throw DataError("gf_train: d must be >= 1");
  if (train.empty()) throw DataError("gf_train: empty training edge set");

  FactorizationParams params;
  params.lambda = cfg.lambda;
  params.u = Matrix(n_nodes, cfg.d);
  params.v = Matrix(n_nodes, cfg.d);
  auto rng = make_rng(cfg.seed, "gf-init");
  std::normal_distribution<double> init(0.0, 0.1);
  for (double& x : params.u.data) x = init(rng);
  for (double& x : params.v.data) x = init(rng);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto shuffle_rng = make_rng(cfg.seed, "gf-shuffle");
  std::vector<double> ui_old(static_cast<std::size_t>(cfg.d));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (const std::size_t idx : order) {
      const auto& e = train[idx];
      auto ui = params.u.row(e.src);
      auto vj = params.v.row(e.dst);
      const double err = e.weight - dot(ui, vj);
      if (!std::isfinite(err))
        throw NumericError("gf_train: diverged at epoch " +
                           std::to_string(epoch));
      std::copy(ui.begin(), ui.end(), ui_old.begin());
      for (int k = 0; k < cfg.d; ++k) {
        ui[k] += cfg.learning_rate * (2.0 * err * vj[k] - cfg.lambda * ui[k]);
        vj[k] +=
            cfg.learning_rate * (2.0 * err * ui_old[k] - cfg.lambda * vj[k]);
      }
    }
    const double loss = gf_loss(params, train);
    if (!std::isfinite(loss))
      throw NumericError("gf_train: loss diverged at epoch " +
                         std::to_string(epoch) + " (lr " +
                         std::to_string(cfg.learning_rate) + ")");
  }
  return params;
}

double FactorizationModel::predict(int src, int dst) const {
  check_pair(src, dst, params.u.rows);
  return dot(params.u.row(src), params.v.row(dst));
}

// --------------------------------------------------------- autoencoders

int AutoencoderParams::input_dim() const { return encoder.front().w.cols; }
int AutoencoderParams::embedding_dim() const { return encoder.back().w.rows; }

AutoencoderParams make_autoencoder(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DataError("make_autoencoder: bad dimensions");
  auto rng = make_rng(seed, "ae-init");
  const auto glorot = [&](int out, int in, Activation act) {
    Layer layer;
    layer.w = Matrix(out, in);
    layer.b.assign(static_cast<std::size_t>(out), 0.0);
    layer.act = act;
    const double r = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-r, r);
    for (double& x : layer.w.data) x = u(rng);
    return layer;
  };
  const int h = 2 * d;
  AutoencoderParams params;
  params.encoder.push_back(glorot(h, n, Activation::relu));
  params.encoder.push_back(glorot(d, h, Activation::linear));
  params.decoder.push_back(glorot(h, d, Activation::relu));
  params.decoder.push_back(glorot(n, h, Activation::linear));
  return params;
}

namespace {

void layer_forward(const Layer& layer, std::span<const double> in,
                   std::vector<double>& pre, std::vector<double>& out) {
  const int rows = layer.w.rows;
  pre.resize(static_cast<std::size_t>(rows));
  out.resize(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double z = layer.b[static_cast<std::size_t>(r)];
    const auto wr = layer.w.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) z += wr[c] * in[c];
    pre[static_cast<std::size_t>(r)] = z;
    out[static_cast<std::size_t>(r)] =
        layer.act == Activation::relu ? std::max(z, 0.0) : z;
  }
}

struct ForwardTrace {
  // Per layer (encoder then decoder): pre-activation and activation.
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

const std::vector<double>& forward_trace(const AutoencoderParams& params,
                                         std::span<const double> x,
                                         ForwardTrace& trace) {
  const std::size_t n_layers = params.encoder.size() + params.decoder.size();
  trace.pre.resize(n_layers);
  trace.act.resize(n_layers);
  std::span<const double> cur = x;
  std::size_t li = 0;
  for (const auto& layer : params.encoder) {
    layer_forward(layer, cur, trace.pre[li], trace.act[li]);
    cur = trace.act[li];
    ++li;
  }
  for (const auto& layer : params.decoder) {
    layer_forward(layer, cur, trace.pre[li], trace.act[li]);
    cur = trace.act[li];
    ++li;
  }
  return trace.act.back();
}

const Layer& layer_at(const AutoencoderParams& params, std::size_t i) {
  return i < params.encoder.size()
             ? params.encoder[i]
             : params.decoder[i - params.encoder.size()];
}

Layer& layer_at(AutoencoderParams& params, std::size_t i) {
  return i < params.encoder.size()
             ? params.encoder[i]
             : params.decoder[i - params.encoder.size()];
}

// Masked input row: unobserved positions carry no signal into the model.
void masked_row(const Matrix& x_rows, const Mask* mask, int row,
                std::vector<double>& out) {
  const auto xr = x_rows.row(row);
  out.assign(xr.begin(), xr.end());
  if (mask) {
    const auto mr = mask->row(row);
    for (std::size_t j = 0; j < out.size(); ++j)
      if (!mr[j]) out[j] = 0.0;
  }
}

double row_loss(const AutoencoderParams& params, const Matrix& x_rows,
                const Mask* mask, int row, std::vector<double>& input,
                ForwardTrace& trace) {
  masked_row(x_rows, mask, row, input);
  const auto& recon = forward_trace(params, input, trace);
  const auto xr = x_rows.row(row);
  double loss = 0.0;
  for (std::size_t j = 0; j < recon.size(); ++j) {
    if (mask && !mask->row(row)[j]) continue;
    const double diff = recon[j] - xr[j];
    loss += diff * diff;
  }
  return loss;
}

double total_loss(const AutoencoderParams& params, const Matrix& x_rows,
                  const Mask* mask) {
  std::vector<double> input;
  ForwardTrace trace;
  double loss = 0.0;
  for (int i = 0; i < x_rows.rows; ++i)
    loss += row_loss(params, x_rows, mask, i, input, trace);
  return loss;
}

AutoencoderParams zero_like(const AutoencoderParams& params) {
  AutoencoderParams z = params;
  for (auto* part : {&z.encoder, &z.decoder})
    for (auto& layer : *part) {
      std::fill(layer.w.data.begin(), layer.w.data.end(), 0.0);
      std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
  return z;
}

void backprop_row(const AutoencoderParams& params, const Matrix& x_rows,
                  const Mask* mask, int row, AutoencoderParams& grad,
                  std::vector<double>& input, ForwardTrace& trace,
                  std::vector<double>& delta, std::vector<double>& delta_prev) {
  masked_row(x_rows, mask, row, input);
  const auto& recon = forward_trace(params, input, trace);
  const auto xr = x_rows.row(row);

  delta.assign(recon.size(), 0.0);
  for (std::size_t j = 0; j < recon.size(); ++j) {
    if (mask && !mask->row(row)[j]) continue;
    delta[j] = 2.0 * (recon[j] - xr[j]);
  }

  const std::size_t n_layers = params.encoder.size() + params.decoder.size();
  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& layer = layer_at(params, li);
    Layer& g = layer_at(grad, li);
    // d(loss)/d(pre-activation)
    if (layer.act == Activation::relu) {
      for (std::size_t r = 0; r < delta.size(); ++r)
        if (trace.pre[li][r] <= 0.0) delta[r] = 0.0;
    }
    const std::span<const double> below =
        li == 0 ? std::span<const double>(input)
                : std::span<const double>(trace.act[li - 1]);
    for (std::size_t r = 0; r < delta.size(); ++r) {
      const double dz = delta[r];
      if (dz == 0.0) continue;
      g.b[r] += dz;
      auto gw = g.w.row(static_cast<int>(r));
      for (std::size_t c = 0; c < below.size(); ++c)
        gw[c] += dz * below[c];
    }
    if (li == 0) break;
    delta_prev.assign(below.size(), 0.0);
    for (std::size_t r = 0; r < delta.size(); ++r) {
      const double dz = delta[r];
      if (dz == 0.0) continue;
      const auto wr = layer.w.row(static_cast<int>(r));
      for (std::size_t c = 0; c < below.size(); ++c)
        delta_prev[c] += wr[c] * dz;
    }
    std::swap(delta, delta_prev);
  }
}

}  // namespace

AeForward ae_forward(const AutoencoderParams& params,
                     std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.input_dim())
    throw DataError("ae_forward: input width " + std::to_string(x.size()) +
                    " != " + std::to_string(params.input_dim()));
  ForwardTrace trace;
  forward_trace(params, x, trace);
  AeForward out;
  out.embedding = trace.act[params.encoder.size() - 1];
  out.reconstruction = trace.act.back();
  return out;
}

double traditional_ae_loss(const AutoencoderParams& params,
                           const Matrix& x_rows) {
  return total_loss(params, x_rows, nullptr);
}

double teammate_ae_loss(const AutoencoderParams& params, const Matrix& x_rows,
                        const Mask& mask) {
  if (mask.rows != x_rows.rows || mask.cols != x_rows.cols)
    throw DataError("teammate_ae_loss: mask shape mismatch");
  return total_loss(params, x_rows, &mask);
}

AutoencoderParams ae_loss_grad(const AutoencoderParams& params,
                               const Matrix& x_rows, const Mask* mask,
                               std::span<const int> rows) {
  AutoencoderParams grad = zero_like(params);
  std::vector<double> input, delta, delta_prev;
  ForwardTrace trace;
  if (rows.empty()) {
    for (int i = 0; i < x_rows.rows; ++i)
      backprop_row(params, x_rows, mask, i, grad, input, trace, delta,
                   delta_prev);
  } else {
    for (int i : rows)
      backprop_row(params, x_rows, mask, i, grad, input, trace, delta,
                   delta_prev);
  }
  return grad;
}

AutoencoderParams ae_train(const Matrix& x_rows, const Mask* mask, int d,
                           const TrainConfig& cfg, TrainTrace* trace) {
  if (x_rows.rows != x_rows.cols)
    throw DataError("ae_train: adjacency rows must be square");
  AutoencoderParams params =
      make_autoencoder(x_rows.rows, d, substream_seed(cfg.seed, "ae-init"));
  AutoencoderParams velocity = zero_like(params);

  std::vector<int> order(static_cast<std::size_t>(x_rows.rows));
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(cfg.seed, "ae-shuffle");

  double lr = cfg.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t off = 0; off < order.size();
         off += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), off + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const int> batch(order.data() + off, end - off);
      AutoencoderParams grad = ae_loss_grad(params, x_rows, mask, batch);
      const double scale = lr / static_cast<double>(batch.size());
      const std::size_t n_layers =
          params.encoder.size() + params.decoder.size();
      for (std::size_t li = 0; li < n_layers; ++li) {
        Layer& p = layer_at(params, li);
        Layer& v = layer_at(velocity, li);
        const Layer& g = layer_at(grad, li);
        for (std::size_t k = 0; k < p.w.data.size(); ++k) {
          v.w.data[k] = cfg.momentum * v.w.data[k] - scale * g.w.data[k];
          p.w.data[k] += v.w.data[k];
        }
        for (std::size_t k = 0; k < p.b.size(); ++k) {
          v.b[k] = cfg.momentum * v.b[k] - scale * g.b[k];
          p.b[k] += v.b[k];
        }
      }
    }
    const double loss = total_loss(params, x_rows, mask);
    if (!std::isfinite(loss))
      throw NumericError("ae_train: loss diverged at epoch " +
                         std::to_string(epoch));
    if (trace) trace->epoch_loss.push_back(loss);
    if (loss < best - 1e-12) {
      best = loss;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      lr *= 0.5;
      since_best = 0;
      if (lr < 1e-7) break;
    }
  }
  return params;
}

Matrix ae_embeddings(const AutoencoderParams& params, const Matrix& x_rows) {
  Matrix y(x_rows.rows, params.embedding_dim());
  for (int i = 0; i < x_rows.rows; ++i) {
    const auto fwd = ae_forward(params, x_rows.row(i));
    std::copy(fwd.embedding.begin(), fwd.embedding.end(), y.row(i).begin());
  }
  return y;
}

const std::vector<double>& AutoencoderModel::reconstruction(int row) const {
  if (row_cache_.empty())
    row_cache_.resize(static_cast<std::size_t>(x_rows.rows));
  auto& cached = row_cache_[static_cast<std::size_t>(row)];
  if (cached.empty()) {
    std::vector<double> input;
    masked_row(x_rows, masked_input ? &mask : nullptr, row, input);
    cached = ae_forward(params, input).reconstruction;
  }
  return cached;
}

double AutoencoderModel::predict(int src, int dst) const {
  check_pair(src, dst, x_rows.rows);
  return reconstruction(src)[static_cast<std::size_t>(dst)];
}

}  // namespace coplaynet::models
