#include "qcae/comm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcae/parallel.hpp"
#include "qcae/sim.hpp"

namespace qcae {

namespace {

// Substream tags; every consumer of randomness inside train/ser derives its
// own stream from (master seed, tag, index) so runs are reproducible and
// independent of threading.
constexpr std::uint64_t kTagTableInit = 0x7AB1E;
constexpr std::uint64_t kTagParamInit = 0x0A27;
constexpr std::uint64_t kTagBatch = 0xBA7C4;
constexpr std::uint64_t kTagNoise = 0x2015E;
constexpr std::uint64_t kTagSerEval = 0x5E12;
constexpr std::uint64_t kTagShots = 0x54075;
constexpr std::uint64_t kTagDecodeShot = 0xD0DE;
constexpr std::uint64_t kTagSweep = 0x53EE9;

}  // namespace

double snr_to_sigma(double snr_db) {
  return std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0));
}

ConstellationTable ConstellationTable::random_init(Rng& rng) {
  ConstellationTable table;
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (auto& v : table.raw_) v = rng.gaussian();
    double power = 0.0;
    for (const auto& v : table.raw_) power += v * v;
    if (std::sqrt(power / kMessageCount) > 1e-6) return table;
  }
  throw std::runtime_error("could not draw a non-degenerate constellation");
}

double ConstellationTable::power_scale() const {
  double power = 0.0;
  for (const auto& v : raw_) power += v * v;
  const double scale = std::sqrt(power / kMessageCount);
  if (scale < 1e-12) {
    throw std::runtime_error("degenerate constellation: norm below 1e-12");
  }
  return scale;
}

Signal2D ConstellationTable::encode(int message) const {
  if (message < 0 || message >= kMessageCount) {
    throw std::out_of_range("message out of range: " + std::to_string(message));
  }
  const double scale = power_scale();
  return {raw_[message * 2] / scale, raw_[message * 2 + 1] / scale};
}

std::array<Signal2D, kMessageCount> ConstellationTable::normalized() const {
  const double scale = power_scale();
  std::array<Signal2D, kMessageCount> rows;
  for (int s = 0; s < kMessageCount; ++s) {
    rows[s] = {raw_[s * 2] / scale, raw_[s * 2 + 1] / scale};
  }
  return rows;
}

Signal2D channel_apply(const Signal2D& x, double sigma, Rng& rng) {
  const double n0 = rng.gaussian();
  const double n1 = rng.gaussian();
  return {x.x0 + sigma * n0, x.x1 + sigma * n1};
}

std::vector<double> decode(AnsatzVariant variant, const ParamSet& params,
                           const Signal2D& y, const EvalMode& mode) {
  StateVector state(kDecoderQubits);
  apply_circuit(state, build_circuit(variant, params, y));
  auto probs = probabilities(state);
  if (!mode.is_analytic()) {
    Rng rng(derive_seed(mode.seed, kTagDecodeShot));
    probs = sample_counts(probs, mode.shots, rng);
  }
  return probs;
}

int predict_message(std::span<const double> probs) {
  int best = 0;
  for (int b = 1; b < static_cast<int>(probs.size()); ++b) {
    if (probs[b] > probs[best]) best = b;
  }
  return best;
}

double ser(const ConstellationTable& table, AnsatzVariant variant,
           const ParamSet& params, double snr_db, long n_symbols,
           std::uint64_t seed, const EvalMode& mode, int n_threads) {
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  const double sigma = snr_to_sigma(snr_db);
  Rng rng(seed);
  std::vector<int> messages(n_symbols);
  std::vector<Signal2D> received(n_symbols);
  for (long i = 0; i < n_symbols; ++i) {
    messages[i] = rng.uniform_int(kMessageCount);
    received[i] = channel_apply(table.encode(messages[i]), sigma, rng);
  }
  std::vector<unsigned char> wrong(n_symbols, 0);
  parallel_for(static_cast<int>(n_symbols), n_threads, [&](int i) {
    EvalMode m = mode;
    if (!mode.is_analytic()) {
      m.seed = derive_seed(mode.seed, kTagSerEval, static_cast<std::uint64_t>(i));
    }
    const auto probs = decode(variant, params, received[i], m);
    wrong[i] = predict_message(probs) != messages[i];
  });
  long errors = 0;
  for (const auto w : wrong) errors += w;
  return static_cast<double>(errors) / static_cast<double>(n_symbols);
}

AdamState::AdamState(std::size_t n, AdamConfig cfg)
    : config(cfg), m(n, 0.0), v(n, 0.0) {}

void adam_step(AdamState& state, std::span<const double> grads,
               std::span<double> params) {
  if (grads.size() != params.size() || grads.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.steps;
  const auto& cfg = state.config;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.steps));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.steps));
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * grads[k];
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * grads[k] * grads[k];
    const double m_hat = state.m[k] / bc1;
    const double v_hat = state.v[k] / bc2;
    params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

void TrainConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  if (ser_every < 1) throw std::invalid_argument("ser_every must be >= 1");
  if (ser_symbols < 1) throw std::invalid_argument("ser_symbols must be >= 1");
}

std::array<double, 32> embedding_gradient(
    const ConstellationTable& table, std::span<const int> messages,
    std::span<const std::array<double, 2>> d_features) {
  if (messages.size() != d_features.size() || messages.empty()) {
    throw std::invalid_argument("embedding_gradient: batch shape mismatch");
  }
  const double scale = table.power_scale();
  const auto rows = table.normalized();
  const double inv_b = 1.0 / static_cast<double>(messages.size());

  // d x_hat[s,k] / d raw[t,j] = delta_st delta_kj / c - x_hat[s,k] raw[t,j] / (16 c^2)
  std::array<double, 32> grad{};
  double dot_sum = 0.0;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const int s = messages[i];
    grad[s * 2] += d_features[i][0] * inv_b / scale;
    grad[s * 2 + 1] += d_features[i][1] * inv_b / scale;
    dot_sum += d_features[i][0] * rows[s].x0 + d_features[i][1] * rows[s].x1;
  }
  const double shrink = dot_sum * inv_b / (kMessageCount * scale * scale);
  for (int t = 0; t < kMessageCount; ++t) {
    grad[t * 2] -= shrink * table.raw(t, 0);
    grad[t * 2 + 1] -= shrink * table.raw(t, 1);
  }
  return grad;
}

TrainResult train(const TrainConfig& config) {
  config.validate();
  TrainResult result;
  result.config = config;

  Rng table_rng(derive_seed(config.seed, kTagTableInit));
  ConstellationTable table = ConstellationTable::random_init(table_rng);
  Rng param_rng(derive_seed(config.seed, kTagParamInit));
  ParamSet params = init_params(config.variant, config.layers, param_rng);

  const int n_rot = config.layers * 12;
  const int n_w = static_cast<int>(params.encoding_weights.size());
  const std::size_t dim = 32 + n_rot + n_w;
  AdamState adam(dim, AdamConfig{config.learning_rate});

  MetricsHistory metrics;
  const double sigma = snr_to_sigma(config.snr_db);

  const auto eval_ser = [&](int updates) {
    metrics.ser_steps.push_back(updates);
    metrics.ser.push_back(ser(table, config.variant, params, config.snr_db,
                              config.ser_symbols,
                              derive_seed(config.seed, kTagSerEval, updates),
                              config.eval_mode, config.n_threads));
  };
  eval_ser(0);

  std::vector<BatchSample> batch(config.batch_size);
  std::vector<int> messages(config.batch_size);
  std::vector<double> flat(dim), grads(dim);

  for (int step = 0; step < config.steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng msg_rng(derive_seed(config.seed, kTagBatch, step));
    Rng noise_rng(derive_seed(config.seed, kTagNoise, step));
    for (int i = 0; i < config.batch_size; ++i) {
      messages[i] = msg_rng.uniform_int(kMessageCount);
      batch[i].message = messages[i];
      batch[i].x = channel_apply(table.encode(messages[i]), sigma, noise_rng);
    }

    EvalMode mode = config.eval_mode;
    if (!mode.is_analytic()) {
      mode.seed = derive_seed(config.eval_mode.seed, kTagShots, step);
    }
    const BatchGradient bg =
        loss_gradient(batch, config.variant, params, mode, config.n_threads);
    if (!std::isfinite(bg.loss)) {
      throw std::runtime_error("training aborted: non-finite loss at step " +
                               std::to_string(step));
    }
    const auto d_raw = embedding_gradient(table, messages, bg.sample_d_features);

    std::copy(table.raw_flat().begin(), table.raw_flat().end(), flat.begin());
    std::copy(params.rotations.begin(), params.rotations.end(),
              flat.begin() + 32);
    std::copy(params.encoding_weights.begin(), params.encoding_weights.end(),
              flat.begin() + 32 + n_rot);
    std::copy(d_raw.begin(), d_raw.end(), grads.begin());
    std::copy(bg.grads.d_rotations.begin(), bg.grads.d_rotations.end(),
              grads.begin() + 32);
    std::copy(bg.grads.d_weights.begin(), bg.grads.d_weights.end(),
              grads.begin() + 32 + n_rot);

    adam_step(adam, grads, flat);

    std::copy(flat.begin(), flat.begin() + 32, table.raw_flat().begin());
    std::copy(flat.begin() + 32, flat.begin() + 32 + n_rot,
              params.rotations.begin());
    std::copy(flat.begin() + 32 + n_rot, flat.end(),
              params.encoding_weights.begin());

    // power_scale() throws if the table degenerated; the normalized view's
    // residual error is tracked as evidence the constraint holds each step.
    const auto rows = table.normalized();
    double power = 0.0;
    for (const auto& r : rows) power += r.x0 * r.x0 + r.x1 * r.x1;
    metrics.max_power_error = std::max(
        metrics.max_power_error, std::abs(power / kMessageCount - 1.0));

    metrics.loss.push_back(bg.loss);
    const auto t1 = std::chrono::steady_clock::now();
    metrics.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());

    const int updates = step + 1;
    if (updates % config.ser_every == 0 ||
        (updates == config.steps && config.steps % config.ser_every != 0)) {
      eval_ser(updates);
    }
  }

  result.model = TrainedModel{config.variant, table, std::move(params)};
  result.metrics = std::move(metrics);
  result.adam = std::move(adam);
  return result;
}

std::vector<SnrPoint> sweep_snr(const TrainedModel& model,
                                std::span<const double> snr_grid,
                                long n_symbols, std::uint64_t seed,
                                const EvalMode& mode, int n_threads) {
  std::vector<SnrPoint> points;
  points.reserve(snr_grid.size());
  for (std::size_t g = 0; g < snr_grid.size(); ++g) {
    points.push_back({snr_grid[g],
                      ser(model.table, model.variant, model.params, snr_grid[g],
                          n_symbols, derive_seed(seed, kTagSweep, g), mode,
                          n_threads)});
  }
  return points;
}

std::vector<SnrPoint> baseline_sweep_snr(const ConstellationTable& table,
                                         const MlpDecoder& decoder,
                                         std::span<const double> snr_grid,
                                         long n_symbols, std::uint64_t seed) {
  std::vector<SnrPoint> points;
  points.reserve(snr_grid.size());
  for (std::size_t g = 0; g < snr_grid.size(); ++g) {
    points.push_back({snr_grid[g],
                      baseline_ser(table, decoder, snr_grid[g], n_symbols,
                                   derive_seed(seed, kTagSweep, g))});
  }
  return points;
}

ConstellationExport export_constellation(const ConstellationTable& table) {
  ConstellationExport out;
  const auto rows = table.normalized();
  double power = 0.0;
  double min_dist2 = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kMessageCount; ++s) {
    out.points[s] = {s, rows[s].x0, rows[s].x1};
    power += rows[s].x0 * rows[s].x0 + rows[s].x1 * rows[s].x1;
    for (int t = 0; t < s; ++t) {
      const double di = rows[s].x0 - rows[t].x0;
      const double dq = rows[s].x1 - rows[t].x1;
      min_dist2 = std::min(min_dist2, di * di + dq * dq);
    }
  }
  out.min_distance = std::sqrt(min_dist2);
  out.average_power = power / kMessageCount;
  return out;
}

}  // namespace qcae
