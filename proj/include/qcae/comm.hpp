#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qcae/ansatz.hpp"
#include "qcae/grad.hpp"

namespace qcae {

// Received/transmitted I/Q pair; same layout the decoder consumes.
using Signal2D = FeatureVector;

// Noise std-dev per real dimension under unit average symbol power:
// sigma = sqrt(1 / (2 * 10^(snr_db/10))).
double snr_to_sigma(double snr_db);

// 16 trainable 2-D symbols. encode() returns the power-normalized view:
// raw rows divided by sqrt((1/16) * sum ||raw_s||^2).
class ConstellationTable {
 public:
  ConstellationTable() = default;

  // Raw entries i.i.d. standard normal, redrawn while nearly degenerate.
  static ConstellationTable random_init(Rng& rng);

  double raw(int message, int component) const {
    return raw_[message * 2 + component];
  }
  double& raw(int message, int component) { return raw_[message * 2 + component]; }
  std::span<const double, 32> raw_flat() const { return raw_; }
  std::span<double, 32> raw_flat() { return raw_; }

  // sqrt of the mean raw row power; throws when the table is degenerate
  // (mean power below 1e-24, i.e. norm below 1e-12).
  double power_scale() const;

  Signal2D encode(int message) const;
  std::array<Signal2D, kMessageCount> normalized() const;

 private:
  std::array<double, 32> raw_{};
};

// y = x + n, n ~ N(0, sigma^2 I2). Consumes exactly two gaussians from rng.
Signal2D channel_apply(const Signal2D& x, double sigma, Rng& rng);

// Decoder distribution for a received signal: the variant circuit applied to
// |0000>, read out exactly or with sampled shots.
std::vector<double> decode(AnsatzVariant variant, const ParamSet& params,
                           const Signal2D& y,
                           const EvalMode& mode = EvalMode::analytic());

// Argmax with ties broken at the lowest index.
int predict_message(std::span<const double> probs);

// Monte-Carlo symbol error rate over n_symbols uniform messages under fresh
// channel noise.
double ser(const ConstellationTable& table, AnsatzVariant variant,
           const ParamSet& params, double snr_db, long n_symbols,
           std::uint64_t seed, const EvalMode& mode = EvalMode::analytic(),
           int n_threads = 1);

struct AdamConfig {
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long long steps = 0;
  std::vector<double> m, v;

  AdamState() = default;
  explicit AdamState(std::size_t n, AdamConfig cfg = {});
};

// Standard bias-corrected Adam update, in place.
void adam_step(AdamState& state, std::span<const double> grads,
               std::span<double> params);

struct TrainConfig {
  AnsatzVariant variant = AnsatzVariant::WeightedDoubleDR;
  int layers = 16;
  int steps = 1000;
  int batch_size = 64;
  double learning_rate = 0.1;
  double snr_db = 15.0;
  EvalMode eval_mode = EvalMode::analytic();
  std::uint64_t seed = 1;
  int ser_every = 25;
  long ser_symbols = 10000;
  int n_threads = 0;  // 0 = all hardware threads

  void validate() const;
};

struct MetricsHistory {
  std::vector<double> loss;     // one entry per training step
  std::vector<int> ser_steps;   // completed updates at each SER evaluation
  std::vector<double> ser;      // SER at those points (first entry: untrained)
  std::vector<double> wall_ms;  // per-step wall clock
  double max_power_error = 0.0;  // max |avg normalized power - 1| observed
};

struct TrainedModel {
  AnsatzVariant variant = AnsatzVariant::WeightedDoubleDR;
  ConstellationTable table;
  ParamSet params;
};

struct TrainResult {
  TrainedModel model;
  MetricsHistory metrics;
  AdamState adam;
  TrainConfig config;
};

// End-to-end training: uniform message batches -> encode -> AWGN -> decode
// -> cross-entropy gradient -> joint Adam update of the embedding (through
// the power normalization), rotations and encoding weights. Aborts on
// non-finite loss or a degenerate constellation.
TrainResult train(const TrainConfig& config);

// d(mean batch loss)/d raw embedding, chaining the per-sample feature
// gradients through the table-wide power normalization.
std::array<double, 32> embedding_gradient(
    const ConstellationTable& table, std::span<const int> messages,
    std::span<const std::array<double, 2>> d_features);

// --- classical reference decoder: dense 2 -> 32 (ReLU) -> 16 (softmax) ---

struct MlpDecoder {
  static constexpr int kHidden = 32;
  // layout: w1 (32x2) | b1 (32) | w2 (16x32) | b2 (16)
  std::vector<double> params;

  static MlpDecoder init(Rng& rng);
  std::array<double, kMessageCount> forward(const Signal2D& y) const;
  // Accumulates parameter gradients (same layout as params, not scaled by
  // the batch size) and the input gradient; returns the sample loss.
  double backward(const Signal2D& y, int message, std::span<double> d_params,
                  std::array<double, 2>& d_input) const;
};

struct BaselineResult {
  ConstellationTable table;
  MlpDecoder decoder;
  MetricsHistory metrics;
  TrainConfig config;
};

// Same encoder, channel, loss, optimizer and batch schedule as train(); only
// the decoder differs.
BaselineResult baseline_train(const TrainConfig& config);

double baseline_ser(const ConstellationTable& table, const MlpDecoder& decoder,
                    double snr_db, long n_symbols, std::uint64_t seed);

struct SnrPoint {
  double snr_db = 0.0;
  double ser = 0.0;
};

std::vector<SnrPoint> sweep_snr(const TrainedModel& model,
                                std::span<const double> snr_grid,
                                long n_symbols, std::uint64_t seed,
                                const EvalMode& mode = EvalMode::analytic(),
                                int n_threads = 1);

std::vector<SnrPoint> baseline_sweep_snr(const ConstellationTable& table,
                                         const MlpDecoder& decoder,
                                         std::span<const double> snr_grid,
                                         long n_symbols, std::uint64_t seed);

struct ConstellationExport {
  struct Point {
    int message = 0;
    double i = 0.0;
    double q = 0.0;
  };
  std::array<Point, kMessageCount> points{};
  double min_distance = 0.0;
  double average_power = 0.0;
};

ConstellationExport export_constellation(const ConstellationTable& table);

}  // namespace qcae
