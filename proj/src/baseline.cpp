#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcae/comm.hpp"
#include "qcae/grad.hpp"

namespace qcae {

namespace {

constexpr std::uint64_t kTagTableInit = 0x7AB1E;
constexpr std::uint64_t kTagMlpInit = 0x317;
constexpr std::uint64_t kTagBatch = 0xBA7C4;
constexpr std::uint64_t kTagNoise = 0x2015E;
constexpr std::uint64_t kTagSerEval = 0x5E12;

constexpr int kIn = 2;
constexpr int kHidden = MlpDecoder::kHidden;
constexpr int kOut = kMessageCount;

constexpr int kW1 = kHidden * kIn;           // 64
constexpr int kB1 = kW1 + kHidden;           // +32
constexpr int kW2 = kB1 + kOut * kHidden;    // +512
constexpr int kB2 = kW2 + kOut;              // +16 -> 624 total

struct Activations {
  std::array<double, kHidden> pre;
  std::array<double, kHidden> hidden;
  std::array<double, kOut> probs;
};

Activations run_forward(const std::vector<double>& p, const Signal2D& y) {
  Activations act;
  for (int h = 0; h < kHidden; ++h) {
    const double z = p[h * 2] * y.x0 + p[h * 2 + 1] * y.x1 + p[kW1 + h];
    act.pre[h] = z;
    act.hidden[h] = z > 0.0 ? z : 0.0;
  }
  std::array<double, kOut> logits;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int o = 0; o < kOut; ++o) {
    double z = p[kW2 + o];
    const double* row = &p[kB1 + o * kHidden];
    for (int h = 0; h < kHidden; ++h) z += row[h] * act.hidden[h];
    logits[o] = z;
    max_logit = std::max(max_logit, z);
  }
  double denom = 0.0;
  for (int o = 0; o < kOut; ++o) {
    logits[o] = std::exp(logits[o] - max_logit);
    denom += logits[o];
  }
  for (int o = 0; o < kOut; ++o) act.probs[o] = logits[o] / denom;
  return act;
}

}  // namespace

MlpDecoder MlpDecoder::init(Rng& rng) {
  MlpDecoder mlp;
  mlp.params.assign(kB2, 0.0);
  const double w1_std = std::sqrt(2.0 / kIn);
  for (int k = 0; k < kW1; ++k) mlp.params[k] = w1_std * rng.gaussian();
  const double w2_std = std::sqrt(2.0 / kHidden);
  for (int k = kB1; k < kW2; ++k) mlp.params[k] = w2_std * rng.gaussian();
  return mlp;
}

std::array<double, kMessageCount> MlpDecoder::forward(const Signal2D& y) const {
  return run_forward(params, y).probs;
}

double MlpDecoder::backward(const Signal2D& y, int message,
                            std::span<double> d_params,
                            std::array<double, 2>& d_input) const {
  if (d_params.size() != params.size()) {
    throw std::invalid_argument("mlp backward: gradient shape mismatch");
  }
  if (message < 0 || message >= kOut) {
    throw std::out_of_range("message out of range");
  }
  const Activations act = run_forward(params, y);
  const double p_clamped = std::max(act.probs[message], kLogClipFloor);
  const double loss = -std::log(p_clamped);

  // d loss / d logit_o = f * (p_o - delta_{o,s}) with f = p_s / clamp(p_s)
  const double f = act.probs[message] / p_clamped;
  std::array<double, kOut> d_logits;
  for (int o = 0; o < kOut; ++o) {
    d_logits[o] = f * (act.probs[o] - (o == message ? 1.0 : 0.0));
  }

  std::array<double, kHidden> d_hidden{};
  for (int o = 0; o < kOut; ++o) {
    const double g = d_logits[o];
    d_params[kB2 + o] += g;
    const double* row = &params[kB1 + o * kHidden];
    double* d_row = &d_params[kB1 + o * kHidden];
    for (int h = 0; h < kHidden; ++h) {
      d_row[h] += g * act.hidden[h];
      d_hidden[h] += g * row[h];
    }
  }
  d_input = {0.0, 0.0};
  for (int h = 0; h < kHidden; ++h) {
    if (act.pre[h] <= 0.0) continue;
    const double g = d_hidden[h];
    d_params[h * 2] += g * y.x0;
    d_params[h * 2 + 1] += g * y.x1;
    d_params[kW1 + h] += g;
    d_input[0] += g * params[h * 2];
    d_input[1] += g * params[h * 2 + 1];
  }
  return loss;
}

double baseline_ser(const ConstellationTable& table, const MlpDecoder& decoder,
                    double snr_db, long n_symbols, std::uint64_t seed) {
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  const double sigma = snr_to_sigma(snr_db);
  Rng rng(seed);
  long errors = 0;
  for (long i = 0; i < n_symbols; ++i) {
    const int s = rng.uniform_int(kMessageCount);
    const Signal2D y = channel_apply(table.encode(s), sigma, rng);
    const auto probs = decoder.forward(y);
    errors += predict_message(probs) != s;
  }
  return static_cast<double>(errors) / static_cast<double>(n_symbols);
}

BaselineResult baseline_train(const TrainConfig& config) {
  config.validate();
  BaselineResult result;
  result.config = config;

  Rng table_rng(derive_seed(config.seed, kTagTableInit));
  ConstellationTable table = ConstellationTable::random_init(table_rng);
  Rng mlp_rng(derive_seed(config.seed, kTagMlpInit));
  MlpDecoder decoder = MlpDecoder::init(mlp_rng);

  const std::size_t n_mlp = decoder.params.size();
  const std::size_t dim = 32 + n_mlp;
  AdamState adam(dim, AdamConfig{config.learning_rate});
  MetricsHistory metrics;
  const double sigma = snr_to_sigma(config.snr_db);

  const auto eval_ser = [&](int updates) {
    metrics.ser_steps.push_back(updates);
    metrics.ser.push_back(baseline_ser(
        table, decoder, config.snr_db, config.ser_symbols,
        derive_seed(config.seed, kTagSerEval, updates)));
  };
  eval_ser(0);

  std::vector<int> messages(config.batch_size);
  std::vector<Signal2D> received(config.batch_size);
  std::vector<std::array<double, 2>> d_features(config.batch_size);
  std::vector<double> d_mlp(n_mlp), flat(dim), grads(dim);

  for (int step = 0; step < config.steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng msg_rng(derive_seed(config.seed, kTagBatch, step));
    Rng noise_rng(derive_seed(config.seed, kTagNoise, step));
    for (int i = 0; i < config.batch_size; ++i) {
      messages[i] = msg_rng.uniform_int(kMessageCount);
      received[i] = channel_apply(table.encode(messages[i]), sigma, noise_rng);
    }

    std::fill(d_mlp.begin(), d_mlp.end(), 0.0);
    double loss = 0.0;
    for (int i = 0; i < config.batch_size; ++i) {
      loss += decoder.backward(received[i], messages[i], d_mlp, d_features[i]);
    }
    const double inv_b = 1.0 / config.batch_size;
    loss *= inv_b;
    if (!std::isfinite(loss)) {
      throw std::runtime_error(
          "baseline training aborted: non-finite loss at step " +
          std::to_string(step));
    }
    const auto d_raw = embedding_gradient(table, messages, d_features);

    std::copy(table.raw_flat().begin(), table.raw_flat().end(), flat.begin());
    std::copy(decoder.params.begin(), decoder.params.end(), flat.begin() + 32);
    std::copy(d_raw.begin(), d_raw.end(), grads.begin());
    for (std::size_t k = 0; k < n_mlp; ++k) grads[32 + k] = d_mlp[k] * inv_b;

    adam_step(adam, grads, flat);

    std::copy(flat.begin(), flat.begin() + 32, table.raw_flat().begin());
    std::copy(flat.begin() + 32, flat.end(), decoder.params.begin());

    metrics.loss.push_back(loss);
    const auto t1 = std::chrono::steady_clock::now();
    metrics.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());

    const int updates = step + 1;
    if (updates % config.ser_every == 0 ||
        (updates == config.steps && config.steps % config.ser_every != 0)) {
      eval_ser(updates);
    }
  }

  result.table = table;
  result.decoder = std::move(decoder);
  result.metrics = std::move(metrics);
  return result;
}

}  // namespace qcae
