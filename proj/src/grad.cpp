#include "qcae/grad.hpp"

#include <cmath>
#include <stdexcept>

#include "qcae/parallel.hpp"
#include "qcae/sim.hpp"

namespace qcae {

EvalMode EvalMode::sampled(long shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  return EvalMode{Kind::Shots, shots, seed};
}

namespace {

constexpr int kDim = 1 << kDecoderQubits;
constexpr double kHalfPi = 1.5707963267948966;

using Amps = std::array<cxd, kDim>;
using Probs = std::array<double, kDim>;

// Flattened circuit specialized for the fixed 4-qubit decoder: single-qubit
// gates carry their 2x2 matrix, CNOTs only their wires.
struct CompiledGate {
  bool is_cnot = false;
  int q0 = 0, q1 = 0;
  std::array<cxd, 4> m{};
  GateKind kind = GateKind::X;
  std::array<double, 3> angles{};
};

// One differentiable angle. Shifting it moves up to two Jacobian columns
// (an encoding angle feeds both its weight and its feature via the chain
// rule).
struct Site {
  int gate_index = 0;
  int angle_slot = 0;
  struct Target {
    int column;
    double coeff;
  };
  std::array<Target, 2> targets{};
  int n_targets = 0;
};

struct SitedCircuit {
  std::vector<CompiledGate> gates;
  std::vector<Site> sites;
  int n_rotations = 0;  // 12L
  int n_params = 0;     // P = 12L (+4L when weighted)
};

CompiledGate compile_gate(const GateOp& gate) {
  CompiledGate cg;
  cg.kind = gate.kind;
  cg.angles = gate.angles;
  cg.q0 = gate.targets[0];
  cg.q1 = gate.targets[1];
  if (gate.kind == GateKind::CNOT) {
    cg.is_cnot = true;
  } else {
    cg.m = gate_matrix_1q(gate.kind, gate.angles.data());
  }
  return cg;
}

SitedCircuit compile_sited(AnsatzVariant variant, const ParamSet& params,
                           const FeatureVector& x) {
  const auto annotated = build_annotated_circuit(variant, params, x);
  SitedCircuit out;
  out.n_rotations = params.layers * 12;
  out.n_params = param_count(variant, params.layers);
  out.gates.reserve(annotated.gates.size());
  for (const auto& gate : annotated.gates) out.gates.push_back(compile_gate(gate));

  const int weight_base = out.n_rotations;
  const int feature_base = out.n_params;
  for (std::size_t i = 0; i < annotated.gates.size(); ++i) {
    const auto& role = annotated.roles[i];
    switch (role.kind) {
      case GateRole::Kind::Rotation:
        for (int a = 0; a < 3; ++a) {
          Site site;
          site.gate_index = static_cast<int>(i);
          site.angle_slot = a;
          site.targets[0] = {(role.layer * 4 + role.qubit) * 3 + a, 1.0};
          site.n_targets = 1;
          out.sites.push_back(site);
        }
        break;
      case GateRole::Kind::Encoding: {
        Site site;
        site.gate_index = static_cast<int>(i);
        site.angle_slot = 0;
        if (variant_has_weights(variant)) {
          const double w = params.weight(role.layer, role.qubit);
          site.targets[0] = {weight_base + role.layer * 4 + role.qubit,
                             x[role.feature]};
          site.targets[1] = {feature_base + role.feature, w};
          site.n_targets = 2;
        } else {
          site.targets[0] = {feature_base + role.feature, 1.0};
          site.n_targets = 1;
        }
        out.sites.push_back(site);
        break;
      }
      case GateRole::Kind::Entangler:
        break;
    }
  }
  return out;
}

inline void apply_compiled(Amps& amps, const CompiledGate& g) {
  if (g.is_cnot) {
    const int cbit = 1 << g.q0;
    const int tbit = 1 << g.q1;
    for (int i = 0; i < kDim; ++i) {
      if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
    }
    return;
  }
  const int stride = 1 << g.q0;
  for (int base = 0; base < kDim; base += 2 * stride) {
    for (int i = base; i < base + stride; ++i) {
      const cxd a0 = amps[i];
      const cxd a1 = amps[i + stride];
      amps[i] = g.m[0] * a0 + g.m[1] * a1;
      amps[i + stride] = g.m[2] * a0 + g.m[3] * a1;
    }
  }
}

inline Probs probs_of(const Amps& amps) {
  Probs p;
  for (int i = 0; i < kDim; ++i) p[i] = std::norm(amps[i]);
  return p;
}

Probs sample_probs(const Probs& exact, const EvalMode& mode,
                   std::uint64_t stream) {
  std::vector<double> v(exact.begin(), exact.end());
  Rng rng(derive_seed(mode.seed, 0x5A4D, stream));
  const auto freq = sample_counts(v, mode.shots, rng);
  Probs p;
  for (int i = 0; i < kDim; ++i) p[i] = freq[i];
  return p;
}

// Evaluates the forward distribution and every site's dp/dangle via the
// two-point shift, reusing the unshifted prefix states. In Shots mode each
// readout consumes substream (sample_tag << 32) | eval_index with
// eval_index 0 for the forward pass and 2k+1 / 2k+2 for site k's +/- shift.
template <typename SiteSink>
Probs evaluate_sites(const SitedCircuit& circuit, const EvalMode& mode,
                     std::uint64_t sample_tag, SiteSink&& sink) {
  const int n_gates = static_cast<int>(circuit.gates.size());
  std::vector<Amps> prefix(static_cast<std::size_t>(n_gates) + 1);
  prefix[0].fill(cxd{0.0, 0.0});
  prefix[0][0] = cxd{1.0, 0.0};
  for (int g = 0; g < n_gates; ++g) {
    prefix[g + 1] = prefix[g];
    apply_compiled(prefix[g + 1], circuit.gates[g]);
  }

  const auto readout = [&](const Amps& amps, std::uint64_t eval_index) {
    const Probs exact = probs_of(amps);
    if (mode.is_analytic()) return exact;
    return sample_probs(exact, mode, (sample_tag << 32) | eval_index);
  };

  const Probs forward = readout(prefix[n_gates], 0);

  const auto shifted_eval = [&](int gate_index, int slot, double delta,
                                std::uint64_t eval_index) {
    CompiledGate shifted = circuit.gates[gate_index];
    shifted.angles[slot] += delta;
    shifted.m = gate_matrix_1q(shifted.kind, shifted.angles.data());
    Amps amps = prefix[gate_index];
    apply_compiled(amps, shifted);
    for (int g = gate_index + 1; g < n_gates; ++g) {
      apply_compiled(amps, circuit.gates[g]);
    }
    return readout(amps, eval_index);
  };

  for (std::size_t k = 0; k < circuit.sites.size(); ++k) {
    const Site& site = circuit.sites[k];
    const Probs plus =
        shifted_eval(site.gate_index, site.angle_slot, kHalfPi, 2 * k + 1);
    const Probs minus =
        shifted_eval(site.gate_index, site.angle_slot, -kHalfPi, 2 * k + 2);
    Probs d;
    for (int b = 0; b < kDim; ++b) d[b] = 0.5 * (plus[b] - minus[b]);
    sink(site, d);
  }
  return forward;
}

}  // namespace

ProbJacobian prob_jacobian(AnsatzVariant variant, const ParamSet& params,
                           const FeatureVector& x, const EvalMode& mode) {
  const SitedCircuit circuit = compile_sited(variant, params, x);
  ProbJacobian jac;
  jac.cols = circuit.n_params + 2;
  jac.values.assign(static_cast<std::size_t>(jac.rows) * jac.cols, 0.0);
  evaluate_sites(circuit, mode, 0, [&](const Site& site, const Probs& d) {
    for (int t = 0; t < site.n_targets; ++t) {
      const auto [column, coeff] = site.targets[t];
      for (int b = 0; b < kDim; ++b) {
        jac.values[static_cast<std::size_t>(b) * jac.cols + column] +=
            coeff * d[b];
      }
    }
  });
  return jac;
}

BatchGradient loss_gradient(std::span<const BatchSample> batch,
                            AnsatzVariant variant, const ParamSet& params,
                            const EvalMode& mode, int n_threads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  params.validate(variant);
  for (const auto& sample : batch) {
    if (sample.message < 0 || sample.message >= kMessageCount) {
      throw std::out_of_range("message out of range");
    }
  }

  const int n_rot = params.layers * 12;
  const int n_w = static_cast<int>(params.encoding_weights.size());
  const int n_params = n_rot + n_w;
  const int b_count = static_cast<int>(batch.size());

  struct PerSample {
    double loss = 0.0;
    std::vector<double> d_params;
    std::array<double, 2> d_features{0.0, 0.0};
  };
  std::vector<PerSample> results(batch.size());

  parallel_for(b_count, n_threads, [&](int i) {
    const BatchSample& sample = batch[i];
    PerSample& out = results[i];
    out.d_params.assign(n_params, 0.0);
    const SitedCircuit circuit = compile_sited(variant, params, sample.x);
    const int s = sample.message;
    // Sites first: the sink needs 1/p_s from the forward pass, so collect
    // raw dp_s/dangle per target and scale afterwards.
    std::vector<std::pair<int, double>> contributions;
    contributions.reserve(circuit.sites.size() * 2);
    const Probs forward = evaluate_sites(
        circuit, mode, static_cast<std::uint64_t>(i) + 1,
        [&](const Site& site, const Probs& d) {
          for (int t = 0; t < site.n_targets; ++t) {
            contributions.emplace_back(site.targets[t].column,
                                       site.targets[t].coeff * d[s]);
          }
        });
    const double p_clamped = std::max(forward[s], kLogClipFloor);
    out.loss = -std::log(p_clamped);
    const double scale = -1.0 / p_clamped;
    for (const auto& [column, value] : contributions) {
      if (column < n_params) {
        out.d_params[column] += scale * value;
      } else {
        out.d_features[column - n_params] += scale * value;
      }
    }
  });

  BatchGradient grad;
  grad.grads.d_rotations.assign(n_rot, 0.0);
  grad.grads.d_weights.assign(n_w, 0.0);
  grad.sample_d_features.resize(batch.size());
  const double inv_b = 1.0 / static_cast<double>(b_count);
  for (int i = 0; i < b_count; ++i) {
    const PerSample& r = results[i];
    grad.loss += inv_b * r.loss;
    for (int k = 0; k < n_rot; ++k) {
      grad.grads.d_rotations[k] += inv_b * r.d_params[k];
    }
    for (int k = 0; k < n_w; ++k) {
      grad.grads.d_weights[k] += inv_b * r.d_params[n_rot + k];
    }
    grad.sample_d_features[i] = r.d_features;
    grad.grads.d_features[0] += inv_b * r.d_features[0];
    grad.grads.d_features[1] += inv_b * r.d_features[1];
  }
  return grad;
}

double finite_difference_check(AnsatzVariant variant, const ParamSet& params,
                               const FeatureVector& x, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  params.validate(variant);
  const ProbJacobian jac = prob_jacobian(variant, params, x);
  const int n_rot = params.layers * 12;
  const int n_params = param_count(variant, params.layers);

  const auto probs_at = [&](const ParamSet& p, const FeatureVector& xx) {
    StateVector state(kDecoderQubits);
    apply_circuit(state, build_circuit(variant, p, xx));
    return probabilities(state);
  };

  double max_dev = 0.0;
  for (int k = 0; k < n_params + 2; ++k) {
    ParamSet plus = params, minus = params;
    FeatureVector xp = x, xm = x;
    if (k < n_rot) {
      plus.rotations[k] += epsilon;
      minus.rotations[k] -= epsilon;
    } else if (k < n_params) {
      plus.encoding_weights[k - n_rot] += epsilon;
      minus.encoding_weights[k - n_rot] -= epsilon;
    } else if (k == n_params) {
      xp.x0 += epsilon;
      xm.x0 -= epsilon;
    } else {
      xp.x1 += epsilon;
      xm.x1 -= epsilon;
    }
    const auto hi = probs_at(plus, xp);
    const auto lo = probs_at(minus, xm);
    for (int b = 0; b < kDim; ++b) {
      const double fd = (hi[b] - lo[b]) / (2.0 * epsilon);
      max_dev = std::max(max_dev, std::abs(jac.at(b, k) - fd));
    }
  }
  return max_dev;
}

}  // namespace qcae
