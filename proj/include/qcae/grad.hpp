#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qcae/ansatz.hpp"

namespace qcae {

// How basis-state probabilities are read out: exactly from the statevector,
// or as empirical frequencies over a finite number of shots. In Shots mode
// every circuit evaluation consumes its own substream of `seed` (see
// grad.cpp for the fixed schedule), so results are reproducible.
struct EvalMode {
  enum class Kind { Analytic, Shots };
  Kind kind = Kind::Analytic;
  long shots = 0;
  std::uint64_t seed = 0;

  static EvalMode analytic() { return {}; }
  static EvalMode sampled(long shots, std::uint64_t seed);
  bool is_analytic() const { return kind == Kind::Analytic; }
};

// Probabilities are clamped to this floor inside logs; the gradient uses the
// clamped value.
inline constexpr double kLogClipFloor = 1e-12;

// Partial derivatives of a scalar with respect to every trainable decoder
// parameter and the two input features. Shapes mirror ParamSet.
struct GradientRecord {
  std::vector<double> d_rotations;
  std::vector<double> d_weights;
  std::array<double, 2> d_features{0.0, 0.0};
};

// Row-major 16 x (P + 2) matrix of dp_b/dtheta_k. Column order: rotations
// flattened as (layer, qubit, axis), then encoding weights as (layer, qubit)
// when the variant has them, then the two features.
struct ProbJacobian {
  int rows = kMessageCount;
  int cols = 0;
  std::vector<double> values;
  double at(int b, int k) const { return values[static_cast<std::size_t>(b) * cols + k]; }
};

// Exact two-point parameter-shift derivatives (shift pi/2; every
// parameterized gate is a Pauli rotation). Weight and feature columns follow
// by the chain rule through the encoding angles.
ProbJacobian prob_jacobian(AnsatzVariant variant, const ParamSet& params,
                           const FeatureVector& x,
                           const EvalMode& mode = EvalMode::analytic());

struct BatchSample {
  int message = 0;
  FeatureVector x;
};

struct BatchGradient {
  double loss = 0.0;          // -(1/B) sum log p_{s_i}(x_i), clipped
  GradientRecord grads;       // d(mean loss)/d params; d_features is the
                              // mean of the per-sample feature gradients
  std::vector<std::array<double, 2>> sample_d_features;  // d loss_i / d x_i
};

// Batch loss and gradient. The reduction over samples runs in ascending
// sample order regardless of n_threads, so results are bitwise reproducible.
BatchGradient loss_gradient(std::span<const BatchSample> batch,
                            AnsatzVariant variant, const ParamSet& params,
                            const EvalMode& mode = EvalMode::analytic(),
                            int n_threads = 1);

// Max-abs deviation between the parameter-shift Jacobian and central finite
// differences over all parameters and features. Analytic mode only.
double finite_difference_check(AnsatzVariant variant, const ParamSet& params,
                               const FeatureVector& x, double epsilon = 1e-6);

}  // namespace qcae
