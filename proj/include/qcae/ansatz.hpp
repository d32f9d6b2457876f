#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcae/rng.hpp"
#include "qcae/sim.hpp"

namespace qcae {

inline constexpr int kDecoderQubits = 4;
inline constexpr int kMessageCount = 16;

// The four decoder circuit families. Plain encodes the input once; the data
// re-uploading variants repeat the encoding block before every entangling
// layer, on two qubits (SingleDR) or all four (DoubleDR); WeightedDoubleDR
// additionally scales each encoding angle by a trainable weight.
enum class AnsatzVariant { Plain, SingleDR, DoubleDR, WeightedDoubleDR };

std::string_view variant_name(AnsatzVariant variant);
AnsatzVariant variant_from_name(std::string_view name);
bool variant_has_weights(AnsatzVariant variant);

// Received I/Q signal components fed to the decoder as rotation angles.
struct FeatureVector {
  double x0 = 0.0;
  double x1 = 0.0;
  double operator[](int j) const { return j == 0 ? x0 : x1; }
  bool operator==(const FeatureVector&) const = default;
};

// Trainable decoder parameters: one (phi, theta, omega) rotation triple per
// qubit per layer, plus one encoding weight per qubit per layer for the
// weighted variant. layers == 0 denotes an empty (zero-depth) circuit.
struct ParamSet {
  int layers = 0;
  std::vector<double> rotations;         // layers*4*3, index (l*4+q)*3 + axis
  std::vector<double> encoding_weights;  // layers*4 when present, else empty

  bool has_weights() const { return !encoding_weights.empty(); }
  double rot(int l, int q, int a) const { return rotations[(l * 4 + q) * 3 + a]; }
  double& rot(int l, int q, int a) { return rotations[(l * 4 + q) * 3 + a]; }
  double weight(int l, int q) const { return encoding_weights[l * 4 + q]; }
  double& weight(int l, int q) { return encoding_weights[l * 4 + q]; }

  // Throws if the stored shapes do not match the variant/layer count.
  void validate(AnsatzVariant variant) const;
};

// Role annotation for one gate of a built circuit, used to map angles back to
// trainable parameters when differentiating.
struct GateRole {
  enum class Kind { Encoding, Rotation, Entangler };
  Kind kind = Kind::Entangler;
  int layer = 0;
  int qubit = 0;
  int feature = 0;  // Encoding only: which input feature the angle carries
};

struct AnnotatedCircuit {
  Circuit gates;
  std::vector<GateRole> roles;
};

// One input-encoding block. Plain/SingleDR put RX(x0), RX(x1) on qubits 0, 1;
// DoubleDR repeats the features on qubits 2, 3; WeightedDoubleDR scales the
// four angles by layer_weights (exactly 4 values, required for that variant
// only).
Circuit encoding_block(AnsatzVariant variant, const FeatureVector& x,
                       std::span<const double> layer_weights = {});

// Rot on each qubit followed by the CNOT ring 0->1, 1->2, 2->3, 3->0.
// rotations must hold 4x3 angles, row-major per qubit.
Circuit entangling_layer(std::span<const double> rotations);

Circuit build_circuit(AnsatzVariant variant, const ParamSet& params,
                      const FeatureVector& x);
AnnotatedCircuit build_annotated_circuit(AnsatzVariant variant,
                                         const ParamSet& params,
                                         const FeatureVector& x);

// Rotations ~ Uniform[0, 2pi); encoding weights start at 1 so the weighted
// variant initially coincides with DoubleDR. Requires layers >= 1.
ParamSet init_params(AnsatzVariant variant, int layers, Rng& rng);

// 12L for the unweighted variants, 16L for WeightedDoubleDR.
int param_count(AnsatzVariant variant, int layers);

// JSON gate-list format: {"n_qubits": n, "gates": [{"kind": "...",
// "targets": [...], "angles": [...]}, ...]}.
std::string circuit_to_json(const Circuit& circuit,
                            int n_qubits = kDecoderQubits);
Circuit circuit_from_json(const std::string& text);

}  // namespace qcae
