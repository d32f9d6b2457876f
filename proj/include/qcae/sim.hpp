#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include "qcae/rng.hpp"

namespace qcae {

using cxd = std::complex<double>;

// Gate inventory. Rot is the general single-qubit rotation
// Rot(phi, theta, omega) = RZ(omega) * RY(theta) * RZ(phi), RZ(phi) applied
// first. CNOT is (control, target).
enum class GateKind { RX, RY, RZ, Rot, CNOT, SWAP, SX, X };

std::string_view gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);
int gate_target_count(GateKind kind);
int gate_angle_count(GateKind kind);

struct GateOp {
  GateKind kind{GateKind::X};
  std::array<int, 2> targets{0, 0};
  std::array<double, 3> angles{0.0, 0.0, 0.0};

  static GateOp rx(int qubit, double theta);
  static GateOp ry(int qubit, double theta);
  static GateOp rz(int qubit, double theta);
  static GateOp rot(int qubit, double phi, double theta, double omega);
  static GateOp cnot(int control, int target);
  static GateOp swap(int a, int b);
  static GateOp sx(int qubit);
  static GateOp x(int qubit);

  int target_count() const { return gate_target_count(kind); }
  int angle_count() const { return gate_angle_count(kind); }
  bool operator==(const GateOp&) const = default;
};

using Circuit = std::vector<GateOp>;

// Dense statevector over n qubits, basis index convention: qubit i
// contributes bit value 2^i (qubit 0 is the least significant bit).
class StateVector {
 public:
  // Prepares |0...0>. n_qubits outside [1, 12] is rejected.
  explicit StateVector(int n_qubits);

  // Adopts custom amplitudes; the vector length must be a power of two
  // matching n_qubits and the norm must be 1 within 1e-9.
  static StateVector from_amplitudes(int n_qubits, std::vector<cxd> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cxd>& amplitudes() const { return amps_; }
  double norm() const;

 private:
  friend void apply_gate(StateVector&, const GateOp&);
  int n_qubits_;
  std::vector<cxd> amps_;
};

StateVector init_state(int n_qubits);

// Multiplies the state by the gate unitary in place. Invalid or duplicate
// target indices are rejected.
void apply_gate(StateVector& state, const GateOp& gate);

// Applies gates left to right.
void apply_circuit(StateVector& state, const Circuit& circuit);

// p_b = |amplitude_b|^2.
std::vector<double> probabilities(const StateVector& state);

// Draws `shots` i.i.d. basis outcomes by inverse-CDF sampling and returns
// empirical frequencies. Deterministic given the generator state.
std::vector<double> sample_counts(const std::vector<double>& probs, long shots,
                                  Rng& rng);

// 2x2 unitary for single-qubit kinds, row-major {m00, m01, m10, m11}.
std::array<cxd, 4> gate_matrix_1q(GateKind kind, const double* angles);

}  // namespace qcae
