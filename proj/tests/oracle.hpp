// Dense-matrix reference implementation used only by tests. Unitaries are
// assembled entry-by-entry from gate semantics on the full 2^n-dimensional
// space and composed with Eigen matrix products, independent of the
// simulator's in-place pair iteration.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qcae/rng.hpp"
#include "qcae/sim.hpp"

namespace qcae::testing {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline Eigen::Matrix2cd oracle_matrix_1q(const GateOp& g) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  const double half = g.angles[0] / 2.0;
  switch (g.kind) {
    case GateKind::RX:
      m << std::cos(half), -1i * std::sin(half), -1i * std::sin(half),
          std::cos(half);
      break;
    case GateKind::RY:
      m << std::cos(half), -std::sin(half), std::sin(half), std::cos(half);
      break;
    case GateKind::RZ:
      m << std::exp(-1i * half), 0, 0, std::exp(1i * half);
      break;
    case GateKind::Rot: {
      // Compose RZ(omega) * RY(theta) * RZ(phi) as an explicit product.
      Eigen::Matrix2cd rz_phi, ry_theta, rz_omega;
      const double p = g.angles[0] / 2.0, t = g.angles[1] / 2.0,
                   w = g.angles[2] / 2.0;
      rz_phi << std::exp(-1i * p), 0, 0, std::exp(1i * p);
      ry_theta << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      rz_omega << std::exp(-1i * w), 0, 0, std::exp(1i * w);
      m = rz_omega * ry_theta * rz_phi;
      break;
    }
    case GateKind::SX:
      m << 0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i;
      break;
    case GateKind::X:
      m << 0, 1, 1, 0;
      break;
    default:
      throw std::invalid_argument("not a single-qubit gate");
  }
  return m;
}

// Full 2^n x 2^n unitary; qubit q owns bit 2^q of the basis index.
inline CMat oracle_gate_unitary(const GateOp& g, int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  CMat u = CMat::Zero(dim, dim);
  if (g.kind == GateKind::CNOT) {
    const Eigen::Index cbit = Eigen::Index{1} << g.targets[0];
    const Eigen::Index tbit = Eigen::Index{1} << g.targets[1];
    for (Eigen::Index col = 0; col < dim; ++col) {
      u((col & cbit) ? (col ^ tbit) : col, col) = 1.0;
    }
    return u;
  }
  if (g.kind == GateKind::SWAP) {
    const Eigen::Index abit = Eigen::Index{1} << g.targets[0];
    const Eigen::Index bbit = Eigen::Index{1} << g.targets[1];
    for (Eigen::Index col = 0; col < dim; ++col) {
      Eigen::Index row = col;
      const bool a = col & abit, b = col & bbit;
      if (a != b) row = col ^ abit ^ bbit;
      u(row, col) = 1.0;
    }
    return u;
  }
  const Eigen::Matrix2cd m = oracle_matrix_1q(g);
  const Eigen::Index qbit = Eigen::Index{1} << g.targets[0];
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int in_bit = (col & qbit) ? 1 : 0;
    u(col & ~qbit, col) += m(0, in_bit);
    u(col | qbit, col) += m(1, in_bit);
  }
  return u;
}

inline CMat oracle_circuit_unitary(const Circuit& circuit, int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  CMat u = CMat::Identity(dim, dim);
  for (const auto& g : circuit) u = oracle_gate_unitary(g, n_qubits) * u;
  return u;
}

inline CVec oracle_apply(const Circuit& circuit, const CVec& input) {
  const int n_qubits = static_cast<int>(std::log2(input.size()) + 0.5);
  return oracle_circuit_unitary(circuit, n_qubits) * input;
}

inline CVec to_eigen(const StateVector& state) {
  CVec v(static_cast<Eigen::Index>(state.dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = state.amplitudes()[i];
  return v;
}

inline GateOp random_gate(Rng& rng, int n_qubits) {
  constexpr GateKind kinds[] = {GateKind::RX,   GateKind::RY, GateKind::RZ,
                                GateKind::Rot,  GateKind::CNOT,
                                GateKind::SWAP, GateKind::SX, GateKind::X};
  const GateKind kind = kinds[rng.uniform_int(8)];
  const int q0 = rng.uniform_int(n_qubits);
  GateOp g;
  g.kind = kind;
  g.targets[0] = q0;
  if (gate_target_count(kind) == 2) {
    int q1 = rng.uniform_int(n_qubits - 1);
    if (q1 >= q0) ++q1;
    g.targets[1] = q1;
  }
  for (int a = 0; a < gate_angle_count(kind); ++a) {
    g.angles[a] = rng.uniform_angle();
  }
  return g;
}

inline Circuit random_circuit(Rng& rng, int n_qubits, int n_gates) {
  Circuit circuit;
  circuit.reserve(n_gates);
  for (int i = 0; i < n_gates; ++i) circuit.push_back(random_gate(rng, n_qubits));
  return circuit;
}

// A normalized random state prepared via a short random circuit.
inline StateVector random_state(Rng& rng, int n_qubits) {
  StateVector state(n_qubits);
  apply_circuit(state, random_circuit(rng, n_qubits, 3 * n_qubits + 4));
  return state;
}

}  // namespace qcae::testing
