#include "qcae/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcae {

namespace {

constexpr cxd kI{0.0, 1.0};

void check_targets(const GateOp& gate, int n_qubits) {
  const int nt = gate.target_count();
  for (int i = 0; i < nt; ++i) {
    if (gate.targets[i] < 0 || gate.targets[i] >= n_qubits) {
      throw std::out_of_range("gate target " + std::to_string(gate.targets[i]) +
                              " out of range for " + std::to_string(n_qubits) +
                              " qubits");
    }
  }
  if (nt == 2 && gate.targets[0] == gate.targets[1]) {
    throw std::invalid_argument("two-qubit gate targets must be distinct");
  }
}

}  // namespace

std::string_view gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Rot: return "rot";
    case GateKind::CNOT: return "cnot";
    case GateKind::SWAP: return "swap";
    case GateKind::SX: return "sx";
    case GateKind::X: return "x";
  }
  throw std::invalid_argument("unknown gate kind");
}

GateKind gate_kind_from_name(std::string_view name) {
  if (name == "rx") return GateKind::RX;
  if (name == "ry") return GateKind::RY;
  if (name == "rz") return GateKind::RZ;
  if (name == "rot") return GateKind::Rot;
  if (name == "cnot" || name == "cx") return GateKind::CNOT;
  if (name == "swap") return GateKind::SWAP;
  if (name == "sx") return GateKind::SX;
  if (name == "x") return GateKind::X;
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

int gate_target_count(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::SWAP:
      return 2;
    default:
      return 1;
  }
}

int gate_angle_count(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      return 1;
    case GateKind::Rot:
      return 3;
    default:
      return 0;
  }
}

GateOp GateOp::rx(int qubit, double theta) {
  return GateOp{GateKind::RX, {qubit, 0}, {theta, 0.0, 0.0}};
}
GateOp GateOp::ry(int qubit, double theta) {
  return GateOp{GateKind::RY, {qubit, 0}, {theta, 0.0, 0.0}};
}
GateOp GateOp::rz(int qubit, double theta) {
  return GateOp{GateKind::RZ, {qubit, 0}, {theta, 0.0, 0.0}};
}
GateOp GateOp::rot(int qubit, double phi, double theta, double omega) {
  return GateOp{GateKind::Rot, {qubit, 0}, {phi, theta, omega}};
}
GateOp GateOp::cnot(int control, int target) {
  return GateOp{GateKind::CNOT, {control, target}, {}};
}
GateOp GateOp::swap(int a, int b) {
  return GateOp{GateKind::SWAP, {a, b}, {}};
}
GateOp GateOp::sx(int qubit) { return GateOp{GateKind::SX, {qubit, 0}, {}}; }
GateOp GateOp::x(int qubit) { return GateOp{GateKind::X, {qubit, 0}, {}}; }

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 12) {
    throw std::out_of_range("n_qubits must be in [1, 12], got " +
                            std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, cxd{0.0, 0.0});
  amps_[0] = cxd{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(int n_qubits,
                                         std::vector<cxd> amplitudes) {
  StateVector state(n_qubits);
  if (amplitudes.size() != state.dim()) {
    throw std::invalid_argument("amplitude vector length does not match 2^n");
  }
  state.amps_ = std::move(amplitudes);
  if (std::abs(state.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("amplitudes are not normalized");
  }
  return state;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector init_state(int n_qubits) { return StateVector(n_qubits); }

std::array<cxd, 4> gate_matrix_1q(GateKind kind, const double* angles) {
  switch (kind) {
    case GateKind::RX: {
      const double c = std::cos(angles[0] / 2.0), s = std::sin(angles[0] / 2.0);
      return {cxd{c, 0.0}, cxd{0.0, -s}, cxd{0.0, -s}, cxd{c, 0.0}};
    }
    case GateKind::RY: {
      const double c = std::cos(angles[0] / 2.0), s = std::sin(angles[0] / 2.0);
      return {cxd{c, 0.0}, cxd{-s, 0.0}, cxd{s, 0.0}, cxd{c, 0.0}};
    }
    case GateKind::RZ: {
      const cxd e = std::exp(-kI * (angles[0] / 2.0));
      return {e, cxd{0.0, 0.0}, cxd{0.0, 0.0}, std::conj(e)};
    }
    case GateKind::Rot: {
      // RZ(omega) * RY(theta) * RZ(phi)
      const double phi = angles[0], theta = angles[1], omega = angles[2];
      const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
      return {std::exp(-kI * ((phi + omega) / 2.0)) * c,
              -std::exp(kI * ((phi - omega) / 2.0)) * s,
              std::exp(-kI * ((phi - omega) / 2.0)) * s,
              std::exp(kI * ((phi + omega) / 2.0)) * c};
    }
    case GateKind::SX:
      return {cxd{0.5, 0.5}, cxd{0.5, -0.5}, cxd{0.5, -0.5}, cxd{0.5, 0.5}};
    case GateKind::X:
      return {cxd{0.0, 0.0}, cxd{1.0, 0.0}, cxd{1.0, 0.0}, cxd{0.0, 0.0}};
    default:
      throw std::invalid_argument("gate_matrix_1q: not a single-qubit gate");
  }
}

namespace {

void apply_matrix_1q(std::vector<cxd>& amps, int qubit,
                     const std::array<cxd, 4>& m) {
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cxd a0 = amps[i];
      const cxd a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_cnot(std::vector<cxd>& amps, int control, int target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
  }
}

void apply_swap(std::vector<cxd>& amps, int a, int b) {
  const std::size_t abit = std::size_t{1} << a;
  const std::size_t bbit = std::size_t{1} << b;
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & abit) && !(i & bbit)) std::swap(amps[i], amps[(i ^ abit) | bbit]);
  }
}

}  // namespace

void apply_gate(StateVector& state, const GateOp& gate) {
  check_targets(gate, state.n_qubits());
  switch (gate.kind) {
    case GateKind::CNOT:
      apply_cnot(state.amps_, gate.targets[0], gate.targets[1]);
      return;
    case GateKind::SWAP:
      apply_swap(state.amps_, gate.targets[0], gate.targets[1]);
      return;
    default:
      apply_matrix_1q(state.amps_, gate.targets[0],
                      gate_matrix_1q(gate.kind, gate.angles.data()));
  }
}

void apply_circuit(StateVector& state, const Circuit& circuit) {
  for (const auto& gate : circuit) apply_gate(state, gate);
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> probs(state.dim());
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(amps[i]);
  return probs;
}

std::vector<double> sample_counts(const std::vector<double>& probs, long shots,
                                  Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  std::vector<long> counts(probs.size(), 0);
  for (long s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                              probs.size() - 1);
    ++counts[idx];
  }
  std::vector<double> freqs(probs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    freqs[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return freqs;
}

}  // namespace qcae
