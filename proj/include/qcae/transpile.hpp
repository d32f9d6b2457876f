#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcae/ansatz.hpp"
#include "qcae/sim.hpp"

namespace qcae {

// Per-kind gate durations in nanoseconds. RZ is a virtual frame rotation and
// costs nothing; the CX value is a single per-device scalar.
struct GateDurations {
  double rz_ns = 0.0;
  double sx_ns = 35.0;
  double x_ns = 70.0;
  double cx_ns = 480.0;
  double measure_ns = 5000.0;
  double reset_ns = 1000.0;

  // Duration of one basis gate; throws for kinds outside {RZ, SX, X, CNOT}.
  double lookup(GateKind kind) const;
};

// A 5-qubit target: undirected coupling edges, basis gates {RZ, SX, X, CX}
// and calibration durations.
struct DeviceModel {
  std::string name;
  int n_qubits = 5;
  std::vector<std::pair<int, int>> edges;
  GateDurations durations;

  // T-shaped coupling {(0,1),(1,2),(1,3),(3,4)}, CX 480 ns.
  static DeviceModel t_shaped_5q();
  // Linear chain {(0,1),(1,2),(2,3),(3,4)}, CX 330 ns.
  static DeviceModel linear_5q();

  static DeviceModel from_json(const std::string& text);
  static DeviceModel load(const std::filesystem::path& path);
  std::string to_json() const;

  bool adjacent(int a, int b) const;
  // Throws on out-of-range edges, negative durations or a disconnected
  // coupling graph.
  void validate() const;
};

// Rewrites a circuit into {RZ, SX, X, CX}: maximal runs of single-qubit
// gates are fused into one 2x2 unitary and emitted as at most
// RZ-SX-RZ-SX-RZ (identity-angle RZs dropped); SWAP becomes 3 CX. The result
// equals the input up to global phase.
Circuit decompose_to_basis(const Circuit& circuit);

struct TranspiledCircuit {
  Circuit gates;                    // basis gates over physical qubits
  std::vector<int> initial_layout;  // logical -> physical
  std::vector<int> final_layout;    // logical -> physical after routing
  int depth = 0;
  double critical_path_ns = 0.0;    // gates only, no measurement/reset
};

// Greedy routing: when a CX's operands are not adjacent, SWAPs (3 CX each)
// are inserted along a shortest coupling path, permuting the layout as they
// go. An empty initial_layout means identity.
TranspiledCircuit route(const Circuit& circuit, const DeviceModel& device,
                        std::span<const int> initial_layout = {});

// Longest chain in the gate dependency DAG; every gate (RZ included)
// counts 1.
int circuit_depth(const Circuit& circuit);

struct TimeEstimateOptions {
  bool include_measurement = true;
  bool include_reset = true;
};

// Critical-path duration through the dependency DAG plus measurement and
// reset overhead, in microseconds per shot.
double estimate_shot_time_us(const TranspiledCircuit& transpiled,
                             const DeviceModel& device,
                             TimeEstimateOptions options = {});

struct ReportRow {
  std::string device;
  int layers = 0;
  int depth = 0;
  double time_us = 0.0;
};

// decompose -> route -> depth/time for every (device, layer count), in
// device-major order. Rotation angles are drawn per layer count from `seed`
// so both devices see the same circuit.
std::vector<ReportRow> transpile_report(AnsatzVariant variant,
                                        std::span<const int> layer_set,
                                        std::span<const DeviceModel> devices,
                                        std::uint64_t seed,
                                        TimeEstimateOptions options = {});

}  // namespace qcae
