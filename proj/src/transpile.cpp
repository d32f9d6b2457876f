#include "qcae/transpile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qcae {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kTagReport = 0x3E9027;

using Mat2 = std::array<cxd, 4>;

constexpr Mat2 kIdentity2 = {cxd{1.0, 0.0}, cxd{0.0, 0.0}, cxd{0.0, 0.0},
                             cxd{1.0, 0.0}};

Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a == -kPi ? kPi : a;
}

// ZYZ Euler angles of U up to global phase: U ~ RZ(phi) RY(theta) RZ(lambda)
// with RZ(lambda) applied first.
struct EulerZYZ {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

EulerZYZ euler_zyz(const Mat2& u) {
  // Normalize to SU(2) so the matrix entries take the canonical form.
  const cxd det = u[0] * u[3] - u[1] * u[2];
  const cxd root = std::sqrt(det);
  Mat2 v = u;
  for (auto& e : v) e /= root;

  EulerZYZ angles;
  const double c = std::abs(v[0]);
  const double s = std::abs(v[2]);
  angles.theta = 2.0 * std::atan2(s, c);
  constexpr double kTol = 1e-12;
  if (s < kTol) {
    angles.lambda = 0.0;
    angles.phi = 2.0 * std::arg(v[3]);
  } else if (c < kTol) {
    angles.lambda = 0.0;
    angles.phi = 2.0 * std::arg(v[2]);
  } else {
    angles.phi = std::arg(v[3]) + std::arg(v[2]);
    angles.lambda = std::arg(v[3]) - std::arg(v[2]);
  }
  return angles;
}

void push_rz(Circuit& out, int qubit, double angle) {
  angle = wrap_angle(angle);
  if (std::abs(angle) < 1e-12) return;
  out.push_back(GateOp::rz(qubit, angle));
}

// Emits U on `qubit` as at most RZ-SX-RZ-SX-RZ. Uses the identities
// U ~ RZ(phi+pi) SX RZ(theta+pi) SX RZ(lambda) and, when theta = pi/2,
// U ~ RZ(phi+pi/2) SX RZ(lambda-pi/2).
void emit_basis_1q(Circuit& out, int qubit, const Mat2& u) {
  const EulerZYZ e = euler_zyz(u);
  constexpr double kTol = 1e-9;
  if (std::abs(e.theta) < kTol) {
    push_rz(out, qubit, e.phi + e.lambda);
    return;
  }
  if (std::abs(e.theta - kPi / 2.0) < kTol) {
    push_rz(out, qubit, e.lambda - kPi / 2.0);
    out.push_back(GateOp::sx(qubit));
    push_rz(out, qubit, e.phi + kPi / 2.0);
    return;
  }
  push_rz(out, qubit, e.lambda);
  out.push_back(GateOp::sx(qubit));
  push_rz(out, qubit, e.theta + kPi);
  out.push_back(GateOp::sx(qubit));
  push_rz(out, qubit, e.phi + kPi);
}

int circuit_qubit_count(const Circuit& circuit) {
  int n = 0;
  for (const auto& gate : circuit) {
    for (int t = 0; t < gate.target_count(); ++t) {
      n = std::max(n, gate.targets[t] + 1);
    }
  }
  return n;
}

}  // namespace

Circuit decompose_to_basis(const Circuit& circuit) {
  const int n = circuit_qubit_count(circuit);
  std::vector<Mat2> pending(n, kIdentity2);
  std::vector<bool> dirty(n, false);
  Circuit out;

  const auto flush = [&](int q) {
    if (!dirty[q]) return;
    emit_basis_1q(out, q, pending[q]);
    pending[q] = kIdentity2;
    dirty[q] = false;
  };

  for (const auto& gate : circuit) {
    switch (gate.kind) {
      case GateKind::CNOT:
        flush(gate.targets[0]);
        flush(gate.targets[1]);
        out.push_back(gate);
        break;
      case GateKind::SWAP:
        flush(gate.targets[0]);
        flush(gate.targets[1]);
        out.push_back(GateOp::cnot(gate.targets[0], gate.targets[1]));
        out.push_back(GateOp::cnot(gate.targets[1], gate.targets[0]));
        out.push_back(GateOp::cnot(gate.targets[0], gate.targets[1]));
        break;
      default: {
        const int q = gate.targets[0];
        pending[q] =
            matmul(gate_matrix_1q(gate.kind, gate.angles.data()), pending[q]);
        dirty[q] = true;
      }
    }
  }
  for (int q = 0; q < n; ++q) flush(q);
  return out;
}

double GateDurations::lookup(GateKind kind) const {
  switch (kind) {
    case GateKind::RZ: return rz_ns;
    case GateKind::SX: return sx_ns;
    case GateKind::X: return x_ns;
    case GateKind::CNOT: return cx_ns;
    default:
      throw std::invalid_argument("no duration entry for gate kind '" +
                                  std::string(gate_kind_name(kind)) + "'");
  }
}

DeviceModel DeviceModel::t_shaped_5q() {
  DeviceModel d;
  d.name = "belem-analog";
  d.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 4}};
  d.durations.cx_ns = 480.0;
  return d;
}

DeviceModel DeviceModel::linear_5q() {
  DeviceModel d;
  d.name = "santiago-analog";
  d.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  d.durations.cx_ns = 330.0;
  return d;
}

DeviceModel DeviceModel::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  DeviceModel d;
  d.name = doc.at("name").get<std::string>();
  d.n_qubits = doc.at("n_qubits").get<int>();
  for (const auto& e : doc.at("edges")) {
    d.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  const auto& dur = doc.at("durations_ns");
  d.durations.rz_ns = dur.at("rz").get<double>();
  d.durations.sx_ns = dur.at("sx").get<double>();
  d.durations.x_ns = dur.at("x").get<double>();
  d.durations.cx_ns = dur.at("cx").get<double>();
  d.durations.measure_ns = dur.at("measure").get<double>();
  d.durations.reset_ns = dur.at("reset").get<double>();
  d.validate();
  return d;
}

DeviceModel DeviceModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open device file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string DeviceModel::to_json() const {
  nlohmann::json doc;
  doc["name"] = name;
  doc["n_qubits"] = n_qubits;
  auto edges_json = nlohmann::json::array();
  for (const auto& [a, b] : edges) edges_json.push_back({a, b});
  doc["edges"] = std::move(edges_json);
  doc["durations_ns"] = {{"rz", durations.rz_ns},     {"sx", durations.sx_ns},
                         {"x", durations.x_ns},       {"cx", durations.cx_ns},
                         {"measure", durations.measure_ns},
                         {"reset", durations.reset_ns}};
  return doc.dump(2);
}

bool DeviceModel::adjacent(int a, int b) const {
  for (const auto& [u, v] : edges) {
    if ((u == a && v == b) || (u == b && v == a)) return true;
  }
  return false;
}

void DeviceModel::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("device needs >= 1 qubit");
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits || a == b) {
      throw std::invalid_argument("bad coupling edge in device model");
    }
  }
  for (const double v :
       {durations.rz_ns, durations.sx_ns, durations.x_ns, durations.cx_ns,
        durations.measure_ns, durations.reset_ns}) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw std::invalid_argument("gate durations must be non-negative");
    }
  }
  // Connectivity check.
  std::vector<char> seen(n_qubits, 0);
  std::deque<int> frontier{0};
  seen[0] = 1;
  while (!frontier.empty()) {
    const int q = frontier.front();
    frontier.pop_front();
    for (const auto& [a, b] : edges) {
      const int other = a == q ? b : (b == q ? a : -1);
      if (other >= 0 && !seen[other]) {
        seen[other] = 1;
        frontier.push_back(other);
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) {
    throw std::invalid_argument("device coupling graph is disconnected");
  }
}

namespace {

// Deterministic BFS shortest path (sorted adjacency, first parent wins).
std::vector<int> bfs_path(const DeviceModel& device, int from, int to) {
  std::vector<std::vector<int>> adj(device.n_qubits);
  for (const auto& [a, b] : device.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  std::vector<int> parent(device.n_qubits, -1);
  std::deque<int> frontier{from};
  parent[from] = from;
  while (!frontier.empty()) {
    const int q = frontier.front();
    frontier.pop_front();
    if (q == to) break;
    for (const int nb : adj[q]) {
      if (parent[nb] < 0) {
        parent[nb] = q;
        frontier.push_back(nb);
      }
    }
  }
  if (parent[to] < 0) {
    throw std::invalid_argument("no coupling path between qubits");
  }
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

double critical_path_ns(const Circuit& gates, const DeviceModel& device) {
  std::vector<double> finish(device.n_qubits, 0.0);
  for (const auto& gate : gates) {
    const double dur = device.durations.lookup(gate.kind);
    if (gate.target_count() == 2) {
      const double start = std::max(finish[gate.targets[0]],
                                    finish[gate.targets[1]]);
      finish[gate.targets[0]] = start + dur;
      finish[gate.targets[1]] = start + dur;
    } else {
      finish[gate.targets[0]] += dur;
    }
  }
  return *std::max_element(finish.begin(), finish.end());
}

}  // namespace

TranspiledCircuit route(const Circuit& circuit, const DeviceModel& device,
                        std::span<const int> initial_layout) {
  device.validate();
  const int n_logical = circuit_qubit_count(circuit);
  if (n_logical > device.n_qubits) {
    throw std::invalid_argument("circuit uses more qubits than the device");
  }

  TranspiledCircuit out;
  std::vector<int> phys_of(device.n_qubits);
  if (initial_layout.empty()) {
    for (int q = 0; q < device.n_qubits; ++q) phys_of[q] = q;
  } else {
    if (static_cast<int>(initial_layout.size()) != device.n_qubits) {
      throw std::invalid_argument(
          "initial layout must cover every device qubit");
    }
    phys_of.assign(initial_layout.begin(), initial_layout.end());
    std::vector<char> used(device.n_qubits, 0);
    for (const int p : phys_of) {
      if (p < 0 || p >= device.n_qubits || used[p]) {
        throw std::invalid_argument("initial layout is not a permutation");
      }
      used[p] = 1;
    }
  }
  out.initial_layout = phys_of;

  std::vector<int> logical_at(device.n_qubits);
  for (int q = 0; q < device.n_qubits; ++q) logical_at[phys_of[q]] = q;

  const auto swap_physical = [&](int p, int q) {
    out.gates.push_back(GateOp::cnot(p, q));
    out.gates.push_back(GateOp::cnot(q, p));
    out.gates.push_back(GateOp::cnot(p, q));
    std::swap(logical_at[p], logical_at[q]);
    phys_of[logical_at[p]] = p;
    phys_of[logical_at[q]] = q;
  };

  const auto route_cnot = [&](int control, int target) {
    int pc = phys_of[control];
    const int pt = phys_of[target];
    if (!device.adjacent(pc, pt)) {
      const auto path = bfs_path(device, pc, pt);
      for (std::size_t k = 0; k + 2 < path.size(); ++k) {
        swap_physical(path[k], path[k + 1]);
      }
      pc = path[path.size() - 2];
    }
    out.gates.push_back(GateOp::cnot(pc, pt));
  };

  for (const auto& gate : circuit) {
    switch (gate.kind) {
      case GateKind::CNOT:
        route_cnot(gate.targets[0], gate.targets[1]);
        break;
      case GateKind::SWAP:
        route_cnot(gate.targets[0], gate.targets[1]);
        route_cnot(gate.targets[1], gate.targets[0]);
        route_cnot(gate.targets[0], gate.targets[1]);
        break;
      default: {
        GateOp mapped = gate;
        mapped.targets[0] = phys_of[gate.targets[0]];
        out.gates.push_back(mapped);
      }
    }
  }

  out.final_layout = phys_of;
  out.depth = circuit_depth(out.gates);
  out.critical_path_ns = critical_path_ns(out.gates, device);
  return out;
}

int circuit_depth(const Circuit& circuit) {
  const int n = circuit_qubit_count(circuit);
  std::vector<int> level(n, 0);
  int depth = 0;
  for (const auto& gate : circuit) {
    int start = 0;
    for (int t = 0; t < gate.target_count(); ++t) {
      start = std::max(start, level[gate.targets[t]]);
    }
    for (int t = 0; t < gate.target_count(); ++t) {
      level[gate.targets[t]] = start + 1;
    }
    depth = std::max(depth, start + 1);
  }
  return depth;
}

double estimate_shot_time_us(const TranspiledCircuit& transpiled,
                             const DeviceModel& device,
                             TimeEstimateOptions options) {
  double total_ns = critical_path_ns(transpiled.gates, device);
  if (options.include_measurement) total_ns += device.durations.measure_ns;
  if (options.include_reset) total_ns += device.durations.reset_ns;
  return total_ns / 1000.0;
}

std::vector<ReportRow> transpile_report(AnsatzVariant variant,
                                        std::span<const int> layer_set,
                                        std::span<const DeviceModel> devices,
                                        std::uint64_t seed,
                                        TimeEstimateOptions options) {
  // Generic nonzero features so no encoding gate degenerates to identity.
  const FeatureVector x{0.7853981633974483, -0.5235987755982988};
  std::vector<ReportRow> rows;
  rows.reserve(layer_set.size() * devices.size());
  for (const auto& device : devices) {
    for (const int layers : layer_set) {
      Rng rng(derive_seed(seed, kTagReport, layers));
      const ParamSet params = init_params(variant, layers, rng);
      const Circuit circuit = build_circuit(variant, params, x);
      const Circuit basis = decompose_to_basis(circuit);
      const TranspiledCircuit routed = route(basis, device);
      rows.push_back({device.name, layers, routed.depth,
                      estimate_shot_time_us(routed, device, options)});
    }
  }
  return rows;
}

}  // namespace qcae
