#include "qcae/ansatz.hpp"

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace qcae {

std::string_view variant_name(AnsatzVariant variant) {
  switch (variant) {
    case AnsatzVariant::Plain: return "plain";
    case AnsatzVariant::SingleDR: return "single_dr";
    case AnsatzVariant::DoubleDR: return "double_dr";
    case AnsatzVariant::WeightedDoubleDR: return "weighted_double_dr";
  }
  throw std::invalid_argument("unknown ansatz variant");
}

AnsatzVariant variant_from_name(std::string_view name) {
  if (name == "plain") return AnsatzVariant::Plain;
  if (name == "single_dr") return AnsatzVariant::SingleDR;
  if (name == "double_dr") return AnsatzVariant::DoubleDR;
  if (name == "weighted_double_dr") return AnsatzVariant::WeightedDoubleDR;
  throw std::invalid_argument("unknown ansatz variant '" + std::string(name) +
                              "'");
}

bool variant_has_weights(AnsatzVariant variant) {
  return variant == AnsatzVariant::WeightedDoubleDR;
}

void ParamSet::validate(AnsatzVariant variant) const {
  if (layers < 0) throw std::invalid_argument("negative layer count");
  if (rotations.size() != static_cast<std::size_t>(layers) * 12) {
    throw std::invalid_argument("rotations shape must be layers x 4 x 3");
  }
  if (variant_has_weights(variant)) {
    if (encoding_weights.size() != static_cast<std::size_t>(layers) * 4) {
      throw std::invalid_argument("encoding_weights shape must be layers x 4");
    }
  } else if (!encoding_weights.empty()) {
    throw std::invalid_argument(
        "encoding_weights present for an unweighted variant");
  }
}

namespace {

struct EncodingSpec {
  int qubit;
  int feature;
};

// DoubleDR layout: feature 0 on qubits 0 and 2, feature 1 on qubits 1 and 3.
constexpr EncodingSpec kDoubleLayout[4] = {{0, 0}, {1, 1}, {2, 0}, {3, 1}};
constexpr EncodingSpec kSingleLayout[2] = {{0, 0}, {1, 1}};

void append_encoding(AnnotatedCircuit& out, AnsatzVariant variant, int layer,
                     const FeatureVector& x,
                     std::span<const double> layer_weights) {
  const bool weighted = variant == AnsatzVariant::WeightedDoubleDR;
  if (weighted && layer_weights.size() != 4) {
    throw std::invalid_argument(
        "weighted encoding block requires exactly 4 weights");
  }
  if (!weighted && !layer_weights.empty()) {
    throw std::invalid_argument(
        "encoding weights supplied for an unweighted variant");
  }
  const bool doubled = variant == AnsatzVariant::DoubleDR || weighted;
  const std::span<const EncodingSpec> layout =
      doubled ? std::span<const EncodingSpec>(kDoubleLayout)
              : std::span<const EncodingSpec>(kSingleLayout);
  for (const auto& spec : layout) {
    const double w = weighted ? layer_weights[spec.qubit] : 1.0;
    out.gates.push_back(GateOp::rx(spec.qubit, w * x[spec.feature]));
    out.roles.push_back(
        {GateRole::Kind::Encoding, layer, spec.qubit, spec.feature});
  }
}

void append_entangling(AnnotatedCircuit& out, int layer,
                       std::span<const double> rotations) {
  if (rotations.size() != 12) {
    throw std::invalid_argument("entangling layer requires 4x3 angles");
  }
  for (int q = 0; q < kDecoderQubits; ++q) {
    out.gates.push_back(GateOp::rot(q, rotations[q * 3], rotations[q * 3 + 1],
                                    rotations[q * 3 + 2]));
    out.roles.push_back({GateRole::Kind::Rotation, layer, q, 0});
  }
  for (int q = 0; q < kDecoderQubits; ++q) {
    out.gates.push_back(GateOp::cnot(q, (q + 1) % kDecoderQubits));
    out.roles.push_back({GateRole::Kind::Entangler, layer, q, 0});
  }
}

}  // namespace

Circuit encoding_block(AnsatzVariant variant, const FeatureVector& x,
                       std::span<const double> layer_weights) {
  AnnotatedCircuit out;
  append_encoding(out, variant, 0, x, layer_weights);
  return std::move(out.gates);
}

Circuit entangling_layer(std::span<const double> rotations) {
  AnnotatedCircuit out;
  append_entangling(out, 0, rotations);
  return std::move(out.gates);
}

AnnotatedCircuit build_annotated_circuit(AnsatzVariant variant,
                                         const ParamSet& params,
                                         const FeatureVector& x) {
  params.validate(variant);
  AnnotatedCircuit out;
  const auto layer_rotations = [&](int l) {
    return std::span<const double>(params.rotations).subspan(l * 12, 12);
  };
  if (variant == AnsatzVariant::Plain) {
    append_encoding(out, variant, 0, x, {});
    for (int l = 0; l < params.layers; ++l) {
      append_entangling(out, l, layer_rotations(l));
    }
    return out;
  }
  for (int l = 0; l < params.layers; ++l) {
    std::span<const double> weights;
    if (variant_has_weights(variant)) {
      weights = std::span<const double>(params.encoding_weights)
                    .subspan(l * 4, 4);
    }
    append_encoding(out, variant, l, x, weights);
    append_entangling(out, l, layer_rotations(l));
  }
  return out;
}

Circuit build_circuit(AnsatzVariant variant, const ParamSet& params,
                      const FeatureVector& x) {
  return build_annotated_circuit(variant, params, x).gates;
}

ParamSet init_params(AnsatzVariant variant, int layers, Rng& rng) {
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  ParamSet params;
  params.layers = layers;
  params.rotations.resize(static_cast<std::size_t>(layers) * 12);
  for (auto& r : params.rotations) r = rng.uniform_angle();
  if (variant_has_weights(variant)) {
    params.encoding_weights.assign(static_cast<std::size_t>(layers) * 4, 1.0);
  }
  return params;
}

int param_count(AnsatzVariant variant, int layers) {
  if (layers < 0) throw std::invalid_argument("negative layer count");
  return variant_has_weights(variant) ? 16 * layers : 12 * layers;
}

std::string circuit_to_json(const Circuit& circuit, int n_qubits) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& gate : circuit) {
    nlohmann::json g;
    g["kind"] = std::string(gate_kind_name(gate.kind));
    g["targets"] = std::vector<int>(gate.targets.begin(),
                                    gate.targets.begin() + gate.target_count());
    g["angles"] = std::vector<double>(gate.angles.begin(),
                                      gate.angles.begin() + gate.angle_count());
    gates.push_back(std::move(g));
  }
  nlohmann::json doc;
  doc["n_qubits"] = n_qubits;
  doc["gates"] = std::move(gates);
  return doc.dump();
}

Circuit circuit_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Circuit circuit;
  for (const auto& g : doc.at("gates")) {
    GateOp gate;
    gate.kind = gate_kind_from_name(g.at("kind").get<std::string>());
    const auto targets = g.at("targets").get<std::vector<int>>();
    if (static_cast<int>(targets.size()) != gate_target_count(gate.kind)) {
      throw std::invalid_argument("bad target count in circuit JSON");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) gate.targets[i] = targets[i];
    const auto angles = g.at("angles").get<std::vector<double>>();
    if (static_cast<int>(angles.size()) != gate_angle_count(gate.kind)) {
      throw std::invalid_argument("bad angle count in circuit JSON");
    }
    for (std::size_t i = 0; i < angles.size(); ++i) gate.angles[i] = angles[i];
    circuit.push_back(gate);
  }
  return circuit;
}

}  // namespace qcae
