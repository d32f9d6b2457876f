#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "qcae/ansatz.hpp"
#include "qcae/sim.hpp"

using namespace qcae;
using qcae::testing::oracle_apply;
using qcae::testing::random_state;
using qcae::testing::to_eigen;

namespace {

std::vector<double> run_probs(AnsatzVariant variant, const ParamSet& params,
                              const FeatureVector& x) {
  StateVector state(kDecoderQubits);
  apply_circuit(state, build_circuit(variant, params, x));
  return probabilities(state);
}

}  // namespace

TEST_CASE("plain encoding uses exactly qubits 0 and 1") {
  const auto block = encoding_block(AnsatzVariant::Plain, {0.3, -0.7});
  REQUIRE(block.size() == 2);
  CHECK(block[0] == GateOp::rx(0, 0.3));
  CHECK(block[1] == GateOp::rx(1, -0.7));
}

TEST_CASE("double encoding with zero features is an identity block") {
  const auto block = encoding_block(AnsatzVariant::DoubleDR, {0.0, 0.0});
  REQUIRE(block.size() == 4);
  for (const auto& gate : block) {
    CHECK(gate.kind == GateKind::RX);
    CHECK(gate.angles[0] == 0.0);
  }
  CHECK(block[2].targets[0] == 2);
  CHECK(block[3].targets[0] == 3);
}

TEST_CASE("weighted encoding multiplies angles by per-qubit weights") {
  const double w[4] = {1.0, 1.0, 2.0, 2.0};
  const auto block =
      encoding_block(AnsatzVariant::WeightedDoubleDR, {0.5, -0.2}, w);
  REQUIRE(block.size() == 4);
  CHECK(block[0].angles[0] == doctest::Approx(0.5));
  CHECK(block[1].angles[0] == doctest::Approx(-0.2));
  CHECK(block[2].angles[0] == doctest::Approx(1.0));
  CHECK(block[3].angles[0] == doctest::Approx(-0.4));
}

TEST_CASE("encoding weights and variant must agree") {
  const double w[4] = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(encoding_block(AnsatzVariant::DoubleDR, {0.1, 0.2}, w),
                  std::invalid_argument);
  CHECK_THROWS_AS(encoding_block(AnsatzVariant::WeightedDoubleDR, {0.1, 0.2}),
                  std::invalid_argument);
  const double w3[3] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(encoding_block(AnsatzVariant::WeightedDoubleDR, {0.1, 0.2},
                                 std::span<const double>(w3)),
                  std::invalid_argument);
}

TEST_CASE("entangling layer is 4 Rot + 4 ring CNOTs") {
  std::vector<double> rotations(12, 0.0);
  const auto layer = entangling_layer(rotations);
  REQUIRE(layer.size() == 8);
  for (int q = 0; q < 4; ++q) {
    CHECK(layer[q].kind == GateKind::Rot);
    CHECK(layer[q].targets[0] == q);
    CHECK(layer[4 + q].kind == GateKind::CNOT);
    CHECK(layer[4 + q].targets[0] == q);
    CHECK(layer[4 + q].targets[1] == (q + 1) % 4);
  }
  // All-zero rotations leave |0000> unchanged (CNOTs act trivially).
  auto state = init_state(4);
  apply_circuit(state, layer);
  CHECK(probabilities(state)[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(entangling_layer(std::vector<double>(11, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("entangling layer matches the dense oracle") {
  Rng rng(0xE11);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> rotations(12);
    for (auto& r : rotations) r = rng.uniform_angle();
    const auto layer = entangling_layer(rotations);
    auto state = random_state(rng, 4);
    const auto expected = oracle_apply(layer, to_eigen(state));
    apply_circuit(state, layer);
    CHECK((to_eigen(state) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("build_circuit gate counts follow the construction rules") {
  Rng rng(1);
  CHECK(build_circuit(AnsatzVariant::Plain,
                      init_params(AnsatzVariant::Plain, 8, rng), {0.1, 0.2})
            .size() == 66);  // 2 + 8*8
  CHECK(build_circuit(AnsatzVariant::DoubleDR,
                      init_params(AnsatzVariant::DoubleDR, 8, rng), {0.1, 0.2})
            .size() == 96);  // 8*(4+8)
  CHECK(build_circuit(AnsatzVariant::SingleDR,
                      init_params(AnsatzVariant::SingleDR, 8, rng), {0.1, 0.2})
            .size() == 80);  // 8*(2+8)
}

TEST_CASE("weighted variant keeps the gate count of the double variant") {
  Rng rng(2);
  for (int layers = 1; layers <= 24; ++layers) {
    const auto weighted = build_circuit(
        AnsatzVariant::WeightedDoubleDR,
        init_params(AnsatzVariant::WeightedDoubleDR, layers, rng), {0.4, 0.5});
    const auto unweighted = build_circuit(
        AnsatzVariant::DoubleDR, init_params(AnsatzVariant::DoubleDR, layers, rng),
        {0.4, 0.5});
    CHECK(weighted.size() == unweighted.size());
  }
}

TEST_CASE("zero-parameter SingleDR with zero features yields delta_0") {
  ParamSet params;
  params.layers = 1;
  params.rotations.assign(12, 0.0);
  const auto probs = run_probs(AnsatzVariant::SingleDR, params, {0.0, 0.0});
  CHECK(probs[0] == doctest::Approx(1.0));
}

TEST_CASE("unit weights make the weighted variant equal DoubleDR exactly") {
  Rng rng(3);
  auto weighted = init_params(AnsatzVariant::WeightedDoubleDR, 4, rng);
  ParamSet unweighted;
  unweighted.layers = weighted.layers;
  unweighted.rotations = weighted.rotations;
  const FeatureVector x{0.9, -1.3};
  const auto pw = run_probs(AnsatzVariant::WeightedDoubleDR, weighted, x);
  const auto pu = run_probs(AnsatzVariant::DoubleDR, unweighted, x);
  for (int b = 0; b < 16; ++b) CHECK(pw[b] == pu[b]);
}

TEST_CASE("build_circuit is purely functional") {
  Rng rng(4);
  const auto params = init_params(AnsatzVariant::WeightedDoubleDR, 3, rng);
  const FeatureVector x{0.25, 0.75};
  const auto a = build_circuit(AnsatzVariant::WeightedDoubleDR, params, x);
  const auto b = build_circuit(AnsatzVariant::WeightedDoubleDR, params, x);
  CHECK(a == b);
}

TEST_CASE("init_params shapes, determinism and unit weights") {
  Rng rng(5);
  const auto params = init_params(AnsatzVariant::WeightedDoubleDR, 16, rng);
  CHECK(params.rotations.size() == 192);
  CHECK(params.encoding_weights.size() == 64);
  for (const auto w : params.encoding_weights) CHECK(w == 1.0);
  for (const auto r : params.rotations) {
    CHECK(r >= 0.0);
    CHECK(r < 6.2831853072);
  }
  Rng rng_a(6), rng_b(6);
  CHECK(init_params(AnsatzVariant::DoubleDR, 5, rng_a).rotations ==
        init_params(AnsatzVariant::DoubleDR, 5, rng_b).rotations);
  CHECK_THROWS_AS(init_params(AnsatzVariant::Plain, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("param_count") {
  CHECK(param_count(AnsatzVariant::Plain, 8) == 96);
  CHECK(param_count(AnsatzVariant::WeightedDoubleDR, 16) == 256);
  CHECK(param_count(AnsatzVariant::DoubleDR, 24) == 288);
  CHECK(param_count(AnsatzVariant::SingleDR, 1) == 12);
}

TEST_CASE("ParamSet::validate rejects mismatched shapes") {
  ParamSet params;
  params.layers = 2;
  params.rotations.assign(23, 0.0);
  CHECK_THROWS_AS(params.validate(AnsatzVariant::DoubleDR),
                  std::invalid_argument);
  params.rotations.assign(24, 0.0);
  CHECK_NOTHROW(params.validate(AnsatzVariant::DoubleDR));
  CHECK_THROWS_AS(params.validate(AnsatzVariant::WeightedDoubleDR),
                  std::invalid_argument);
  params.encoding_weights.assign(8, 1.0);
  CHECK_NOTHROW(params.validate(AnsatzVariant::WeightedDoubleDR));
  CHECK_THROWS_AS(params.validate(AnsatzVariant::DoubleDR),
                  std::invalid_argument);
}

TEST_CASE("circuit JSON round-trip") {
  Rng rng(0x15);
  const auto circuit = qcae::testing::random_circuit(rng, 4, 40);
  const auto text = circuit_to_json(circuit);
  CHECK(circuit_from_json(text) == circuit);
}

TEST_CASE("variant names round-trip") {
  for (const auto v :
       {AnsatzVariant::Plain, AnsatzVariant::SingleDR, AnsatzVariant::DoubleDR,
        AnsatzVariant::WeightedDoubleDR}) {
    CHECK(variant_from_name(variant_name(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_name("triple_dr"), std::invalid_argument);
}
