#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "qcae/sim.hpp"

using namespace qcae;
using qcae::testing::oracle_apply;
using qcae::testing::random_circuit;
using qcae::testing::random_gate;
using qcae::testing::random_state;
using qcae::testing::to_eigen;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("init_state prepares |0...0>") {
  const auto state = init_state(4);
  REQUIRE(state.dim() == 16);
  CHECK(state.amplitudes()[0] == cxd{1.0, 0.0});
  for (std::size_t i = 1; i < 16; ++i) {
    CHECK(state.amplitudes()[i] == cxd{0.0, 0.0});
  }
  const auto single = init_state(1);
  REQUIRE(single.dim() == 2);
  CHECK(single.amplitudes()[0] == cxd{1.0, 0.0});
  CHECK(single.amplitudes()[1] == cxd{0.0, 0.0});
}

TEST_CASE("init_state rejects out-of-range qubit counts") {
  CHECK_THROWS_AS(init_state(13), std::out_of_range);
  CHECK_THROWS_AS(init_state(0), std::out_of_range);
  CHECK_THROWS_AS(init_state(-2), std::out_of_range);
}

TEST_CASE("RX(0) is the identity") {
  auto state = init_state(4);
  apply_gate(state, GateOp::rx(0, 0.0));
  CHECK(state.amplitudes()[0] == cxd{1.0, 0.0});
  CHECK(probabilities(state)[0] == doctest::Approx(1.0));
}

TEST_CASE("RX(pi/2) splits probability between the 0 and flipped state") {
  auto state = init_state(4);
  apply_gate(state, GateOp::rx(0, kPi / 2.0));
  const auto probs = probabilities(state);
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));  // qubit 0 = bit 0
  for (int b = 2; b < 16; ++b) CHECK(probs[b] == doctest::Approx(0.0));
}

TEST_CASE("apply_gate rejects invalid targets") {
  auto state = init_state(2);
  CHECK_THROWS_AS(apply_gate(state, GateOp::rx(2, 0.1)), std::out_of_range);
  CHECK_THROWS_AS(apply_gate(state, GateOp::rx(-1, 0.1)), std::out_of_range);
  CHECK_THROWS_AS(apply_gate(state, GateOp::cnot(1, 1)), std::invalid_argument);
}

TEST_CASE("every gate kind matches the dense oracle on random states") {
  Rng rng(0xA11CE);
  for (int trial = 0; trial < 200; ++trial) {
    auto state = random_state(rng, 4);
    const auto gate = random_gate(rng, 4);
    const auto expected = oracle_apply({gate}, to_eigen(state));
    apply_gate(state, gate);
    const auto got = to_eigen(state);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("empty circuit leaves the state unchanged") {
  auto state = init_state(4);
  apply_circuit(state, {});
  CHECK(state.amplitudes()[0] == cxd{1.0, 0.0});
}

TEST_CASE("RX(pi) twice is a global phase") {
  Rng rng(7);
  auto state = random_state(rng, 4);
  const auto before = probabilities(state);
  apply_circuit(state, {GateOp::rx(0, kPi), GateOp::rx(0, kPi)});
  const auto after = probabilities(state);
  for (int b = 0; b < 16; ++b) {
    CHECK(after[b] == doctest::Approx(before[b]).epsilon(1e-12));
  }
}

TEST_CASE("random 50-gate circuits match the dense oracle") {
  Rng rng(0xC1BC01);
  for (int trial = 0; trial < 20; ++trial) {
    const auto circuit = random_circuit(rng, 4, 50);
    auto state = init_state(4);
    const auto expected = oracle_apply(circuit, to_eigen(state));
    apply_circuit(state, circuit);
    CHECK((to_eigen(state) - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("norm is preserved by every gate kind") {
  Rng rng(0x2012);
  for (int trial = 0; trial < 300; ++trial) {
    auto state = random_state(rng, 4);
    apply_gate(state, random_gate(rng, 4));
    CHECK(std::abs(state.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("gate then inverse restores the state") {
  Rng rng(0x1212);
  for (int trial = 0; trial < 100; ++trial) {
    auto state = random_state(rng, 4);
    const auto before = to_eigen(state);
    const auto gate = random_gate(rng, 4);
    apply_gate(state, gate);
    GateOp inverse = gate;
    switch (gate.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        inverse.angles[0] = -gate.angles[0];
        apply_gate(state, inverse);
        break;
      case GateKind::Rot:
        inverse.angles = {-gate.angles[2], -gate.angles[1], -gate.angles[0]};
        apply_gate(state, inverse);
        break;
      case GateKind::SX:  // SX^dagger = SX * X
        apply_gate(state, GateOp::x(gate.targets[0]));
        apply_gate(state, GateOp::sx(gate.targets[0]));
        break;
      default:  // CNOT, SWAP, X are involutions
        apply_gate(state, inverse);
    }
    CHECK((to_eigen(state) - before).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("probabilities of |0000> and the uniform RX(pi/2) product state") {
  auto state = init_state(4);
  CHECK(probabilities(state)[0] == doctest::Approx(1.0));
  for (int q = 0; q < 4; ++q) apply_gate(state, GateOp::rx(q, kPi / 2.0));
  const auto probs = probabilities(state);
  for (int b = 0; b < 16; ++b) {
    CHECK(probs[b] == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  }
}

TEST_CASE("probabilities match |amplitude|^2 recomputation") {
  Rng rng(0xBEA7);
  const auto state = random_state(rng, 4);
  const auto probs = probabilities(state);
  for (int b = 0; b < 16; ++b) {
    const auto a = state.amplitudes()[b];
    CHECK(probs[b] ==
          doctest::Approx(a.real() * a.real() + a.imag() * a.imag())
              .epsilon(1e-15));
  }
}

TEST_CASE("sample_counts on a point mass returns the point mass") {
  std::vector<double> probs(16, 0.0);
  probs[5] = 1.0;
  Rng rng(1);
  const auto freq = sample_counts(probs, 1000, rng);
  CHECK(freq[5] == doctest::Approx(1.0));
}

TEST_CASE("sample_counts concentrates around uniform at 1e6 shots") {
  const std::vector<double> uniform(16, 1.0 / 16.0);
  Rng rng(0x5EED);
  const auto freq = sample_counts(uniform, 1000000, rng);
  for (int b = 0; b < 16; ++b) {
    // binomial 5-sigma bound: 5 * sqrt(p(1-p)/n) ~ 0.0012
    CHECK(std::abs(freq[b] - 0.0625) < 0.002);
  }
}

TEST_CASE("sample_counts is deterministic for a fixed seed") {
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
  Rng a(42), b(42);
  CHECK(sample_counts(probs, 5000, a) == sample_counts(probs, 5000, b));
  CHECK_THROWS_AS(sample_counts(probs, 0, a), std::invalid_argument);
}

TEST_CASE("empirical distribution converges like 1/sqrt(shots)") {
  // Kolmogorov-style check at a fixed seed set: max CDF deviation scaled by
  // sqrt(shots) stays bounded, and more shots means smaller deviation.
  std::vector<double> probs(16);
  Rng setup(3);
  double total = 0.0;
  for (auto& p : probs) total += (p = setup.uniform());
  for (auto& p : probs) p /= total;

  const auto max_cdf_dev = [&](long shots, std::uint64_t seed) {
    Rng rng(seed);
    const auto freq = sample_counts(probs, shots, rng);
    double acc_p = 0.0, acc_f = 0.0, dev = 0.0;
    for (int b = 0; b < 16; ++b) {
      acc_p += probs[b];
      acc_f += freq[b];
      dev = std::max(dev, std::abs(acc_p - acc_f));
    }
    return dev;
  };

  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const double d2 = max_cdf_dev(100, seed);
    const double d6 = max_cdf_dev(1000000, seed);
    CHECK(d6 < d2);
    CHECK(d2 * std::sqrt(100.0) < 3.0);
    CHECK(d6 * std::sqrt(1e6) < 3.0);
  }
}

TEST_CASE("from_amplitudes validates shape and norm") {
  std::vector<cxd> amps(4, cxd{0.5, 0.0});
  CHECK(StateVector::from_amplitudes(2, amps).norm() ==
        doctest::Approx(1.0));
  CHECK_THROWS(StateVector::from_amplitudes(3, amps));
  amps[0] = cxd{5.0, 0.0};
  CHECK_THROWS(StateVector::from_amplitudes(2, amps));
}
