// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "bqc/analysis.h"
#include "bqc/deterministic.h"
#include "bqc/dj.h"
#include "bqc/protocols.h"
#include "test_util.h"

using namespace bqc;
using namespace bqc::protocols;
using bqc::testing::product;

namespace {

const std::vector<std::string> kNames{"0", "1", "+", "+i"};

QuantumState input_for(const GateChoice& c, const std::vector<std::string>& names) {
  return product(data_labels(c.kind), names);
}

double worst_fidelity(const GateChoice& c, const QuantumState& in) {
  ShotOutcome out = run_shot(c, in, NoiseConfig{}, SimMode::kDensityMatrix, Rng(1));
  REQUIRE_FALSE(out.branches.empty());
  QuantumState target = target_state(c, in);
  double worst = 1;
  for (const auto& b : out.branches) worst = std::min(worst, state_fidelity(b.client, target));
  return worst;
}

QuantumState server_normalized(const GateChoice& c, const QuantumState& in) {
  ShotOutcome out = run_shot(c, in, NoiseConfig{}, SimMode::kDensityMatrix, Rng(1));
  return server_view(out).normalized();
}

void check_blind(const std::vector<GateChoice>& choices, const QuantumState& in) {
  std::vector<QuantumState> views;
  for (const auto& c : choices) views.push_back(server_normalized(c, in));
  for (const auto& v : views) CHECK((v.density() - views[0].density()).norm() < 1e-9);
  CHECK(analysis::holevo(views) <= 1e-9);
}

}  // namespace

TEST_CASE("noiseless single-qubit protocols are exact") {
  for (double phi : {0.0, kPi / 2, kPi, 3 * kPi / 2, 0.3}) {
    for (const auto& n : kNames) CHECK(worst_fidelity(rz_choice(phi), input_for(rz_choice(phi), {n})) > 1 - 1e-9);
  }
  for (auto c : {one_qubit_choice(0, 0, 0), one_qubit_choice(kPi / 2, kPi / 2, kPi / 2),
                 one_qubit_choice(kPi / 4, kPi / 2, kPi / 4)}) {
    CHECK(worst_fidelity(c, input_for(c, {"+i"})) > 1 - 1e-9);
  }
}

TEST_CASE("noiseless two-qubit gates are exact on every product input") {
  for (auto c : {intra_choice(0), intra_choice(kPi / 2), distributed_choice(0), distributed_choice(1)}) {
    for (const auto& a : kNames) {
      for (const auto& b : kNames) CHECK(worst_fidelity(c, input_for(c, {a, b})) > 1 - 1e-9);
    }
  }
}

TEST_CASE("noiseless DJ gives the right verdict for every oracle") {
  for (int o = 1; o <= 4; ++o) {
    GateChoice c = dj_choice(o);
    ShotOutcome out = run_shot(c, input_for(c, {"+", "+"}), NoiseConfig{}, SimMode::kDensityMatrix, Rng(1));
    DjTally tally(o);
    tally.add(out);
    CHECK(tally.fidelity() > 1 - 1e-9);
    CHECK(tally.correct_verdict() > 1 - 1e-9);
  }
  CHECK(dj_is_constant(4));
  CHECK_FALSE(dj_is_constant(1));
  CHECK(dj_verdict_constant(0, 0, 0));
  CHECK(dj_verdict_constant(1, 0, 1));
  CHECK_FALSE(dj_verdict_constant(1, 0, 0));
}

TEST_CASE("server view does not depend on the client's choice") {
  check_blind({rz_choice(0), rz_choice(kPi / 2), rz_choice(kPi), rz_choice(3 * kPi / 2)},
              input_for(rz_choice(0), {"+"}));
  check_blind({one_qubit_choice(0, 0, 0), one_qubit_choice(kPi / 2, kPi / 2, kPi / 2),
               one_qubit_choice(kPi / 4, kPi / 2, kPi / 4)},
              input_for(rz_choice(0), {"+i"}));
  check_blind({intra_choice(0), intra_choice(kPi / 2)}, input_for(intra_choice(0), {"+", "+"}));
  check_blind({distributed_choice(0), distributed_choice(1)}, input_for(distributed_choice(0), {"+", "+"}));
  check_blind({dj_choice(1), dj_choice(3)}, input_for(dj_choice(1), {"+", "+"}));
  check_blind({dj_choice(2), dj_choice(4)}, input_for(dj_choice(1), {"+", "+"}));
}

TEST_CASE("trajectory mode reproduces noiseless results") {
  GateChoice c = intra_choice(kPi / 2);
  QuantumState in = input_for(c, {"+", "+"});
  int heralded = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    ShotOutcome out = run_shot(c, in, NoiseConfig{}, SimMode::kTrajectory, Rng::for_shot(3, k));
    if (out.branches.empty()) continue;
    ++heralded;
    REQUIRE(out.branches.size() == 1);
    CHECK(state_fidelity(out.branches[0].client, target_state(c, in)) > 1 - 1e-9);
  }
  CHECK(heralded > 0);
}

TEST_CASE("herald probability of an ideal single photon") {
  GateChoice c = rz_choice(0.4);
  ShotOutcome out = run_shot(c, input_for(c, {"+"}), NoiseConfig{}, SimMode::kDensityMatrix, Rng(1));
  // the dark spin absorbs half, and half of the rest lands in edge windows
  CHECK(out.weight == doctest::Approx(0.25));
  CHECK(out.heralds == 1);
}

TEST_CASE("deterministic rotation: residual failure halves per round") {
  QuantumState m = spin_state("m", "+");
  double phi = kPi / 3;
  QuantumState target = QuantumState::from_vector(m.layout(), gates::rz(phi) * m.vector());
  for (int n = 1; n <= 6; ++n) {
    DeterministicOutcome o = deterministic_rz(m, "m", phi, NoiseConfig{}, 1, n);
    CHECK(o.failure_probability() == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-9));
    CHECK(state_fidelity(o.client_state(), target) > 1 - 1e-9);
    CHECK((o.server_state().density() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-9);
  }
}

TEST_CASE("deterministic two-qubit gates") {
  QuantumState mm = product({"m1", "m2"}, {"+", "+"});
  for (double phi : {0.0, kPi / 2}) {
    DeterministicOutcome o = deterministic_intra(mm, phi, NoiseConfig{}, 1);
    QuantumState t = QuantumState::from_vector(mm.layout(), ideal_unitary(intra_choice(phi)) * mm.vector());
    CHECK(state_fidelity(o.client_state(), t) > 1 - 1e-9);
  }
  CHECK_THROWS(deterministic_intra(mm, 0.3, NoiseConfig{}, 1));
  for (int e : {0, 1}) {
    DeterministicOutcome o = deterministic_distributed(mm, e, NoiseConfig{}, 1);
    QuantumState t = QuantumState::from_vector(mm.layout(), ideal_unitary(distributed_choice(e)) * mm.vector());
    CHECK(state_fidelity(o.client_state(), t) > 1 - 1e-9);
  }
}

TEST_CASE("sampled deterministic runs") {
  Rng rng(3);
  double total = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) total += static_cast<double>(sample_deterministic_rz(0.25, 64, rng).attempts);
  CHECK(total / n == doctest::Approx(8).epsilon(0.05));
  Rng r2(4);
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 1000; ++i) sample_deterministic_rz(0.5, 1, r2);
      }(),
      RoundsExhausted);
}
