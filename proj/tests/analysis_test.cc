// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "bqc/analysis.h"
#include "bqc/gst.h"
#include "bqc/server_ops.h"
#include "test_util.h"

using namespace bqc;
using namespace bqc::analysis;

TEST_CASE("holevo quantity basics") {
  QuantumState z0 = spin_state("q", "0");
  QuantumState z1 = spin_state("q", "1");
  QuantumState plus = spin_state("q", "+");
  CHECK(holevo({z0, z1}) == doctest::Approx(1));
  CHECK(holevo({z0, z0}) == doctest::Approx(0).epsilon(1e-12));
  // two pure states at 45 degrees on the Bloch sphere projection
  double c = std::cos(kPi / 8);
  double h = -(c * c * std::log2(c * c) + (1 - c * c) * std::log2(1 - c * c));
  CHECK(holevo({z0, plus}) == doctest::Approx(h).epsilon(1e-9));
  CHECK(holevo({z0, z1}, {0.9, 0.1}) == doctest::Approx(-(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1))));
  CHECK_THROWS(holevo({z0, z1}, {1.0}));
}

TEST_CASE("holevo is invariant under a common unitary") {
  Rng rng(5);
  SubsystemLayout l;
  l.add_spin("a").add_spin("b");
  std::vector<QuantumState> states;
  for (int i = 0; i < 3; ++i) states.push_back(QuantumState::from_density(l, bqc::testing::random_density(4, rng)));
  Matrix u = bqc::testing::random_unitary(4, rng);
  std::vector<QuantumState> rotated;
  for (const auto& s : states) rotated.push_back(apply_unitary(s, u, {"a", "b"}));
  CHECK(holevo(rotated) == doctest::Approx(holevo(states)).epsilon(1e-9));
}

TEST_CASE("classical holevo") {
  CHECK(holevo_classical({{1, 0}, {0, 1}}) == doctest::Approx(1));
  CHECK(holevo_classical({{3, 1}, {0.75, 0.25}}) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("state reconstruction round trip") {
  Rng rng(6);
  SubsystemLayout l;
  l.add_spin("q1").add_spin("q2");
  QuantumState s = QuantumState::from_density(l, bqc::testing::random_density(4, rng));
  ExpectationRow row = measure_expectations(s, "x");
  CHECK(row.values.size() == 15);
  QuantumState back = reconstruct_2q(row);
  CHECK((back.density() - s.density()).norm() < 1e-10);

  SubsystemLayout l1;
  l1.add_spin("q");
  QuantumState one = QuantumState::from_density(l1, bqc::testing::random_density(2, rng));
  CHECK((reconstruct_1q(measure_expectations(one)).density() - one.density()).norm() < 1e-10);

  ExpectationRow bad;
  bad.values["X"] = {0.0, 0};
  CHECK_THROWS_AS(reconstruct_1q(bad), LayoutError);
  ExpectationRow wild;
  wild.values = {{"X", {1.0, 0}}, {"Y", {1.0, 0}}, {"Z", {1.0, 0}}};
  CHECK_THROWS(reconstruct_1q(wild));
}

TEST_CASE("fidelity from expectations agrees with the state fidelity") {
  Rng rng(7);
  SubsystemLayout l;
  l.add_spin("q1").add_spin("q2");
  QuantumState rho = QuantumState::from_density(l, bqc::testing::random_density(4, rng));
  QuantumState psi = QuantumState::from_vector(l, bqc::testing::random_vector(4, rng));
  CHECK(fidelity_from_expectations(measure_expectations(rho), measure_expectations(psi)) ==
        doctest::Approx(state_fidelity(rho, psi)).epsilon(1e-10));
}

TEST_CASE("mixture over outcomes") {
  QuantumState z0 = spin_state("q", "0");
  QuantumState z1 = spin_state("q", "1");
  QuantumState m = mix_over_outcomes({{0.5, z0}, {0.5, z1}});
  CHECK((m.density() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-12);
  CHECK_THROWS(mix_over_outcomes({{0.5, z0}}));
}

TEST_CASE("bootstrap interval") {
  ExpectationTable t(1);
  t[0].values["Z"] = {0.2, 0};
  Rng rng(8);
  auto stat = [](const ExpectationTable& x) { return x[0].values.at("Z").value; };
  auto [lo0, hi0] = bootstrap_uncertainty(t, stat, 50, rng);
  CHECK(lo0 == doctest::Approx(0.2));
  CHECK(hi0 == doctest::Approx(0.2));
  t[0].values["Z"].shots = 1000;
  auto [lo, hi] = bootstrap_uncertainty(t, stat, 2000, rng);
  // binomial standard error of <Z> is sqrt(1 - 0.04) / sqrt(1000) = 0.031
  CHECK(hi - lo == doctest::Approx(2 * 0.031).epsilon(0.1));
  CHECK(lo < 0.2);
  CHECK(hi > 0.2);
}

TEST_CASE("process tomography inverts random channels") {
  Rng rng(9);
  for (int q : {1, 2}) {
    std::size_t d = std::size_t{1} << q;
    auto kraus = bqc::testing::random_kraus(d, 3, rng);
    ChannelFn channel = [&](const Matrix& rho) {
      Matrix out = Matrix::Zero(rho.rows(), rho.cols());
      for (const auto& k : kraus) out += k * rho * k.adjoint();
      return out;
    };
    ChiMatrix est = gate_set_tomography(channel, q);
    ChiMatrix exact = chi_from_kraus(kraus, q);
    CHECK((est.chi - exact.chi).norm() < 1e-8);
    CHECK(est.chi.trace().real() == doctest::Approx(1).epsilon(1e-9));
    CHECK((est.chi - est.chi.adjoint()).norm() < 1e-9);
  }
}

TEST_CASE("chi of CZ and fidelity formulas") {
  ChiMatrix cz = chi_from_unitary(gates::cz(), 2);
  // CZ = (II + IZ + ZI - ZZ) / 2: four equal-magnitude entries on II, IZ, ZI, ZZ
  CHECK(std::abs(cz.chi(0, 0)) == doctest::Approx(0.25));
  CHECK(std::abs(cz.chi(3, 3)) == doctest::Approx(0.25));    // IZ
  CHECK(std::abs(cz.chi(12, 12)) == doctest::Approx(0.25));  // ZI
  CHECK(std::abs(cz.chi(15, 15)) == doctest::Approx(0.25));  // ZZ
  CHECK(cz.chi.trace().real() == doctest::Approx(1));
  auto [fp, fa] = process_and_average_fidelity(cz, cz);
  CHECK(fp == doctest::Approx(1));
  CHECK(fa == doctest::Approx(1));
  ChiMatrix id = chi_from_unitary(Matrix::Identity(4, 4), 2);
  auto [fp0, fa0] = process_and_average_fidelity(id, cz);
  CHECK(fp0 == doctest::Approx(0.25));
  CHECK(fa0 == doctest::Approx(0.4));
  CHECK(average_from_process(0.74, 4) == doctest::Approx(0.792));
  CHECK(average_from_process(1, 4) == doctest::Approx(1));
  CHECK(average_from_process(1, 2) == doctest::Approx(1));
  CHECK(average_from_process(0, 2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("singular tomography data is rejected") {
  CHECK_THROWS(chi_from_outputs(std::vector<Matrix>(3, Matrix::Identity(2, 2)), 1));
}
