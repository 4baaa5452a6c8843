// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "bqc/qcore.h"
#include "bqc/server_ops.h"
#include "test_util.h"

using namespace bqc;
using bqc::testing::product;

TEST_CASE("fock basis enumeration respects cutoff and cap") {
  FockBasis b(2, 2, 2);
  CHECK(b.size() == 6);
  CHECK(b.occupation(0) == std::vector<int>{0, 0});
  CHECK(b.total(b.size() - 1) == 2);
  std::vector<int> occ{1, 1};
  REQUIRE(b.index_of(occ).has_value());
  CHECK(b.occupation(*b.index_of(occ)) == occ);
  std::vector<int> over{2, 1};
  CHECK_FALSE(b.index_of(over).has_value());

  FockBasis wide(8, 2, 2);
  CHECK(wide.size() == 1 + 8 + 36);  // vacuum, singles, pairs with repetition
}

TEST_CASE("layout bookkeeping") {
  SubsystemLayout l;
  l.add_spin("a").add_spin("b").add_rails("g", {"b0", "b1"}, 1, 1);
  CHECK(l.dim() == 2 * 2 * 3);
  CHECK(l.position("g") == 2);
  CHECK(l.stride(0) == 6);
  CHECK_THROWS_AS(l.add_spin("a"), LayoutError);
  CHECK_THROWS_AS(l.position("zz"), LayoutError);
}

TEST_CASE("named qubit states") {
  CHECK(std::abs(qubit_state("+").squaredNorm() - 1) < 1e-12);
  CHECK(std::abs(qubit_state("+i")(1) - cplx(0, 1 / std::sqrt(2.0))) < 1e-12);
  CHECK_THROWS(qubit_state("?"));
}

TEST_CASE("unitaries preserve trace and purity") {
  Rng rng(1);
  QuantumState s = product({"a", "b"}, {"+", "0"});
  Matrix u = bqc::testing::random_unitary(4, rng);
  QuantumState out = apply_unitary(s, u, {"a", "b"});
  CHECK(std::abs(out.trace_weight() - 1) < 1e-12);
  CHECK(std::abs(purity(out.as_density()) - 1) < 1e-10);
  // pure and density paths agree
  QuantumState out_rho = apply_unitary(s.as_density(), u, {"a", "b"});
  CHECK((out_rho.density() - out.density()).norm() < 1e-12);
  CHECK_THROWS(apply_unitary(s, Matrix::Ones(4, 4), {"a", "b"}));
}

TEST_CASE("target order matters for two-qubit gates") {
  QuantumState s = product({"a", "b"}, {"1", "0"});
  QuantumState flipped = apply_unitary(s, gates::cnot(), {"a", "b"});
  CHECK(std::abs(state_fidelity(flipped, product({"a", "b"}, {"1", "1"})) - 1) < 1e-12);
  QuantumState untouched = apply_unitary(s, gates::cnot(), {"b", "a"});
  CHECK(std::abs(state_fidelity(untouched, s) - 1) < 1e-12);
}

TEST_CASE("kraus channels are trace preserving and keep states PSD") {
  Rng rng(2);
  auto kraus = bqc::testing::random_kraus(2, 3, rng);
  SubsystemLayout l;
  l.add_spin("a").add_spin("b");
  QuantumState s = QuantumState::from_density(l, bqc::testing::random_density(4, rng));
  QuantumState out = apply_kraus(s, kraus, {"b"});
  CHECK(std::abs(out.trace_weight() - 1) < 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.density());
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK((out.density() - out.density().adjoint()).norm() < 1e-12);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
  QuantumState s = product({"a", "b"}, {"+", "0"});
  s = apply_unitary(s, gates::cnot(), {"a", "b"});
  QuantumState a = partial_trace(s, {"a"});
  CHECK((a.density() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-12);
  CHECK(std::abs(von_neumann_entropy(a) - 1) < 1e-12);
  CHECK(von_neumann_entropy(s) == 0);
}

TEST_CASE("partial trace of a product returns the factor") {
  Rng rng(3);
  SubsystemLayout la, lb;
  la.add_spin("a");
  lb.add_spin("b");
  QuantumState a = QuantumState::from_density(la, bqc::testing::random_density(2, rng));
  QuantumState b = QuantumState::from_density(lb, bqc::testing::random_density(2, rng));
  QuantumState ab = tensor(a, b);
  CHECK((partial_trace(ab, {"b"}).density() - b.density()).norm() < 1e-12);
  CHECK((partial_trace(ab, {"a"}).density() - a.density()).norm() < 1e-12);
}

TEST_CASE("reorder round trip") {
  Rng rng(4);
  SubsystemLayout l;
  l.add_spin("a").add_spin("b").add_spin("c");
  QuantumState s = QuantumState::from_vector(l, bqc::testing::random_vector(8, rng));
  QuantumState r = reorder(reorder(s, {"c", "a", "b"}), {"a", "b", "c"});
  CHECK((r.vector() - s.vector()).norm() < 1e-12);
  QuantumState swapped = reorder(product({"a", "b"}, {"0", "1"}), {"b", "a"});
  CHECK(std::abs(state_fidelity(swapped, product({"b", "a"}, {"1", "0"})) - 1) < 1e-12);
}

TEST_CASE("pauli words and expectations") {
  Matrix xz = pauli("XZ").matrix;
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 2) = 1;
  expect(2, 0) = 1;
  expect(1, 3) = -1;
  expect(3, 1) = -1;
  CHECK((xz - expect).norm() < 1e-12);
  QuantumState s = product({"a", "b"}, {"+", "1"});
  CHECK(std::abs(expectation(s, pauli("XZ")) + 1) < 1e-12);
  CHECK(std::abs(expectation(s, pauli("Z"), {"b"}) + 1) < 1e-12);
  CHECK_THROWS(pauli("Q"));
}

TEST_CASE("fidelity with pure target") {
  QuantumState plus = spin_state("a", "+");
  QuantumState zero = spin_state("a", "0");
  CHECK(std::abs(state_fidelity(zero, plus) - 0.5) < 1e-12);
  CHECK(std::abs(state_fidelity(zero.scaled(0.3), plus) - 0.5) < 1e-12);  // normalized internally
  CHECK_THROWS(state_fidelity(plus, zero.as_density()));
}

TEST_CASE("clipped spectrum") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.02;
  m(1, 1) = -0.02;
  auto ev = clipped_spectrum(m);
  CHECK(std::abs(ev[0] + ev[1] - 1) < 1e-12);
  CHECK(std::min(ev[0], ev[1]) == 0);
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  CHECK_THROWS(clipped_spectrum(m));
}

TEST_CASE("embedding matches kronecker products") {
  SubsystemLayout l;
  l.add_spin("a").add_spin("b");
  Matrix full = Matrix(embed(l, gates::x(), {1}));
  Matrix expect = Matrix::Zero(4, 4);
  expect.block(0, 0, 2, 2) = gates::x();
  expect.block(2, 2, 2, 2) = gates::x();
  CHECK((full - expect).norm() < 1e-12);
}
