// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/dj.h"

#include <stdexcept>

namespace bqc::protocols {

bool dj_verdict_constant(int x_e2, int x_n1, int s) { return ((x_e2 ^ s) | x_n1) == 0; }

XDistribution x_distribution(const QuantumState& s) {
  if (s.layout().labels() != std::vector<std::string>{"e2", "n1"}) throw LayoutError("expected qubits e2, n1");
  Matrix hh = Matrix::Zero(4, 4);
  Matrix h = gates::h();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) hh.block(2 * i, 2 * j, 2, 2) = h(i, j) * h;
  }
  Matrix rho = s.normalized().density();
  Matrix rot = hh * rho * hh.adjoint();
  XDistribution d{};
  for (int k = 0; k < 4; ++k) d[static_cast<std::size_t>(k)] = std::max(0.0, rot(k, k).real());
  return d;
}

DjTally::DjTally(int oracle) : oracle_(oracle) {
  if (oracle < 1 || oracle > 4) throw std::invalid_argument("oracle index must be 1..4");
}

void DjTally::add(const ShotOutcome& shot) {
  const QuantumState target = dj_target(oracle_);
  const bool constant = dj_is_constant(oracle_);
  for (const auto& b : shot.branches) {
    if (b.weight <= 0) continue;
    XDistribution raw = x_distribution(b.raw);
    // Z on a qubit swaps its X outcomes; the frame holds the client's Zs.
    const int ze = b.frame.at("e2").z, zn = b.frame.at("n1").z;
    for (int k = 0; k < 4; ++k) {
      int xe = k >> 1, xn = k & 1;
      double p = b.weight * raw[static_cast<std::size_t>(k)];
      server_[static_cast<std::size_t>(k)] += p;
      int de = xe ^ ze, dn = xn ^ zn;
      client_[static_cast<std::size_t>(2 * de + dn)] += p;
      if (dj_verdict_constant(de, dn, 0) == constant) correct_ += p;
    }
    fid_ += b.weight * state_fidelity(b.client, target);
    weight_ += b.weight;
  }
}

double DjTally::fidelity() const { return weight_ > 0 ? fid_ / weight_ : 0; }
double DjTally::correct_verdict() const { return weight_ > 0 ? correct_ / weight_ : 0; }

XDistribution DjTally::server_outcomes() const {
  XDistribution d = server_;
  for (auto& v : d) v = weight_ > 0 ? v / weight_ : 0;
  return d;
}

XDistribution DjTally::client_outcomes() const {
  XDistribution d = client_;
  for (auto& v : d) v = weight_ > 0 ? v / weight_ : 0;
  return d;
}

}  // namespace bqc::protocols
