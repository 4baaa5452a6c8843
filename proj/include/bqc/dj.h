// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_DJ_H_
#define BQC_DJ_H_

#include <array>

#include "bqc/protocols.h"

namespace bqc::protocols {

// X-basis outcome order on (e2, n1): ++, +-, -+, --.
using XDistribution = std::array<double, 4>;

// Constant iff both decoded X outcomes are '+'. The client undoes its
// secret Z on e2 by flipping that outcome when s = 1.
bool dj_verdict_constant(int x_e2, int x_n1, int s);

// X-basis populations of a two-qubit state on (e2, n1), normalized.
XDistribution x_distribution(const QuantumState& s);

// Accumulates weighted DJ statistics over shots of one oracle.
class DjTally {
 public:
  explicit DjTally(int oracle);
  void add(const ShotOutcome& shot);

  double weight() const { return weight_; }
  // Fidelity of the decoded state with the oracle's target.
  double fidelity() const;
  double correct_verdict() const;
  // Outcome frequencies the server sees (raw) and the client decodes.
  XDistribution server_outcomes() const;
  XDistribution client_outcomes() const;

 private:
  int oracle_;
  double weight_ = 0, fid_ = 0, correct_ = 0;
  XDistribution server_{}, client_{};
};

}  // namespace bqc::protocols

#endif  // BQC_DJ_H_
