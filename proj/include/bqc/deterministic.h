// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_DETERMINISTIC_H_
#define BQC_DETERMINISTIC_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "bqc/protocols.h"

namespace bqc::protocols {

// Memory-assisted operation: the probabilistic gate is retried on an
// ancilla until it heralds, then teleported into the memory qubit(s) with a
// CNOT and a Z measurement of the ancilla.

class RoundsExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeterministicBranch {
  QuantumState memory;  // raw memory state, unnormalized (trace = probability)
  PauliFrame frame;
  std::vector<int> teleport_bits;  // ancilla outcomes, one per round
  int rounds = 0;
  bool success = false;
};

struct DeterministicOutcome {
  std::vector<DeterministicBranch> branches;
  double success_probability = 0;
  // probability that round r (0-based) was the one that completed the gate
  std::vector<double> finish_round;
  // expected herald attempts: sum over rounds of P(reach round) / herald rate
  double expected_attempts = 0;
  // herald rate of one ancilla attempt (the first round's)
  double herald_rate = 0;

  double failure_probability() const { return 1 - success_probability; }
  // Frame-corrected memory state averaged over successful branches.
  QuantumState client_state() const;
  // Server view over all branches (no secret bits), normalized.
  QuantumState server_state() const;
};

// Enumerates every teleport outcome up to `max_rounds` in density-matrix
// mode. Round r uses angle 2^r phi: a failed round applies -theta, so the
// running total after k failures is -(2^k - 1) phi.
DeterministicOutcome deterministic_rz(const QuantumState& memory, const std::string& label, double phi,
                                      const NoiseConfig& noise, std::uint64_t seed, int max_rounds);

// One sampled run: teleport outcomes drawn from their exact probabilities,
// herald attempts drawn geometrically from the herald rate. Throws
// RoundsExhausted if no round succeeds within max_rounds.
struct SampledRun {
  int rounds = 0;
  long attempts = 0;
};
SampledRun sample_deterministic_rz(double herald_rate, int max_rounds, Rng& rng);

// Two-qubit variants on memories (m1, m2) with ancillas (a1, a2) in |+>.
// Intra: diag(1, e^{i phi}, e^{i phi}, 1); a teleport parity m1^m2 = 1
// turns phi into -phi, which the frame absorbs only for phi in {0, pi/2}
// (mod pi). Distributed: CZ^E, teleport leaves Z1^{E m2} Z2^{E m1}.
DeterministicOutcome deterministic_intra(const QuantumState& memories, double phi, const NoiseConfig& noise,
                                         std::uint64_t seed);
DeterministicOutcome deterministic_distributed(const QuantumState& memories, int entangle,
                                               const NoiseConfig& noise, std::uint64_t seed);

}  // namespace bqc::protocols

#endif  // BQC_DETERMINISTIC_H_
