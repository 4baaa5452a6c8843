// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_PROTOCOLS_H_
#define BQC_PROTOCOLS_H_

#include <array>
#include <string>
#include <vector>

#include "bqc/server_ops.h"

namespace bqc::protocols {

// ---- Building blocks acting on an engine in place ----

// Emits a 2-bin photon into `reg` and entangles it with `spin`:
// a|0,up> + b|1,down> in the ideal limit.
void spg(Engine& eng, const std::string& spin, const std::string& reg = "g");

// SPG followed by the client's equatorial measurement. The client picks the
// basis so that Z^s Rz(phi) is applied, with phi's sign adjusted for a
// pending X in the frame; s is appended to the secret bits and the frame.
void blind_rz(Engine& eng, const std::string& spin, double phi);

// Rz(phi3) Rx(phi2) Rz(phi1) from three blind rotations and two Hadamards.
void one_qubit_blind_gate(Engine& eng, const std::string& spin, const std::array<double, 3>& phis);

// diag(1, e^{i phi}, e^{i phi}, 1) on (e, n), up to Z_e^s Z_n^s.
void intra_2qbg(Engine& eng, const std::string& e, const std::string& n, double phi);

// Server halves of the qudit carving gate acting on rails first..first+3.
void qube_server2(Engine& eng, const std::string& e2, const std::string& reg, int first = 0);
void qube_server1(Engine& eng, const std::string& e1, const std::string& reg, int first = 0);
// Full gate with a fresh 4-bin photon: server 2, link loss, server 1.
void qube(Engine& eng, const std::string& e1, const std::string& e2, const std::string& reg = "q");

// CZ^E on (e2, n1) using ancilla e1 (added here in |+>). The ancilla ends up
// measured; its outcome is public.
void distributed_2qbg(Engine& eng, const std::string& e2, const std::string& n1, const std::string& e1,
                      int entangle);

// Oracle 1..4 on computational qubits (e2, n1) with ancilla e1 (added here).
void dj_oracle(Engine& eng, const std::string& e2, const std::string& n1, const std::string& e1,
               int oracle);

// ---- Choice-level interface ----

enum class ProtocolKind { kRz, kOneQubit, kIntra, kDistributed, kDj, kCell };

struct GateChoice {
  ProtocolKind kind = ProtocolKind::kRz;
  // kRz: {phi}; kOneQubit: {phi1, phi2, phi3}; kIntra: {phi};
  // kCell: {a1, a2, a3, b1, b2, b3, phi}.
  std::vector<double> angles;
  int entangle = 1;  // kDistributed
  int oracle = 1;    // kDj

  std::string label() const;
};

GateChoice rz_choice(double phi);
GateChoice one_qubit_choice(double p1, double p2, double p3);
GateChoice intra_choice(double phi);
GateChoice distributed_choice(int entangle);
GateChoice dj_choice(int oracle);

std::string kind_name(ProtocolKind k);
ProtocolKind kind_from_name(const std::string& name);

// Data qubits the client cares about, in output order.
std::vector<std::string> data_labels(ProtocolKind k);
// Ideal unitary on the data qubits (not defined for kDj).
Matrix ideal_unitary(const GateChoice& c);
// Ideal output: U|in> or, for kDj, the oracle's target state.
QuantumState target_state(const GateChoice& c, const QuantumState& input);
// Fixed DJ targets on (e2, n1): O1 |-->, O2 |-+>, O3 |+->, O4 |++>.
QuantumState dj_target(int oracle);
bool dj_is_constant(int oracle);
// Heralds consumed per successful run.
int photon_budget(ProtocolKind k);

struct BranchResult {
  QuantumState raw;     // data qubits, uncorrected, unnormalized (trace = weight)
  QuantumState client;  // frame-corrected and normalized
  PauliFrame frame;
  std::vector<photonics::ClickRecord> clicks;
  double weight = 0;
};

struct ShotOutcome {
  std::vector<BranchResult> branches;
  double weight = 0;  // joint herald and post-selection probability (or importance weight)
  int heralds = 0;
  double wcs_discarded = 0;  // truncation loss of the emitted pulses
};

// One noise realization of a protocol on `input` (data qubits, in
// data_labels order).
ShotOutcome run_shot(const GateChoice& c, const QuantumState& input, const NoiseConfig& noise, SimMode mode,
                     Rng rng, double tdi_offset = 0);

// Server view of a shot: all branches summed, optionally only those with
// the given public bits. Unnormalized.
QuantumState server_view(const ShotOutcome& s, const std::vector<int>* public_bits = nullptr);

}  // namespace bqc::protocols

#endif  // BQC_PROTOCOLS_H_
