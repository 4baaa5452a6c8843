// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_FRAME_H_
#define BQC_FRAME_H_

#include <map>
#include <string>
#include <vector>

#include "bqc/qcore.h"

namespace bqc {

// Pending Pauli corrections: the physical state equals X^x Z^z applied to
// the logical one, per qubit, up to a global phase.
struct PauliExponents {
  int x = 0;
  int z = 0;
  bool operator==(const PauliExponents&) const = default;
};

class PauliFrame {
 public:
  void add_x(const std::string& q, int bit = 1);
  void add_z(const std::string& q, int bit = 1);
  PauliExponents at(const std::string& q) const;
  const std::map<std::string, PauliExponents>& exponents() const { return exps_; }

  // Composition: the result undoes `other` after `this`.
  PauliFrame& operator*=(const PauliFrame& other);
  bool operator==(const PauliFrame& other) const;

  // 2x2 operator that undoes the pending Pauli on one qubit.
  Matrix correction(const std::string& q) const;
  // Applies the corrections for every listed qubit present in the state.
  QuantumState apply(const QuantumState& s) const;

  std::vector<int> secret_bits;
  std::vector<int> public_bits;

 private:
  std::map<std::string, PauliExponents> exps_;
};

enum class GateKind { kRz, kRx, kH, kS, kCZ, kS1S2CZ };

struct GateOp {
  GateKind kind = GateKind::kRz;
  std::vector<std::string> qubits;
  double angle = 0;
};

struct Propagated {
  PauliFrame frame;
  double angle = 0;  // angle the server must use so the logical gate is applied
};

// Moves the pending frame past `gate`: U P = P' U' where U' differs from U
// only by the sign of its rotation angle.
Propagated frame_propagate(const PauliFrame& frame, const GateOp& gate);

}  // namespace bqc

#endif  // BQC_FRAME_H_
