// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/frame.h"

namespace bqc {

void PauliFrame::add_x(const std::string& q, int bit) { exps_[q].x ^= (bit & 1); }

void PauliFrame::add_z(const std::string& q, int bit) { exps_[q].z ^= (bit & 1); }

PauliExponents PauliFrame::at(const std::string& q) const {
  auto it = exps_.find(q);
  return it == exps_.end() ? PauliExponents{} : it->second;
}

PauliFrame& PauliFrame::operator*=(const PauliFrame& other) {
  for (const auto& [q, e] : other.exps_) {
    add_x(q, e.x);
    add_z(q, e.z);
  }
  secret_bits.insert(secret_bits.end(), other.secret_bits.begin(), other.secret_bits.end());
  public_bits.insert(public_bits.end(), other.public_bits.begin(), other.public_bits.end());
  return *this;
}

bool PauliFrame::operator==(const PauliFrame& other) const {
  auto nonzero = [](const std::map<std::string, PauliExponents>& m) {
    std::map<std::string, PauliExponents> out;
    for (const auto& [q, e] : m) {
      if (e.x || e.z) out[q] = e;
    }
    return out;
  };
  return nonzero(exps_) == nonzero(other.exps_) && secret_bits == other.secret_bits &&
         public_bits == other.public_bits;
}

Matrix PauliFrame::correction(const std::string& q) const {
  PauliExponents e = at(q);
  Matrix m = Matrix::Identity(2, 2);
  // state = X^x Z^z psi, so psi = Z^z X^x state.
  if (e.x) m = pauli("X").matrix * m;
  if (e.z) m = pauli("Z").matrix * m;
  return m;
}

QuantumState PauliFrame::apply(const QuantumState& s) const {
  QuantumState out = s;
  for (const auto& [q, e] : exps_) {
    if (!(e.x || e.z) || !s.layout().contains(q)) continue;
    out = apply_unitary(out, correction(q), {q});
  }
  return out;
}

Propagated frame_propagate(const PauliFrame& frame, const GateOp& gate) {
  Propagated p{frame, gate.angle};
  auto need = [&](std::size_t n) {
    if (gate.qubits.size() != n) throw std::invalid_argument("wrong number of qubits for gate");
  };
  switch (gate.kind) {
    case GateKind::kRz: {
      need(1);
      // Rz(a) X = X Rz(-a); Z commutes.
      if (frame.at(gate.qubits[0]).x) p.angle = -gate.angle;
      break;
    }
    case GateKind::kRx: {
      need(1);
      if (frame.at(gate.qubits[0]).z) p.angle = -gate.angle;
      break;
    }
    case GateKind::kH: {
      need(1);
      PauliExponents e = frame.at(gate.qubits[0]);
      p.frame.add_x(gate.qubits[0], e.x ^ e.z);
      p.frame.add_z(gate.qubits[0], e.x ^ e.z);
      break;
    }
    case GateKind::kS: {
      need(1);
      // S X S^dag = Y ~ XZ.
      p.frame.add_z(gate.qubits[0], frame.at(gate.qubits[0]).x);
      break;
    }
    case GateKind::kCZ:
    case GateKind::kS1S2CZ: {
      need(2);
      const auto& a = gate.qubits[0];
      const auto& b = gate.qubits[1];
      int xa = frame.at(a).x, xb = frame.at(b).x;
      p.frame.add_z(b, xa);
      p.frame.add_z(a, xb);
      if (gate.kind == GateKind::kS1S2CZ) {
        p.frame.add_z(a, xa);
        p.frame.add_z(b, xb);
      }
      break;
    }
  }
  return p;
}

}  // namespace bqc
