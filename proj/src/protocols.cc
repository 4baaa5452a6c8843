// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/protocols.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bqc::protocols {

namespace {

std::string rail(int j) { return "b" + std::to_string(j); }

photonics::ClickFilter accept_all() { return {}; }

// The last secret bit a click carries: 0 for the first detector.
int detector_bit(const photonics::ClickRecord& c) { return c.detector == 2 ? 1 : 0; }

void check_oracle(int oracle) {
  if (oracle < 1 || oracle > 4) throw std::invalid_argument("oracle index must be 1..4");
}

}  // namespace

void spg(Engine& eng, const std::string& spin, const std::string& reg) {
  eng.emit_photon(photonics::RailRegister::time_bins(reg, 2));
  eng.reflect(reg, "b0", spin);
  eng.mw_x(spin);
  eng.reflect(reg, "b1", spin);
  eng.mw_x(spin);
}

void blind_rz(Engine& eng, const std::string& spin, double phi) {
  const std::string reg = "g";
  spg(eng, spin, reg);
  eng.client_phase(reg, [&](const Branch& b) {
    double a = frame_propagate(b.frame, {GateKind::kRz, {spin}, phi}).angle;
    return std::vector<double>{0.0, a};
  });
  photonics::TdiSettings t = eng.tdi_settings(1);
  eng.herald(reg, [&](const Branch&) { return t; }, accept_all(),
             [&](Branch& b, const photonics::ClickRecord& c) {
               int s = detector_bit(c);
               b.frame.secret_bits.push_back(s);
               b.frame.add_z(spin, s);
             });
}

void one_qubit_blind_gate(Engine& eng, const std::string& spin, const std::array<double, 3>& phis) {
  auto hadamard = [&] {
    eng.mw_h(spin);
    for (auto& b : eng.branches()) b.frame = frame_propagate(b.frame, {GateKind::kH, {spin}, 0}).frame;
  };
  blind_rz(eng, spin, phis[0]);
  hadamard();
  blind_rz(eng, spin, phis[1]);
  hadamard();
  blind_rz(eng, spin, phis[2]);
}

void intra_2qbg(Engine& eng, const std::string& e, const std::string& n, double phi) {
  const std::string reg = "g";
  eng.mw_cnot(n, e);
  spg(eng, e, reg);
  eng.client_phase(reg, [&](const Branch& b) {
    bool flip = (b.frame.at(e).x ^ b.frame.at(n).x) != 0;
    return std::vector<double>{0.0, flip ? -phi : phi};
  });
  photonics::TdiSettings t = eng.tdi_settings(1);
  eng.herald(reg, [&](const Branch&) { return t; }, accept_all(),
             [&](Branch& b, const photonics::ClickRecord& c) {
               int s = detector_bit(c);
               b.frame.secret_bits.push_back(s);
               b.frame.add_z(e, s);
               b.frame.add_z(n, s);
             });
  eng.mw_cnot(n, e);
}

void qube_server2(Engine& eng, const std::string& e2, const std::string& reg, int first) {
  // Bins 0 and 3 see e2 as prepared, bins 1 and 2 see it flipped.
  eng.reflect(reg, rail(first), e2);
  eng.mw_x(e2);
  eng.reflect(reg, rail(first + 1), e2);
  eng.reflect(reg, rail(first + 2), e2);
  eng.mw_x(e2);
  eng.reflect(reg, rail(first + 3), e2);
}

void qube_server1(Engine& eng, const std::string& e1, const std::string& reg, int first) {
  // Bins 0 and 2 see e1 as prepared, bins 1 and 3 see it flipped.
  for (int j = 0; j < 4; ++j) {
    if (j > 0) eng.mw_x(e1);
    eng.reflect(reg, rail(first + j), e1);
  }
  eng.mw_x(e1);
}

void qube(Engine& eng, const std::string& e1, const std::string& e2, const std::string& reg) {
  eng.emit_photon(photonics::RailRegister::time_bins(reg, 4));
  qube_server2(eng, e2, reg);
  eng.link_loss(reg, eng.noise().link_eta);
  qube_server1(eng, e1, reg);
}

void distributed_2qbg(Engine& eng, const std::string& e2, const std::string& n1, const std::string& e1,
                      int entangle) {
  const std::string reg = "q";
  eng.add_spin(e1, "+");
  qube(eng, e1, e2, reg);
  // Short interferometer for E = 1 (pairs 0-1, 2-3); long one for E = 0
  // (pairs 0-2, 1-3) with kets |j> + i|j+2>.
  if (entangle == 0) {
    eng.client_phase(reg, [](const Branch&) { return std::vector<double>{0, 0, -kPi / 2, -kPi / 2}; });
  }
  photonics::TdiSettings t = eng.tdi_settings(entangle ? 1 : 2);
  eng.herald(reg, [&](const Branch&) { return t; }, accept_all(),
             [&](Branch& b, const photonics::ClickRecord& c) {
               b.frame.secret_bits.push_back(detector_bit(c));
               b.frame.secret_bits.push_back(c.bin_a == 0 ? 0 : 1);
             });
  // CZ(e1, n1) then a Y-basis readout of e1.
  eng.mw_h(e1);
  eng.mw_cnot(n1, e1);
  eng.mw_h(e1);
  eng.mw_x(e1, kPi / 2);
  eng.measure(e1, [&](Branch& b, int p) {
    b.frame.public_bits.push_back(p);
    int s1 = b.frame.secret_bits[b.frame.secret_bits.size() - 2];
    int s2 = b.frame.secret_bits.back();
    b.frame.add_z(e2, s1 ^ s2 ^ (entangle ? p : 0));
    b.frame.add_z(n1, s2);
    return true;
  });
  // Public phase correction, identical for both choices.
  eng.unitary(gates::s(), {e2});
}

void dj_oracle(Engine& eng, const std::string& e2, const std::string& n1, const std::string& e1, int oracle) {
  check_oracle(oracle);
  const std::string reg = "q";
  eng.add_spin(e1, "+");
  // One weak pulse per QUBE slot; the herald accepts a single click overall.
  eng.emit_photon(photonics::RailRegister::time_bins(reg, 8), 2);
  qube_server2(eng, e2, reg, 0);
  qube_server2(eng, e2, reg, 4);
  eng.link_loss(reg, eng.noise().link_eta);
  qube_server1(eng, e1, reg, 0);
  eng.mw_cnot(n1, e1);
  qube_server1(eng, e1, reg, 4);

  const bool short_tdi = oracle == 1 || oracle == 2;
  const bool first_slot = oracle == 1 || oracle == 3;
  photonics::TdiSettings t = eng.tdi_settings(short_tdi ? 1 : 2);
  auto accept = [first_slot](const photonics::ClickRecord& c) { return (c.bin_a < 4) == first_slot; };
  eng.herald(reg, [&](const Branch&) { return t; }, accept, [&](Branch& b, const photonics::ClickRecord& c) {
    int s = detector_bit(c);
    b.frame.secret_bits.push_back(s);
    b.frame.add_z(e2, s);
  });
  // X readout of the ancilla; keep |->.
  eng.mw_h(e1);
  eng.measure(e1, [](Branch& b, int k) {
    b.frame.public_bits.push_back(k);
    return k == 1;
  });
}

std::string kind_name(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::kRz: return "rz";
    case ProtocolKind::kOneQubit: return "1qbg";
    case ProtocolKind::kIntra: return "intra";
    case ProtocolKind::kDistributed: return "distributed";
    case ProtocolKind::kDj: return "dj";
    case ProtocolKind::kCell: return "cell";
  }
  return "?";
}

ProtocolKind kind_from_name(const std::string& name) {
  for (auto k : {ProtocolKind::kRz, ProtocolKind::kOneQubit, ProtocolKind::kIntra, ProtocolKind::kDistributed,
                 ProtocolKind::kDj, ProtocolKind::kCell}) {
    if (kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown protocol: " + name);
}

std::string GateChoice::label() const {
  std::ostringstream os;
  os << kind_name(kind);
  switch (kind) {
    case ProtocolKind::kDistributed: os << (entangle ? ":CZ" : ":I"); break;
    case ProtocolKind::kDj: os << ":O" << oracle; break;
    default:
      os << "(";
      for (std::size_t i = 0; i < angles.size(); ++i) os << (i ? "," : "") << angles[i];
      os << ")";
  }
  return os.str();
}

GateChoice rz_choice(double phi) { return {ProtocolKind::kRz, {phi}, 1, 1}; }
GateChoice one_qubit_choice(double p1, double p2, double p3) { return {ProtocolKind::kOneQubit, {p1, p2, p3}, 1, 1}; }
GateChoice intra_choice(double phi) { return {ProtocolKind::kIntra, {phi}, 1, 1}; }
GateChoice distributed_choice(int entangle) { return {ProtocolKind::kDistributed, {}, entangle ? 1 : 0, 1}; }
GateChoice dj_choice(int oracle) {
  check_oracle(oracle);
  return {ProtocolKind::kDj, {}, 1, oracle};
}

std::vector<std::string> data_labels(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::kRz:
    case ProtocolKind::kOneQubit: return {"e"};
    case ProtocolKind::kIntra:
    case ProtocolKind::kCell: return {"e", "n"};
    case ProtocolKind::kDistributed:
    case ProtocolKind::kDj: return {"e2", "n1"};
  }
  return {};
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return m;
}

Matrix parity_phase(double phi) {
  Matrix m = Matrix::Identity(4, 4);
  m(1, 1) = m(2, 2) = std::polar(1.0, phi);
  return m;
}

Matrix one_qubit(double p1, double p2, double p3) { return gates::rz(p3) * gates::rx(p2) * gates::rz(p1); }

void need_angles(const GateChoice& c, std::size_t n) {
  if (c.angles.size() != n) throw std::invalid_argument(kind_name(c.kind) + " needs " + std::to_string(n) + " angles");
}

}  // namespace

Matrix ideal_unitary(const GateChoice& c) {
  switch (c.kind) {
    case ProtocolKind::kRz: need_angles(c, 1); return gates::rz(c.angles[0]);
    case ProtocolKind::kOneQubit: need_angles(c, 3); return one_qubit(c.angles[0], c.angles[1], c.angles[2]);
    case ProtocolKind::kIntra: need_angles(c, 1); return parity_phase(c.angles[0]);
    case ProtocolKind::kDistributed: return c.entangle ? gates::cz() : Matrix(Matrix::Identity(4, 4));
    case ProtocolKind::kCell:
      need_angles(c, 7);
      return parity_phase(c.angles[6]) * kron(one_qubit(c.angles[0], c.angles[1], c.angles[2]),
                                              one_qubit(c.angles[3], c.angles[4], c.angles[5]));
    case ProtocolKind::kDj: break;
  }
  throw std::invalid_argument("no unitary for the DJ oracle");
}

QuantumState dj_target(int oracle) {
  check_oracle(oracle);
  const char* a[] = {"-", "-", "+", "+"};
  const char* b[] = {"-", "+", "-", "+"};
  return tensor(spin_state("e2", a[oracle - 1]), spin_state("n1", b[oracle - 1]));
}

bool dj_is_constant(int oracle) { return oracle == 4; }

QuantumState target_state(const GateChoice& c, const QuantumState& input) {
  if (c.kind == ProtocolKind::kDj) return dj_target(c.oracle);
  if (!input.is_pure()) throw std::invalid_argument("target needs a pure input");
  return QuantumState::from_vector(input.layout(), ideal_unitary(c) * input.vector().normalized());
}

int photon_budget(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::kRz: return 1;
    case ProtocolKind::kOneQubit: return 3;
    case ProtocolKind::kIntra: return 1;
    case ProtocolKind::kDistributed: return 1;
    case ProtocolKind::kDj: return 1;
    case ProtocolKind::kCell: return 7;
  }
  return 0;
}

ShotOutcome run_shot(const GateChoice& c, const QuantumState& input, const NoiseConfig& noise, SimMode mode, Rng rng,
                     double tdi_offset) {
  auto labels = data_labels(c.kind);
  if (input.layout().labels() != labels) throw LayoutError("input must hold the protocol's data qubits in order");
  Engine eng(mode, noise, rng);
  eng.set_tdi_offset(tdi_offset);
  eng.start(input);
  switch (c.kind) {
    case ProtocolKind::kRz: need_angles(c, 1); blind_rz(eng, "e", c.angles[0]); break;
    case ProtocolKind::kOneQubit:
      need_angles(c, 3);
      one_qubit_blind_gate(eng, "e", {c.angles[0], c.angles[1], c.angles[2]});
      break;
    case ProtocolKind::kIntra: need_angles(c, 1); intra_2qbg(eng, "e", "n", c.angles[0]); break;
    case ProtocolKind::kDistributed: distributed_2qbg(eng, "e2", "n1", "e1", c.entangle); break;
    case ProtocolKind::kDj: dj_oracle(eng, "e2", "n1", "e1", c.oracle); break;
    case ProtocolKind::kCell:
      need_angles(c, 7);
      one_qubit_blind_gate(eng, "e", {c.angles[0], c.angles[1], c.angles[2]});
      one_qubit_blind_gate(eng, "n", {c.angles[3], c.angles[4], c.angles[5]});
      intra_2qbg(eng, "e", "n", c.angles[6]);
      break;
  }
  ShotOutcome out;
  out.heralds = eng.stats().heralds;
  out.wcs_discarded = eng.stats().wcs_discarded;
  for (const auto& b : eng.branches()) {
    BranchResult r;
    r.raw = partial_trace(b.state, labels);
    r.weight = r.raw.trace_weight();
    if (r.weight <= 0) continue;
    r.client = b.frame.apply(r.raw).normalized();
    r.frame = b.frame;
    r.clicks = b.clicks;
    out.weight += r.weight;
    out.branches.push_back(std::move(r));
  }
  return out;
}

QuantumState server_view(const ShotOutcome& s, const std::vector<int>* public_bits) {
  Matrix sum;
  SubsystemLayout layout;
  for (const auto& b : s.branches) {
    if (public_bits && b.frame.public_bits != *public_bits) continue;
    if (sum.size() == 0) {
      sum = b.raw.density();
      layout = b.raw.layout();
    } else {
      sum += b.raw.density();
    }
  }
  if (sum.size() == 0) throw std::invalid_argument("no branches in the server view");
  return QuantumState::from_density(layout, sum);
}

}  // namespace bqc::protocols
