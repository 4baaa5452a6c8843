// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/server_ops.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace bqc {

namespace gates {

namespace {
const cplx kI(0, 1);
}

Matrix x() { return pauli("X").matrix; }
Matrix z() { return pauli("Z").matrix; }

Matrix h() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

Matrix s() { return rz(kPi / 2); }

Matrix rz(double phi) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return m;
}

Matrix rx(double theta) {
  return std::cos(theta / 2) * Matrix::Identity(2, 2) - kI * std::sin(theta / 2) * x();
}

Matrix rh(double theta) {
  return std::cos(theta / 2) * Matrix::Identity(2, 2) - kI * std::sin(theta / 2) * h();
}

Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

Matrix cnot() { return controlled(x()); }

Matrix controlled(const Matrix& u) {
  Matrix m = Matrix::Zero(4, 4);
  m.block(0, 0, 2, 2) = Matrix::Identity(2, 2);
  m.block(2, 2, 2, 2) = u;
  return m;
}

}  // namespace gates

Engine::Engine(SimMode mode, const NoiseConfig& cfg, Rng rng)
    : mode_(mode), cfg_(cfg), rng_(rng), mirror_(server_mirror(cfg)) {
  cfg_.validate();
  detector_.efficiency = detector_efficiency(cfg);
}

void Engine::start(const QuantumState& spins) {
  branches_.clear();
  stats_ = {};
  Branch b;
  b.state = mode_ == SimMode::kDensityMatrix ? spins.as_density() : spins;
  branches_.push_back(std::move(b));
}

void Engine::add_spin(const std::string& label, const std::string& state) {
  QuantumState q = spin_state(label, state);
  if (mode_ == SimMode::kDensityMatrix) q = q.as_density();
  for (auto& b : branches_) b.state = tensor(b.state, q);
}

photonics::TdiSettings Engine::tdi_settings(int delay) {
  TdiError err = tdi_error(cfg_, rng_);
  photonics::TdiSettings t;
  t.delay = delay;
  t.lock_phase = err.phase + tdi_offset_;
  t.imbalance = err.imbalance;
  return t;
}

void Engine::unitary(const Matrix& u, const std::vector<std::string>& targets) {
  for (auto& b : branches_) b.state = apply_unitary(b.state, u, targets);
}

void Engine::mw_x(const std::string& spin, double theta) {
  unitary(gates::rx(sample_mw_angle(theta, cfg_, rng_)), {spin});
}

void Engine::mw_h(const std::string& spin) { unitary(gates::rh(sample_mw_angle(kPi, cfg_, rng_)), {spin}); }

void Engine::mw_cnot(const std::string& control, const std::string& target) {
  Matrix u = cplx(0, 1) * gates::rx(sample_mw_angle(kPi, cfg_, rng_));
  unitary(gates::controlled(u), {control, target});
}

void Engine::measure(const std::string& spin, const std::function<bool(Branch&, int)>& on_outcome) {
  std::array<Matrix, 2> proj{Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  proj[0](0, 0) = 1;
  proj[1](1, 1) = 1;
  std::vector<Branch> next;
  for (auto& b : branches_) {
    double w = b.state.trace_weight();
    std::array<QuantumState, 2> parts{apply_operator(b.state, proj[0], {spin}),
                                      apply_operator(b.state, proj[1], {spin})};
    auto keep = [&](Branch nb, int k) {
      if (on_outcome(nb, k)) {
        next.push_back(std::move(nb));
      } else {
        stats_.rejected += nb.state.trace_weight();
      }
    };
    if (mode_ == SimMode::kDensityMatrix) {
      for (int k = 0; k < 2; ++k) {
        if (parts[k].trace_weight() <= 1e-300) continue;
        keep(Branch{parts[k], b.frame, b.clicks}, k);
      }
    } else {
      double p0 = parts[0].trace_weight() / w;
      int k = rng_.uniform() < p0 ? 0 : 1;
      double pk = k == 0 ? p0 : 1 - p0;
      if (pk <= 0) continue;
      keep(Branch{parts[k].scaled(1 / pk), b.frame, b.clicks}, k);
    }
  }
  branches_ = std::move(next);
}

void Engine::emit_photon(const photonics::RailRegister& reg, int pulses) {
  std::size_t k = reg.rails.size();
  if (pulses < 1 || k % static_cast<std::size_t>(pulses) != 0) throw std::invalid_argument("pulses must divide the rails");
  QuantumState photon;
  if (cfg_.mu > 0) {
    double per_rail = cfg_.mu * pulses / static_cast<double>(k);
    photonics::WcsInfo info;
    photon = photonics::make_wcs(reg, std::vector<cplx>(k, std::sqrt(per_rail)), &info);
    stats_.wcs_discarded = std::max(stats_.wcs_discarded, info.discarded);
  } else {
    photon = photonics::single_photon(reg, std::vector<cplx>(k, 1.0));
  }
  if (mode_ == SimMode::kDensityMatrix) photon = photon.as_density();
  for (auto& b : branches_) b.state = tensor(b.state, photon);
}

void Engine::reflect(const std::string& reg, const std::string& rail, const std::string& spin) {
  if (branches_.empty()) return;
  const Subsystem& e = branches_.front().state.layout().entry(reg);
  apply_channel(photonics::spin_reflection_kraus(e, e.mode_index(rail), mirror_), {spin, reg});
}

void Engine::link_loss(const std::string& reg, double eta) {
  if (branches_.empty() || eta == 1) return;
  const Subsystem e = branches_.front().state.layout().entry(reg);  // copy: states are replaced below
  for (std::size_t m = 0; m < e.modes.size(); ++m) apply_channel(photonics::loss_kraus(e, m, eta), {reg});
}

void Engine::client_phase(const std::string& reg,
                          const std::function<std::vector<double>(const Branch&)>& phases) {
  for (auto& b : branches_) {
    const Subsystem& e = b.state.layout().entry(reg);
    b.state = apply_operator(b.state, photonics::phase_matrix(e, phases(b)), {reg});
  }
}

void Engine::herald(const std::string& reg,
                    const std::function<photonics::TdiSettings(const Branch&)>& settings,
                    const photonics::ClickFilter& accept,
                    const std::function<void(Branch&, const photonics::ClickRecord&)>& on_click) {
  ++stats_.heralds;
  std::vector<Branch> next;
  for (auto& b : branches_) {
    const Subsystem& e = b.state.layout().entry(reg);
    photonics::TdiNetwork net = photonics::tdi_network(e.modes.size(), settings(b));
    if (mode_ == SimMode::kDensityMatrix) {
      auto summary = photonics::resolve_detection(b.state, reg, net, detector_, accept);
      for (auto& h : summary.heralds) {
        Branch nb{std::move(h.state), b.frame, b.clicks};
        nb.clicks.push_back(h.click);
        on_click(nb, h.click);
        next.push_back(std::move(nb));
      }
    } else {
      double w = b.state.trace_weight();
      auto sd = photonics::sample_heralded(b.state, reg, net, detector_, rng_, accept);
      if (sd.kind != photonics::DetectionKind::kHerald) continue;
      Branch nb{sd.state.scaled(w * sd.herald_probability / sd.state.trace_weight()), b.frame, b.clicks};
      nb.clicks.push_back(sd.click);
      on_click(nb, sd.click);
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
}

QuantumState Engine::mixture() const {
  if (branches_.empty()) throw std::logic_error("no surviving branches");
  Matrix sum = branches_.front().state.density();
  for (std::size_t i = 1; i < branches_.size(); ++i) sum += branches_[i].state.density();
  return QuantumState::from_density(branches_.front().state.layout(), sum);
}

double Engine::total_weight() const {
  double w = 0;
  for (const auto& b : branches_) w += b.state.trace_weight();
  return w;
}

void Engine::apply_channel(const std::vector<Matrix>& kraus, const std::vector<std::string>& targets) {
  for (auto& b : branches_) {
    b.state = mode_ == SimMode::kDensityMatrix ? apply_kraus(b.state, kraus, targets)
                                               : sample_kraus(b.state, kraus, targets);
  }
}

QuantumState Engine::sample_kraus(const QuantumState& s, const std::vector<Matrix>& kraus,
                                  const std::vector<std::string>& targets) {
  std::vector<QuantumState> outs;
  std::vector<double> p;
  double total = 0;
  for (const auto& k : kraus) {
    outs.push_back(apply_operator(s, k, targets));
    p.push_back(outs.back().trace_weight());
    total += p.back();
  }
  // The branch keeps the pre-channel weight times the retained fraction.
  double u = rng_.uniform() * total;
  std::size_t pick = outs.size() - 1;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    u -= p[i];
    if (u < 0) {
      pick = i;
      break;
    }
  }
  if (p[pick] <= 0) return s.scaled(0);
  return outs[pick].scaled(total / p[pick]);
}

}  // namespace bqc
