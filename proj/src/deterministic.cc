// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/deterministic.h"

#include <cmath>

namespace bqc::protocols {

namespace {

// Moves the ancilla's pending Z onto its memory (CNOT memory -> ancilla
// copies Z from target to control) and clears it on the ancilla.
void transfer_z(PauliFrame& f, const std::string& ancilla, const std::string& memory) {
  int z = f.at(ancilla).z;
  f.add_z(memory, z);
  f.add_z(ancilla, z);
}

// Conditions every branch on the herald having happened (the ancilla is
// retried until it does) and returns the herald rate.
double condition_on_herald(Engine& eng, double before) {
  double after = eng.total_weight();
  if (after <= 0) throw std::runtime_error("ancilla gate never heralds");
  for (auto& b : eng.branches()) b.state = b.state.scaled(before / after);
  return after / before;
}

QuantumState sum_states(const std::vector<QuantumState>& states) {
  Matrix rho = states.front().density();
  for (std::size_t i = 1; i < states.size(); ++i) rho += states[i].density();
  return QuantumState::from_density(states.front().layout(), rho);
}

}  // namespace

QuantumState DeterministicOutcome::client_state() const {
  std::vector<QuantumState> parts;
  for (const auto& b : branches) {
    if (b.success && b.memory.trace_weight() > 0) parts.push_back(b.frame.apply(b.memory));
  }
  if (parts.empty()) throw std::logic_error("no successful branch");
  return sum_states(parts).normalized();
}

QuantumState DeterministicOutcome::server_state() const {
  std::vector<QuantumState> parts;
  for (const auto& b : branches) {
    if (b.memory.trace_weight() > 0) parts.push_back(b.memory);
  }
  if (parts.empty()) throw std::logic_error("no branches");
  return sum_states(parts).normalized();
}

DeterministicOutcome deterministic_rz(const QuantumState& memory, const std::string& label, double phi,
                                      const NoiseConfig& noise, std::uint64_t seed, int max_rounds) {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be positive");
  if (memory.layout().labels() != std::vector<std::string>{label}) throw LayoutError("memory must hold only " + label);
  const std::string anc = "a";
  DeterministicOutcome out;
  out.finish_round.assign(static_cast<std::size_t>(max_rounds), 0.0);

  std::vector<DeterministicBranch> pending{{memory.as_density(), {}, {}, 0, false}};
  double net = 0;  // rotation applied so far on every pending branch
  for (int r = 0; r < max_rounds && !pending.empty(); ++r) {
    const double theta = phi - net;
    std::vector<DeterministicBranch> next;
    for (auto& in : pending) {
      const double p_in = in.memory.trace_weight();
      if (p_in <= 0) continue;
      Engine eng(SimMode::kDensityMatrix, noise, Rng::for_shot(seed, static_cast<std::uint64_t>(r)));
      eng.start(in.memory);
      eng.branches()[0].frame = in.frame;
      eng.add_spin(anc, "+");
      blind_rz(eng, anc, theta);
      double rate = condition_on_herald(eng, p_in);
      if (r == 0 && out.herald_rate == 0) out.herald_rate = rate;
      out.expected_attempts += p_in / rate;
      eng.mw_cnot(label, anc);
      eng.measure(anc, [&](Branch& b, int k) {
        b.frame.public_bits.push_back(k);
        transfer_z(b.frame, anc, label);
        return true;
      });
      for (const auto& b : eng.branches()) {
        DeterministicBranch nb;
        nb.memory = partial_trace(b.state, {label});
        nb.frame = b.frame;
        nb.teleport_bits = in.teleport_bits;
        nb.teleport_bits.push_back(b.frame.public_bits.back());
        nb.rounds = r + 1;
        nb.success = nb.teleport_bits.back() == 0;
        if (nb.success) {
          out.success_probability += nb.memory.trace_weight();
          out.finish_round[static_cast<std::size_t>(r)] += nb.memory.trace_weight();
          out.branches.push_back(std::move(nb));
        } else {
          next.push_back(std::move(nb));
        }
      }
    }
    net -= theta;
    pending = std::move(next);
  }
  for (auto& b : pending) out.branches.push_back(std::move(b));
  return out;
}

SampledRun sample_deterministic_rz(double herald_rate, int max_rounds, Rng& rng) {
  if (!(herald_rate > 0 && herald_rate <= 1)) throw std::invalid_argument("herald rate must be in (0, 1]");
  SampledRun run;
  while (run.rounds < max_rounds) {
    ++run.rounds;
    do {
      ++run.attempts;
    } while (rng.uniform() >= herald_rate);
    // Either teleport outcome is equally likely for any memory state.
    if (rng.uniform() < 0.5) return run;
  }
  throw RoundsExhausted("no teleport round succeeded within " + std::to_string(max_rounds) + " rounds");
}

namespace {

DeterministicOutcome teleport_pair(const QuantumState& memories, const NoiseConfig& noise, std::uint64_t seed,
                                   const std::function<void(Engine&)>& gate,
                                   const std::function<void(PauliFrame&, int, int)>& fix) {
  const std::vector<std::string> mem{"m1", "m2"}, anc{"a1", "a2"};
  if (memories.layout().labels() != mem) throw LayoutError("memories must be labeled m1, m2");
  Engine eng(SimMode::kDensityMatrix, noise, Rng::for_shot(seed, 0));
  eng.start(memories);
  eng.add_spin(anc[0], "+");
  eng.add_spin(anc[1], "+");
  gate(eng);
  DeterministicOutcome out;
  out.herald_rate = condition_on_herald(eng, memories.trace_weight());
  out.expected_attempts = 1 / out.herald_rate;
  for (int i = 0; i < 2; ++i) eng.mw_cnot(mem[i], anc[i]);
  for (int i = 0; i < 2; ++i) {
    eng.measure(anc[i], [&](Branch& b, int k) {
      b.frame.public_bits.push_back(k);
      return true;
    });
  }
  for (auto& b : eng.branches()) {
    DeterministicBranch nb;
    nb.frame = b.frame;
    for (int i = 0; i < 2; ++i) transfer_z(nb.frame, anc[i], mem[i]);
    auto n = b.frame.public_bits.size();
    int k1 = b.frame.public_bits[n - 2], k2 = b.frame.public_bits[n - 1];
    fix(nb.frame, k1, k2);
    nb.teleport_bits = {k1, k2};
    nb.memory = partial_trace(b.state, mem);
    nb.rounds = 1;
    nb.success = true;
    out.success_probability += nb.memory.trace_weight();
    out.branches.push_back(std::move(nb));
  }
  out.finish_round = {out.success_probability};
  return out;
}

}  // namespace

DeterministicOutcome deterministic_intra(const QuantumState& memories, double phi, const NoiseConfig& noise,
                                         std::uint64_t seed) {
  double q = phi / (kPi / 2);
  if (std::abs(q - std::round(q)) > 1e-9) throw std::invalid_argument("teleported intra gate needs phi in multiples of pi/2");
  const bool odd = static_cast<long>(std::llround(q)) % 2 != 0;
  return teleport_pair(
      memories, noise, seed, [&](Engine& eng) { intra_2qbg(eng, "a1", "a2", phi); },
      [odd](PauliFrame& f, int k1, int k2) {
        // Parity phase seen through X^{k1} X^{k2}: phi -> -phi, i.e. an
        // extra Z1 Z2 when phi is an odd multiple of pi/2.
        if ((k1 ^ k2) && odd) {
          f.add_z("m1");
          f.add_z("m2");
        }
      });
}

DeterministicOutcome deterministic_distributed(const QuantumState& memories, int entangle,
                                               const NoiseConfig& noise, std::uint64_t seed) {
  const int e = entangle ? 1 : 0;
  return teleport_pair(
      memories, noise, seed, [&](Engine& eng) { distributed_2qbg(eng, "a2", "a1", "e1", e); },
      [e](PauliFrame& f, int k1, int k2) {
        f.add_z("m1", e * k2);
        f.add_z("m2", e * k1);
      });
}

}  // namespace bqc::protocols
