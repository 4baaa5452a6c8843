// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/analysis.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bqc::analysis {

namespace {

double entropy_bits(const std::vector<double>& p) {
  double total = 0, s = 0;
  for (double v : p) total += std::max(0.0, v);
  if (total <= 0) return 0;
  for (double v : p) {
    double q = std::max(0.0, v) / total;
    if (q > 0) s -= q * std::log2(q);
  }
  return s;
}

std::vector<double> uniform_or(const std::vector<double>& w, std::size_t n) {
  if (w.empty()) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (w.size() != n) throw std::invalid_argument("one weight per state expected");
  double total = 0;
  for (double v : w) {
    if (v < 0) throw std::invalid_argument("negative weight");
    total += v;
  }
  if (total <= 0) throw std::invalid_argument("weights sum to zero");
  std::vector<double> out;
  for (double v : w) out.push_back(v / total);
  return out;
}

Matrix clip_psd(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -0.05) throw std::invalid_argument("reconstructed matrix is grossly unphysical");
  Eigen::VectorXd clipped = ev.cwiseMax(0.0);
  double total = clipped.sum();
  if (total <= 0) throw std::invalid_argument("reconstructed matrix has no positive part");
  clipped /= total;
  Matrix out = es.eigenvectors() * clipped.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

QuantumState reconstruct(const ExpectationRow& row, const SubsystemLayout& layout, int qubits) {
  auto d = static_cast<Eigen::Index>(1 << qubits);
  Matrix rho = Matrix::Identity(d, d);
  for (const auto& w : pauli_words(qubits)) {
    auto it = row.values.find(w);
    if (it == row.values.end()) throw LayoutError("missing Pauli word " + w);
    rho += it->second.value * pauli(w).matrix;
  }
  return QuantumState::from_density(layout, clip_psd(rho / static_cast<double>(d)));
}

}  // namespace

std::vector<std::string> pauli_words(int qubits) {
  std::vector<std::string> words{""};
  for (int q = 0; q < qubits; ++q) {
    std::vector<std::string> next;
    for (const auto& w : words) {
      for (char c : std::string("IXYZ")) next.push_back(w + c);
    }
    words = std::move(next);
  }
  words.erase(words.begin());  // all-identity
  return words;
}

ExpectationRow measure_expectations(const QuantumState& s, const std::string& choice, long shots) {
  int n = static_cast<int>(s.layout().size());
  for (const auto& e : s.layout().entries()) {
    if (e.dim != 2) throw LayoutError("expectations need qubit subsystems");
  }
  ExpectationRow row;
  row.choice = choice;
  for (const auto& w : pauli_words(n)) row.values[w] = {expectation(s, pauli(w)), shots};
  return row;
}

QuantumState reconstruct_1q(const ExpectationRow& row, const std::string& label) {
  SubsystemLayout l;
  l.add_spin(label);
  return reconstruct(row, l, 1);
}

QuantumState reconstruct_2q(const ExpectationRow& row, const std::string& a, const std::string& b) {
  SubsystemLayout l;
  l.add_spin(a).add_spin(b);
  return reconstruct(row, l, 2);
}

QuantumState mix_over_outcomes(const std::vector<std::pair<double, QuantumState>>& branches) {
  if (branches.empty()) throw std::invalid_argument("nothing to mix");
  double total = 0;
  for (const auto& [p, s] : branches) {
    if (p < 0) throw std::invalid_argument("negative weight");
    total += p;
  }
  if (std::abs(total - 1) > 1e-6) throw std::invalid_argument("weights must sum to 1");
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(branches[0].second.dim()),
                            static_cast<Eigen::Index>(branches[0].second.dim()));
  for (const auto& [p, s] : branches) {
    if (!(s.layout() == branches[0].second.layout())) throw LayoutError("mixed states must share a layout");
    rho += p * s.normalized().density();
  }
  return QuantumState::from_density(branches[0].second.layout(), rho);
}

double holevo(const std::vector<QuantumState>& states, const std::vector<double>& weights) {
  if (states.empty()) throw std::invalid_argument("holevo needs at least one state");
  auto w = uniform_or(weights, states.size());
  Matrix avg = Matrix::Zero(static_cast<Eigen::Index>(states[0].dim()), static_cast<Eigen::Index>(states[0].dim()));
  double inner = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(states[i].layout() == states[0].layout())) throw LayoutError("holevo states must share a layout");
    Matrix rho = states[i].normalized().density();
    avg += w[i] * rho;
    inner += w[i] * von_neumann_entropy(rho);
  }
  return std::max(0.0, von_neumann_entropy(avg) - inner);
}

double holevo_classical(const std::vector<std::vector<double>>& distributions, const std::vector<double>& weights) {
  if (distributions.empty()) throw std::invalid_argument("holevo needs at least one distribution");
  auto w = uniform_or(weights, distributions.size());
  std::size_t n = distributions[0].size();
  std::vector<double> avg(n, 0.0);
  double inner = 0;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    if (distributions[i].size() != n) throw std::invalid_argument("distributions differ in size");
    double total = 0;
    for (double v : distributions[i]) total += std::max(0.0, v);
    if (total <= 0) throw std::invalid_argument("empty distribution");
    for (std::size_t k = 0; k < n; ++k) avg[k] += w[i] * std::max(0.0, distributions[i][k]) / total;
    inner += w[i] * entropy_bits(distributions[i]);
  }
  return std::max(0.0, entropy_bits(avg) - inner);
}

double fidelity_from_expectations(const ExpectationRow& row, const ExpectationRow& target) {
  double acc = 1;
  int words = 0;
  for (const auto& [w, t] : target.values) {
    auto it = row.values.find(w);
    if (it == row.values.end()) throw LayoutError("missing Pauli word " + w);
    acc += it->second.value * t.value;
    ++words;
  }
  double d = std::sqrt(static_cast<double>(words + 1));
  return acc / d;
}

std::pair<double, double> bootstrap_uncertainty(const ExpectationTable& table,
                                                const std::function<double(const ExpectationTable&)>& statistic,
                                                int resamples, Rng& rng) {
  if (resamples < 1) throw std::invalid_argument("resamples must be positive");
  for (const auto& row : table) {
    for (const auto& [w, e] : row.values) {
      if (e.shots < 0) throw std::invalid_argument("negative shot count");
    }
  }
  std::vector<double> stats;
  for (int r = 0; r < resamples; ++r) {
    ExpectationTable t = table;
    for (auto& row : t) {
      for (auto& [w, e] : row.values) {
        if (e.shots == 0) continue;  // exact value
        double p = std::clamp((1 + e.value) / 2, 0.0, 1.0);
        std::binomial_distribution<long> bin(e.shots, p);
        e.value = 2.0 * static_cast<double>(bin(rng)) / static_cast<double>(e.shots) - 1;
      }
    }
    stats.push_back(statistic(t));
  }
  std::sort(stats.begin(), stats.end());
  auto pct = [&](double q) {
    double pos = q * static_cast<double>(stats.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(stats.size() - 1, lo + 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  return {pct(0.16), pct(0.84)};
}

}  // namespace bqc::analysis
