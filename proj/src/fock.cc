// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/qcore.h"

namespace bqc {

namespace {

void enumerate(std::size_t mode, int remaining, int cutoff, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (mode == current.size()) {
    if (remaining == 0) out.push_back(current);
    return;
  }
  for (int n = std::min(remaining, cutoff); n >= 0; --n) {
    current[mode] = n;
    enumerate(mode + 1, remaining - n, cutoff, current, out);
  }
  current[mode] = 0;
}

}  // namespace

FockBasis::FockBasis(std::size_t modes, int per_mode_cutoff, int excitation_cap)
    : modes_(modes), cutoff_(per_mode_cutoff), cap_(excitation_cap) {
  if (modes == 0) throw LayoutError("FockBasis needs at least one mode");
  if (per_mode_cutoff < 0 || excitation_cap < 0) throw LayoutError("negative Fock cutoff");
  std::vector<int> current(modes, 0);
  for (int total = 0; total <= excitation_cap; ++total) {
    std::vector<std::vector<int>> shell;
    enumerate(0, total, per_mode_cutoff, current, shell);
    for (auto& s : shell) states_.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_[states_[i]] = i;
}

int FockBasis::total(std::size_t index) const {
  int t = 0;
  for (int n : states_[index]) t += n;
  return t;
}

std::optional<std::size_t> FockBasis::index_of(std::span<const int> occupation) const {
  if (occupation.size() != modes_) return std::nullopt;
  auto it = lookup_.find(std::vector<int>(occupation.begin(), occupation.end()));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

}  // namespace bqc
