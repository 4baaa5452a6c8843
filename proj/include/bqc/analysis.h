// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_ANALYSIS_H_
#define BQC_ANALYSIS_H_

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bqc/qcore.h"
#include "bqc/rng.h"

namespace bqc::analysis {

struct Expectation {
  double value = 0;  // in [-1, 1]
  long shots = 0;    // 0 means exact (no sampling noise)
};

// One row of an expectation table: a client choice, the outcome bits it was
// conditioned on, and Pauli-word expectations.
struct ExpectationRow {
  std::string choice;
  std::vector<int> outcome_bits;
  std::map<std::string, Expectation> values;
};

using ExpectationTable = std::vector<ExpectationRow>;

// All nontrivial Pauli words on n qubits ("X", ..., "ZZ").
std::vector<std::string> pauli_words(int qubits);
// Exact expectations of every nontrivial Pauli word of a normalized state.
ExpectationRow measure_expectations(const QuantumState& s, const std::string& choice = "",
                                    long shots = 0);

// rho = (I + sum <P> P) / d, with negative eigenvalues clipped to zero and
// the trace renormalized. Throws LayoutError when a word is missing and
// std::invalid_argument when an eigenvalue falls below -0.05.
QuantumState reconstruct_1q(const ExpectationRow& row, const std::string& label = "q");
QuantumState reconstruct_2q(const ExpectationRow& row, const std::string& a = "q1",
                            const std::string& b = "q2");

// Convex mixture; weights must be non-negative and sum to 1 within 1e-6.
QuantumState mix_over_outcomes(const std::vector<std::pair<double, QuantumState>>& branches);

// chi = S(sum w_i rho_i) - sum w_i S(rho_i) in bits; uniform weights when
// `weights` is empty.
double holevo(const std::vector<QuantumState>& states, const std::vector<double>& weights = {});
// Classical version over outcome distributions (rows need not be normalized).
double holevo_classical(const std::vector<std::vector<double>>& distributions,
                        const std::vector<double>& weights = {});

// Fidelity with a pure target given only Pauli expectations: (1/d) sum <P><P>_t.
double fidelity_from_expectations(const ExpectationRow& row, const ExpectationRow& target);

// Percentile interval (16th, 84th) of `statistic` over tables whose values
// are resampled binomially from their shot counts.
std::pair<double, double> bootstrap_uncertainty(const ExpectationTable& table,
                                                const std::function<double(const ExpectationTable&)>& statistic,
                                                int resamples, Rng& rng);

// Output populations in the computational basis for each input.
struct TruthTable {
  std::vector<std::string> inputs;
  std::vector<std::vector<double>> populations;  // rows sum to 1
  std::vector<double> fidelities;                // vs the ideal output of each input
  double mean_fidelity = 0;
};

}  // namespace bqc::analysis

#endif  // BQC_ANALYSIS_H_
