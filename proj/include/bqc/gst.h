// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_GST_H_
#define BQC_GST_H_

#include <functional>
#include <utility>
#include <vector>

#include "bqc/qcore.h"

namespace bqc::analysis {

// Process matrix in the unnormalized Pauli basis {I,X,Y,Z}^n (first qubit
// most significant): E(rho) = sum_ij chi_ij P_i rho P_j. A trace preserving
// channel has Tr chi = 1.
struct ChiMatrix {
  int qubits = 0;
  Matrix chi;

  int dim() const { return 1 << qubits; }
};

// Maps a normalized n-qubit density matrix to the channel's output.
using ChannelFn = std::function<Matrix(const Matrix&)>;

// Input states for tomography: products of {|0>,|1>,|+>,|+i>} in
// lexicographic order (first qubit most significant).
std::vector<Matrix> tomography_inputs(int qubits);

// Linear inversion from the outputs on tomography_inputs(qubits). Throws
// std::runtime_error if the design matrix is singular.
ChiMatrix chi_from_outputs(const std::vector<Matrix>& outputs, int qubits);
ChiMatrix gate_set_tomography(const ChannelFn& channel, int qubits);

// Analytic chi of a Kraus channel (and a unitary).
ChiMatrix chi_from_kraus(const std::vector<Matrix>& kraus, int qubits);
ChiMatrix chi_from_unitary(const Matrix& u, int qubits);

// F_p = Re Tr[chi_ideal chi_sim], F_ave = (d F_p + 1) / (d + 1).
std::pair<double, double> process_and_average_fidelity(const ChiMatrix& sim, const ChiMatrix& ideal);
double average_from_process(double fp, int d);

}  // namespace bqc::analysis

#endif  // BQC_GST_H_
