// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/gst.h"

#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace bqc::analysis {

namespace {

std::vector<Matrix> pauli_basis(int qubits) {
  std::vector<std::string> words{""};
  for (int q = 0; q < qubits; ++q) {
    std::vector<std::string> next;
    for (const auto& w : words) {
      for (char c : std::string("IXYZ")) next.push_back(w + c);
    }
    words = std::move(next);
  }
  std::vector<Matrix> out;
  for (const auto& w : words) out.push_back(pauli(w).matrix);
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

void check_qubits(int qubits) {
  if (qubits < 1 || qubits > 3) throw std::invalid_argument("tomography supports 1 to 3 qubits");
}

}  // namespace

std::vector<Matrix> tomography_inputs(int qubits) {
  check_qubits(qubits);
  std::vector<Matrix> single;
  for (const char* name : {"0", "1", "+", "+i"}) {
    Vector v = qubit_state(name);
    single.push_back(v * v.adjoint());
  }
  std::vector<Matrix> out{Matrix::Identity(1, 1)};
  for (int q = 0; q < qubits; ++q) {
    std::vector<Matrix> next;
    for (const auto& m : out) {
      for (const auto& s : single) next.push_back(kron(m, s));
    }
    out = std::move(next);
  }
  return out;
}

ChiMatrix chi_from_outputs(const std::vector<Matrix>& outputs, int qubits) {
  check_qubits(qubits);
  auto inputs = tomography_inputs(qubits);
  if (outputs.size() != inputs.size()) throw std::invalid_argument("one output per tomography input expected");
  auto basis = pauli_basis(qubits);
  const Eigen::Index d = 1 << qubits, d2 = d * d, n = d2 * d2;
  // Row (a, r, c) of the design matrix holds (P_i rho_a P_j)(r, c) for column (i, j).
  Matrix design(n, n);
  Vector rhs(n);
  for (Eigen::Index a = 0; a < d2; ++a) {
    const Matrix& out = outputs[static_cast<std::size_t>(a)];
    if (out.rows() != d || out.cols() != d) throw std::invalid_argument("output has the wrong dimension");
    for (Eigen::Index i = 0; i < d2; ++i) {
      Matrix left = basis[static_cast<std::size_t>(i)] * inputs[static_cast<std::size_t>(a)];
      for (Eigen::Index j = 0; j < d2; ++j) {
        Matrix term = left * basis[static_cast<std::size_t>(j)];
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index c = 0; c < d; ++c) design(a * d2 + r * d + c, i * d2 + j) = term(r, c);
        }
      }
    }
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) rhs(a * d2 + r * d + c) = out(r, c);
    }
  }
  Eigen::FullPivLU<Matrix> lu(design);
  if (lu.rank() < n) throw std::runtime_error("tomography design matrix is singular");
  Vector x = lu.solve(rhs);
  ChiMatrix chi{qubits, Matrix(d2, d2)};
  for (Eigen::Index i = 0; i < d2; ++i) {
    for (Eigen::Index j = 0; j < d2; ++j) chi.chi(i, j) = x(i * d2 + j);
  }
  return chi;
}

ChiMatrix gate_set_tomography(const ChannelFn& channel, int qubits) {
  std::vector<Matrix> outputs;
  for (const auto& rho : tomography_inputs(qubits)) outputs.push_back(channel(rho));
  return chi_from_outputs(outputs, qubits);
}

ChiMatrix chi_from_kraus(const std::vector<Matrix>& kraus, int qubits) {
  check_qubits(qubits);
  auto basis = pauli_basis(qubits);
  const Eigen::Index d = 1 << qubits, d2 = d * d;
  ChiMatrix chi{qubits, Matrix::Zero(d2, d2)};
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw std::invalid_argument("Kraus operator has the wrong dimension");
    Vector c(d2);
    for (Eigen::Index i = 0; i < d2; ++i) c(i) = (basis[static_cast<std::size_t>(i)].adjoint() * k).trace() / static_cast<double>(d);
    chi.chi += c * c.adjoint();
  }
  return chi;
}

ChiMatrix chi_from_unitary(const Matrix& u, int qubits) { return chi_from_kraus({u}, qubits); }

double average_from_process(double fp, int d) {
  return (static_cast<double>(d) * fp + 1) / (static_cast<double>(d) + 1);
}

std::pair<double, double> process_and_average_fidelity(const ChiMatrix& sim, const ChiMatrix& ideal) {
  if (sim.qubits != ideal.qubits) throw std::invalid_argument("chi matrices differ in size");
  double fp = (ideal.chi * sim.chi).trace().real();
  return {fp, average_from_process(fp, sim.dim())};
}

}  // namespace bqc::analysis
