// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_QCORE_H_
#define BQC_QCORE_H_

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bqc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

// Occupation tuples over a set of bosonic modes. Tuples respect a per-mode
// cutoff and a cap on the total excitation number; the enumeration order is
// by total photon number, then lexicographic with mode 0 most significant.
class FockBasis {
 public:
  FockBasis(std::size_t modes, int per_mode_cutoff, int excitation_cap);

  std::size_t size() const { return states_.size(); }
  std::size_t modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  int cap() const { return cap_; }
  const std::vector<int>& occupation(std::size_t index) const { return states_[index]; }
  int total(std::size_t index) const;
  std::optional<std::size_t> index_of(std::span<const int> occupation) const;

 private:
  std::size_t modes_;
  int cutoff_;
  int cap_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

enum class SubsystemKind { kSpin, kRail };

struct Subsystem {
  std::string label;
  SubsystemKind kind = SubsystemKind::kSpin;
  std::size_t dim = 2;
  // Rail entries: the modes held by the register (a single-mode register is a
  // plain rail of dimension cutoff+1).
  std::vector<std::string> modes;
  std::shared_ptr<const FockBasis> fock;

  std::size_t mode_index(const std::string& mode) const;
};

class SubsystemLayout {
 public:
  SubsystemLayout() = default;

  SubsystemLayout& add_spin(const std::string& label);
  SubsystemLayout& add_rails(const std::string& label, std::vector<std::string> modes,
                             int per_mode_cutoff, int excitation_cap);
  SubsystemLayout& add(const Subsystem& entry);

  const std::vector<Subsystem>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const;
  bool contains(const std::string& label) const;
  std::size_t position(const std::string& label) const;
  const Subsystem& entry(const std::string& label) const { return entries_[position(label)]; }
  std::vector<std::string> labels() const;
  // Mixed-radix stride of an entry; the first entry is the most significant.
  std::size_t stride(std::size_t pos) const;

  bool operator==(const SubsystemLayout& other) const;

 private:
  std::vector<Subsystem> entries_;
};

class QuantumState {
 public:
  QuantumState() = default;
  static QuantumState from_vector(SubsystemLayout layout, Vector psi);
  static QuantumState from_density(SubsystemLayout layout, Matrix rho);
  // Computational basis product state; digits follow layout order.
  static QuantumState basis(SubsystemLayout layout, const std::vector<std::size_t>& digits);

  const SubsystemLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.dim(); }
  bool is_pure() const { return pure_; }
  const Vector& vector() const;
  const Matrix& density_ref() const;
  Matrix density() const;
  double trace_weight() const;

  QuantumState normalized() const;
  // Multiplies the trace weight by `factor`.
  QuantumState scaled(double factor) const;
  QuantumState as_density() const;

 private:
  SubsystemLayout layout_;
  bool pure_ = true;
  Vector psi_;
  Matrix rho_;
};

struct Observable {
  Matrix matrix;
  std::string label;
};

// Single-qubit states by name: "0", "1", "+", "-", "+i", "-i".
Vector qubit_state(const std::string& name);
QuantumState spin_state(const std::string& label, const std::string& name);
QuantumState spin_state(const std::string& label, const Vector& amplitudes);

QuantumState tensor(const QuantumState& a, const QuantumState& b);
QuantumState apply_unitary(const QuantumState& s, const Matrix& u,
                           const std::vector<std::string>& targets);
// Applies an arbitrary operator: rho -> O rho O^dagger, psi -> O psi.
QuantumState apply_operator(const QuantumState& s, const Matrix& op,
                            const std::vector<std::string>& targets);
QuantumState apply_kraus(const QuantumState& s, const std::vector<Matrix>& kraus,
                         const std::vector<std::string>& targets);
QuantumState partial_trace(const QuantumState& s, const std::vector<std::string>& keep);
// Reorders the subsystems so they follow `order` (a permutation of labels).
QuantumState reorder(const QuantumState& s, const std::vector<std::string>& order);

double expectation(const QuantumState& s, const Observable& o);
double expectation(const QuantumState& s, const Observable& o,
                   const std::vector<std::string>& targets);
double von_neumann_entropy(const QuantumState& s);
double von_neumann_entropy(const Matrix& rho);
double state_fidelity(const QuantumState& rho, const QuantumState& target);
double purity(const QuantumState& s);
Observable pauli(const std::string& word);

// Eigenvalues of a Hermitian matrix with negative values clipped to zero and
// the remainder rescaled to unit sum. Throws if any eigenvalue < -0.05.
std::vector<double> clipped_spectrum(const Matrix& rho);

// Embeds a local operator acting on `positions` into the full layout.
SparseMatrix embed(const SubsystemLayout& layout, const Matrix& op,
                   const std::vector<std::size_t>& positions);

bool is_unitary(const Matrix& u, double tol = 1e-10);

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bqc

#endif  // BQC_QCORE_H_
