// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/qcore.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bqc {

namespace {

constexpr double kHermitianTol = 1e-8;

struct LocalIndex {
  std::size_t local_dim = 1;
  std::vector<std::size_t> offset;  // local index -> full-index contribution
  std::vector<std::size_t> local;   // full index -> local index
  std::vector<std::size_t> base;    // full index with the target digits zeroed
};

LocalIndex make_local_index(const SubsystemLayout& layout,
                            const std::vector<std::size_t>& positions) {
  LocalIndex li;
  std::vector<std::size_t> dims, strides;
  for (std::size_t p : positions) {
    dims.push_back(layout.entries()[p].dim);
    strides.push_back(layout.stride(p));
    li.local_dim *= dims.back();
  }
  li.offset.assign(li.local_dim, 0);
  for (std::size_t l = 0; l < li.local_dim; ++l) {
    std::size_t rem = l, off = 0;
    for (std::size_t j = positions.size(); j-- > 0;) {
      off += (rem % dims[j]) * strides[j];
      rem /= dims[j];
    }
    li.offset[l] = off;
  }
  std::size_t dim = layout.dim();
  li.local.resize(dim);
  li.base.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t loc = 0, removed = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      std::size_t digit = (i / strides[j]) % dims[j];
      loc = loc * dims[j] + digit;
      removed += digit * strides[j];
    }
    li.local[i] = loc;
    li.base[i] = i - removed;
  }
  return li;
}

std::vector<std::size_t> positions_of(const SubsystemLayout& layout,
                                      const std::vector<std::string>& targets) {
  std::vector<std::size_t> out;
  for (const auto& t : targets) {
    std::size_t p = layout.position(t);
    if (std::find(out.begin(), out.end(), p) != out.end()) {
      throw LayoutError("repeated target label: " + t);
    }
    out.push_back(p);
  }
  return out;
}

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

std::size_t Subsystem::mode_index(const std::string& mode) const {
  auto it = std::find(modes.begin(), modes.end(), mode);
  if (it == modes.end()) throw LayoutError("unknown rail '" + mode + "' in " + label);
  return static_cast<std::size_t>(it - modes.begin());
}

SubsystemLayout& SubsystemLayout::add_spin(const std::string& label) {
  Subsystem s;
  s.label = label;
  s.kind = SubsystemKind::kSpin;
  s.dim = 2;
  return add(s);
}

SubsystemLayout& SubsystemLayout::add_rails(const std::string& label,
                                            std::vector<std::string> modes,
                                            int per_mode_cutoff, int excitation_cap) {
  Subsystem s;
  s.label = label;
  s.kind = SubsystemKind::kRail;
  s.fock = std::make_shared<FockBasis>(modes.size(), per_mode_cutoff, excitation_cap);
  s.dim = s.fock->size();
  s.modes = std::move(modes);
  return add(s);
}

SubsystemLayout& SubsystemLayout::add(const Subsystem& entry) {
  if (contains(entry.label)) throw LayoutError("duplicate label: " + entry.label);
  if (entry.kind == SubsystemKind::kSpin && entry.dim != 2) {
    throw LayoutError("spin entries have dimension 2");
  }
  if (entry.kind == SubsystemKind::kRail && (!entry.fock || entry.fock->size() != entry.dim)) {
    throw LayoutError("rail entry without a matching Fock basis");
  }
  entries_.push_back(entry);
  return *this;
}

std::size_t SubsystemLayout::dim() const {
  std::size_t d = 1;
  for (const auto& e : entries_) d *= e.dim;
  return d;
}

bool SubsystemLayout::contains(const std::string& label) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Subsystem& e) { return e.label == label; });
}

std::size_t SubsystemLayout::position(const std::string& label) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label == label) return i;
  }
  throw LayoutError("unknown label: " + label);
}

std::vector<std::string> SubsystemLayout::labels() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.label);
  return out;
}

std::size_t SubsystemLayout::stride(std::size_t pos) const {
  std::size_t s = 1;
  for (std::size_t i = pos + 1; i < entries_.size(); ++i) s *= entries_[i].dim;
  return s;
}

bool SubsystemLayout::operator==(const SubsystemLayout& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.label != b.label || a.kind != b.kind || a.dim != b.dim || a.modes != b.modes) {
      return false;
    }
  }
  return true;
}

QuantumState QuantumState::from_vector(SubsystemLayout layout, Vector psi) {
  if (static_cast<std::size_t>(psi.size()) != layout.dim()) {
    throw LayoutError("state vector size does not match layout");
  }
  QuantumState s;
  s.layout_ = std::move(layout);
  s.pure_ = true;
  s.psi_ = std::move(psi);
  return s;
}

QuantumState QuantumState::from_density(SubsystemLayout layout, Matrix rho) {
  if (static_cast<std::size_t>(rho.rows()) != layout.dim() || rho.rows() != rho.cols()) {
    throw LayoutError("density matrix size does not match layout");
  }
  if (!is_hermitian(rho, kHermitianTol)) throw std::invalid_argument("density matrix is not Hermitian");
  QuantumState s;
  s.layout_ = std::move(layout);
  s.pure_ = false;
  s.rho_ = std::move(rho);
  return s;
}

QuantumState QuantumState::basis(SubsystemLayout layout, const std::vector<std::size_t>& digits) {
  if (digits.size() != layout.size()) throw LayoutError("basis digits do not match layout");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= layout.entries()[i].dim) throw LayoutError("basis digit out of range");
    idx += digits[i] * layout.stride(i);
  }
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.dim()));
  psi(static_cast<Eigen::Index>(idx)) = 1.0;
  return from_vector(std::move(layout), std::move(psi));
}

const Vector& QuantumState::vector() const {
  if (!pure_) throw std::logic_error("state is mixed");
  return psi_;
}

const Matrix& QuantumState::density_ref() const {
  if (pure_) throw std::logic_error("state is pure");
  return rho_;
}

Matrix QuantumState::density() const {
  if (pure_) return psi_ * psi_.adjoint();
  return rho_;
}

double QuantumState::trace_weight() const {
  if (pure_) return psi_.squaredNorm();
  return rho_.trace().real();
}

QuantumState QuantumState::normalized() const {
  double w = trace_weight();
  if (w <= 0) throw std::domain_error("cannot normalize a zero-weight state");
  return scaled(1.0 / w);
}

QuantumState QuantumState::scaled(double factor) const {
  QuantumState s = *this;
  if (factor < 0) throw std::domain_error("negative trace scaling");
  if (pure_) {
    s.psi_ *= std::sqrt(factor);
  } else {
    s.rho_ *= factor;
  }
  return s;
}

QuantumState QuantumState::as_density() const {
  if (!pure_) return *this;
  return from_density(layout_, density());
}

Vector qubit_state(const std::string& name) {
  const double h = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  Vector v(2);
  if (name == "0") {
    v << 1.0, 0.0;
  } else if (name == "1") {
    v << 0.0, 1.0;
  } else if (name == "+") {
    v << h, h;
  } else if (name == "-") {
    v << h, -h;
  } else if (name == "+i") {
    v << h, i * h;
  } else if (name == "-i") {
    v << h, -i * h;
  } else {
    throw std::invalid_argument("unknown qubit state name: " + name);
  }
  return v;
}

QuantumState spin_state(const std::string& label, const std::string& name) {
  return spin_state(label, qubit_state(name));
}

QuantumState spin_state(const std::string& label, const Vector& amplitudes) {
  SubsystemLayout l;
  l.add_spin(label);
  return QuantumState::from_vector(l, amplitudes);
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  SubsystemLayout layout = a.layout();
  for (const auto& e : b.layout().entries()) layout.add(e);
  if (a.is_pure() && b.is_pure()) {
    const Vector& va = a.vector();
    const Vector& vb = b.vector();
    Vector psi(va.size() * vb.size());
    for (Eigen::Index i = 0; i < va.size(); ++i) psi.segment(i * vb.size(), vb.size()) = va(i) * vb;
    return QuantumState::from_vector(layout, psi);
  }
  Matrix ra = a.density(), rb = b.density();
  Matrix rho(ra.rows() * rb.rows(), ra.cols() * rb.cols());
  for (Eigen::Index i = 0; i < ra.rows(); ++i) {
    for (Eigen::Index j = 0; j < ra.cols(); ++j) {
      rho.block(i * rb.rows(), j * rb.cols(), rb.rows(), rb.cols()) = ra(i, j) * rb;
    }
  }
  return QuantumState::from_density(layout, rho);
}

SparseMatrix embed(const SubsystemLayout& layout, const Matrix& op,
                   const std::vector<std::size_t>& positions) {
  LocalIndex li = make_local_index(layout, positions);
  if (static_cast<std::size_t>(op.rows()) != li.local_dim || op.rows() != op.cols()) {
    throw LayoutError("operator dimension does not match targets");
  }
  std::vector<std::vector<std::pair<std::size_t, cplx>>> rows(li.local_dim);
  for (std::size_t r = 0; r < li.local_dim; ++r) {
    for (std::size_t c = 0; c < li.local_dim; ++c) {
      cplx v = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v != cplx(0.0)) rows[r].emplace_back(c, v);
    }
  }
  std::vector<Eigen::Triplet<cplx>> triplets;
  std::size_t dim = layout.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    for (const auto& [c, v] : rows[li.local[i]]) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(li.base[i] + li.offset[c]), v);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

QuantumState apply_operator(const QuantumState& s, const Matrix& op,
                            const std::vector<std::string>& targets) {
  SparseMatrix e = embed(s.layout(), op, positions_of(s.layout(), targets));
  if (s.is_pure()) return QuantumState::from_vector(s.layout(), e * s.vector());
  Matrix tmp = e * s.density_ref();
  Matrix rho = tmp * e.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return QuantumState::from_density(s.layout(), std::move(rho));
}

QuantumState apply_unitary(const QuantumState& s, const Matrix& u,
                           const std::vector<std::string>& targets) {
  if (!is_unitary(u)) throw std::invalid_argument("apply_unitary: matrix is not unitary");
  return apply_operator(s, u, targets);
}

QuantumState apply_kraus(const QuantumState& s, const std::vector<Matrix>& kraus,
                         const std::vector<std::string>& targets) {
  if (kraus.empty()) throw std::invalid_argument("empty Kraus set");
  Matrix sum = Matrix::Zero(kraus[0].rows(), kraus[0].cols());
  for (const auto& k : kraus) sum += k.adjoint() * k;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sum + sum.adjoint()));
  if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9) {
    throw std::invalid_argument("Kraus set is trace-increasing");
  }
  if (s.is_pure() && kraus.size() == 1) return apply_operator(s, kraus[0], targets);
  auto pos = positions_of(s.layout(), targets);
  Matrix rho0 = s.density();
  Matrix out = Matrix::Zero(rho0.rows(), rho0.cols());
  for (const auto& k : kraus) {
    SparseMatrix e = embed(s.layout(), k, pos);
    Matrix tmp = e * rho0;
    out += tmp * e.adjoint();
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return QuantumState::from_density(s.layout(), std::move(out));
}

QuantumState partial_trace(const QuantumState& s, const std::vector<std::string>& keep) {
  if (keep.empty()) throw LayoutError("partial_trace needs at least one kept label");
  std::vector<std::size_t> kept = positions_of(s.layout(), keep);
  std::sort(kept.begin(), kept.end());
  SubsystemLayout out_layout;
  std::vector<std::size_t> traced;
  for (std::size_t p = 0; p < s.layout().size(); ++p) {
    if (std::binary_search(kept.begin(), kept.end(), p)) {
      out_layout.add(s.layout().entries()[p]);
    } else {
      traced.push_back(p);
    }
  }
  if (traced.empty()) return s;
  LocalIndex ki = make_local_index(s.layout(), kept);
  LocalIndex ti = make_local_index(s.layout(), traced);
  const auto kd = static_cast<Eigen::Index>(ki.local_dim);
  const auto td = static_cast<Eigen::Index>(ti.local_dim);
  if (s.is_pure()) {
    Matrix m(kd, td);
    const Vector& psi = s.vector();
    for (std::size_t i = 0; i < s.dim(); ++i) {
      m(static_cast<Eigen::Index>(ki.local[i]), static_cast<Eigen::Index>(ti.local[i])) =
          psi(static_cast<Eigen::Index>(i));
    }
    return QuantumState::from_density(out_layout, m * m.adjoint());
  }
  // Group full indices by traced digit; each group is ordered by kept index.
  std::vector<std::vector<Eigen::Index>> groups(ti.local_dim,
                                                std::vector<Eigen::Index>(ki.local_dim));
  for (std::size_t i = 0; i < s.dim(); ++i) {
    groups[ti.local[i]][ki.local[i]] = static_cast<Eigen::Index>(i);
  }
  const Matrix& rho = s.density_ref();
  Matrix out = Matrix::Zero(kd, kd);
  for (const auto& g : groups) out += rho(g, g);
  return QuantumState::from_density(out_layout, std::move(out));
}

QuantumState reorder(const QuantumState& s, const std::vector<std::string>& order) {
  if (order.size() != s.layout().size()) throw LayoutError("reorder needs every label");
  std::vector<std::size_t> pos = positions_of(s.layout(), order);
  SubsystemLayout out_layout;
  for (std::size_t p : pos) out_layout.add(s.layout().entries()[p]);
  LocalIndex li = make_local_index(s.layout(), pos);
  // li.local[i] is the index of full index i in the new ordering.
  std::vector<Eigen::Index> perm(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) perm[li.local[i]] = static_cast<Eigen::Index>(i);
  if (s.is_pure()) return QuantumState::from_vector(out_layout, s.vector()(perm));
  return QuantumState::from_density(out_layout, s.density_ref()(perm, perm));
}

double expectation(const QuantumState& s, const Observable& o) {
  if (static_cast<std::size_t>(o.matrix.rows()) != s.dim()) {
    throw LayoutError("observable dimension does not match state");
  }
  double w = s.trace_weight();
  if (w <= 0) throw std::domain_error("expectation of a zero-trace state");
  if (s.is_pure()) return (s.vector().adjoint() * o.matrix * s.vector())(0, 0).real() / w;
  return (s.density_ref() * o.matrix).trace().real() / w;
}

double expectation(const QuantumState& s, const Observable& o,
                   const std::vector<std::string>& targets) {
  double w = s.trace_weight();
  if (w <= 0) throw std::domain_error("expectation of a zero-trace state");
  SparseMatrix e = embed(s.layout(), o.matrix, positions_of(s.layout(), targets));
  if (s.is_pure()) return (s.vector().adjoint() * (e * s.vector()))(0, 0).real() / w;
  Matrix prod = e * s.density_ref();
  return prod.trace().real() / w;
}

std::vector<double> clipped_spectrum(const Matrix& rho) {
  if (!is_hermitian(rho, kHermitianTol)) throw std::invalid_argument("matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double tr = ev.sum();
  if (tr <= 0) throw std::domain_error("non-positive trace");
  std::vector<double> out;
  double total = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = ev(i) / tr;
    if (v < -0.05) throw std::domain_error("grossly unphysical density matrix");
    out.push_back(std::max(0.0, v));
    total += out.back();
  }
  for (double& v : out) v /= total;
  return out;
}

double von_neumann_entropy(const Matrix& rho) {
  double s = 0;
  for (double p : clipped_spectrum(rho)) {
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return std::max(0.0, s);
}

double von_neumann_entropy(const QuantumState& s) {
  if (s.is_pure()) return 0.0;
  return von_neumann_entropy(s.density_ref());
}

double state_fidelity(const QuantumState& rho, const QuantumState& target) {
  if (!target.is_pure()) throw std::invalid_argument("fidelity target must be pure");
  if (!(rho.layout() == target.layout())) throw LayoutError("fidelity layouts differ");
  Vector t = target.vector() / std::sqrt(target.trace_weight());
  double w = rho.trace_weight();
  if (w <= 0) throw std::domain_error("fidelity of a zero-trace state");
  double f;
  if (rho.is_pure()) {
    f = std::norm(t.dot(rho.vector())) / w;
  } else {
    f = (t.adjoint() * rho.density_ref() * t)(0, 0).real() / w;
  }
  return std::clamp(f, 0.0, 1.0);
}

double purity(const QuantumState& s) {
  if (s.is_pure()) return 1.0;
  Matrix r = s.density_ref() / s.trace_weight();
  return (r * r).trace().real();
}

Observable pauli(const std::string& word) {
  if (word.empty()) throw std::invalid_argument("empty Pauli word");
  const cplx i(0.0, 1.0);
  Matrix out = Matrix::Identity(1, 1);
  for (char c : word) {
    Matrix p(2, 2);
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, -i, i, 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default: throw std::invalid_argument(std::string("bad Pauli character: ") + c);
    }
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c2 = 0; c2 < out.cols(); ++c2) {
        next.block(r * 2, c2 * 2, 2, 2) = out(r, c2) * p;
      }
    }
    out = std::move(next);
  }
  return Observable{out, word};
}

}  // namespace bqc
