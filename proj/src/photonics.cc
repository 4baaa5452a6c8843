// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/photonics.h"

#include <cmath>
#include <limits>
#include <map>

namespace bqc::photonics {

namespace {

constexpr double kTwoPiGHz = 2 * kPi * 1e9;

const Subsystem& rail_entry(const QuantumState& s, const std::string& reg) {
  const Subsystem& e = s.layout().entry(reg);
  if (e.kind != SubsystemKind::kRail) throw LayoutError(reg + " is not a rail register");
  return e;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

RailRegister RailRegister::time_bins(const std::string& label, std::size_t k, int n_max, int cap) {
  if (k != 1 && k != 2 && k != 4 && k != 8) throw LayoutError("time-bin registers hold 1, 2, 4 or 8 rails");
  RailRegister r;
  r.label = label;
  for (std::size_t j = 0; j < k; ++j) r.rails.push_back("b" + std::to_string(j));
  r.n_max = n_max;
  r.cap = cap;
  return r;
}

SubsystemLayout RailRegister::layout() const {
  SubsystemLayout l;
  l.add_rails(label, rails, n_max, cap);
  return l;
}

QuantumState make_wcs(const RailRegister& reg, const std::vector<cplx>& amplitudes, WcsInfo* info) {
  if (amplitudes.size() != reg.rails.size()) throw LayoutError("one amplitude per rail expected");
  SubsystemLayout layout = reg.layout();
  const FockBasis& fb = *layout.entries()[0].fock;
  double mu = 0;
  for (const auto& a : amplitudes) mu += std::norm(a);
  Vector psi(static_cast<Eigen::Index>(fb.size()));
  for (std::size_t i = 0; i < fb.size(); ++i) {
    cplx c = std::exp(-mu / 2);
    const auto& occ = fb.occupation(i);
    for (std::size_t j = 0; j < occ.size(); ++j) {
      c *= std::pow(amplitudes[j], occ[j]) / std::sqrt(factorial(occ[j]));
    }
    psi(static_cast<Eigen::Index>(i)) = c;
  }
  double kept = psi.squaredNorm();
  if (info) {
    info->mu = mu;
    info->discarded = 1 - kept;
    info->truncation_warning = info->discarded > 1e-3;
  }
  psi /= std::sqrt(kept);
  return QuantumState::from_vector(layout, psi);
}

QuantumState single_photon(const RailRegister& reg, const std::vector<cplx>& amplitudes) {
  if (amplitudes.size() != reg.rails.size()) throw LayoutError("one amplitude per rail expected");
  SubsystemLayout layout = reg.layout();
  const FockBasis& fb = *layout.entries()[0].fock;
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(fb.size()));
  std::vector<int> occ(reg.rails.size(), 0);
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    occ[j] = 1;
    auto idx = fb.index_of(occ);
    if (!idx) throw LayoutError("register cannot hold a photon");
    psi(static_cast<Eigen::Index>(*idx)) = amplitudes[j];
    occ[j] = 0;
  }
  double n = psi.norm();
  if (n == 0) throw std::invalid_argument("single photon needs a nonzero amplitude");
  return QuantumState::from_vector(layout, psi / n);
}

void CavityParams::validate() const {
  if (!(g >= 0 && kappa_in > 0 && kappa_tot > 0 && gamma > 0)) {
    throw std::invalid_argument("cavity rates must be positive");
  }
  if (kappa_in > kappa_tot) throw std::invalid_argument("kappa_in exceeds kappa_tot");
}

Scattering scattering(const CavityParams& p, double omega, bool spin_coupled) {
  const cplx i(0, 1);
  double g = spin_coupled ? p.g : 0.0;
  cplx emitter = i * (omega - p.omega_siv) + p.gamma;
  cplx den = i * (omega - p.omega_c) + p.kappa_tot + g * g / emitter;
  Scattering s;
  s.reflect = 1.0 - 2 * p.kappa_in / den;
  s.cavity_loss = -2 * std::sqrt(p.kappa_in * (p.kappa_tot - p.kappa_in)) / den;
  s.emitter_loss = 2.0 * i * g * std::sqrt(p.kappa_in * p.gamma) / (emitter * den);
  return s;
}

cplx reflection_coeff(const CavityParams& p, double omega, bool spin_coupled) {
  return scattering(p, omega, spin_coupled).reflect;
}

OperatingPoint calibrate_operating_point(const CavityParams& p, double min_mean_reflectivity,
                                         std::size_t samples) {
  p.validate();
  auto eval = [&](double w, OperatingPoint& op) {
    double rb = std::norm(reflection_coeff(p, w, true));
    double rd = std::norm(reflection_coeff(p, w, false));
    op.omega = w;
    op.mean_reflectivity = 0.5 * (rb + rd);
    op.contrast = rd > 0 ? rb / rd : std::numeric_limits<double>::infinity();
    return op.mean_reflectivity >= min_mean_reflectivity;
  };
  double lo = std::min(p.omega_c, p.omega_siv) - 5 * p.kappa_tot;
  double hi = std::max(p.omega_c, p.omega_siv) + 5 * p.kappa_tot;
  OperatingPoint best;
  best.contrast = -1;
  double step = (hi - lo) / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    OperatingPoint op;
    if (eval(lo + step * static_cast<double>(k), op) && op.contrast > best.contrast) best = op;
  }
  if (best.contrast < 0) throw std::runtime_error("no frequency meets the reflectivity floor");
  double center = best.omega;
  for (std::size_t k = 0; k <= 2000; ++k) {
    OperatingPoint op;
    double w = center - 2 * step + 4 * step * static_cast<double>(k) / 2000.0;
    if (eval(w, op) && op.contrast > best.contrast) best = op;
  }
  return best;
}

CavityParams reference_cavity() {
  CavityParams p;
  p.g = 8.4 * kTwoPiGHz;
  p.kappa_in = 12.0 * kTwoPiGHz;
  p.kappa_tot = 21.0 * kTwoPiGHz;
  p.gamma = 0.1 * kTwoPiGHz;
  p.omega_c = 2 * kPi * 406.6e12;
  p.omega_siv = p.omega_c + 3.5841 * kTwoPiGHz;
  return p;
}

SpinMirror SpinMirror::ideal() {
  SpinMirror m;
  m.spin[0] = Scattering{1.0, 0.0, 0.0};
  m.spin[1] = Scattering{0.0, 1.0, 0.0};
  return m;
}

SpinMirror SpinMirror::from_cavity(const CavityParams& p, double omega) {
  SpinMirror m;
  m.spin[0] = scattering(p, omega, true);
  m.spin[1] = scattering(p, omega, false);
  return m;
}

SpinMirror SpinMirror::with_contrast(double contrast) const {
  if (!(contrast > 0)) throw std::invalid_argument("contrast must be positive");
  SpinMirror m = *this;
  Scattering& d = m.spin[1];
  double rb = std::abs(spin[0].reflect);
  double target = std::isinf(contrast) ? 0.0 : rb / std::sqrt(contrast);
  double rd = std::abs(d.reflect);
  cplx phase = rd > 0 ? d.reflect / rd : cplx(1.0);
  if (target > 1.0) throw std::invalid_argument("contrast below 1 needs |r| > 1");
  d.reflect = target * phase;
  double loss = 1.0 - target * target - std::norm(d.emitter_loss);
  double cl = std::abs(d.cavity_loss);
  cplx lphase = cl > 0 ? d.cavity_loss / cl : cplx(1.0);
  d.cavity_loss = std::sqrt(std::max(0.0, loss)) * lphase;
  return m;
}

double SpinMirror::contrast() const {
  double rd = std::norm(spin[1].reflect);
  if (rd == 0) return std::numeric_limits<double>::infinity();
  return std::norm(spin[0].reflect) / rd;
}

double SpinMirror::mean_reflectivity() const {
  return 0.5 * (std::norm(spin[0].reflect) + std::norm(spin[1].reflect));
}

std::vector<Matrix> spin_reflection_kraus(const Subsystem& reg, std::size_t mode,
                                          const SpinMirror& mirror) {
  const FockBasis& fb = *reg.fock;
  const auto r = static_cast<Eigen::Index>(fb.size());
  std::vector<Matrix> out;
  for (int kl = 0; kl <= fb.cap(); ++kl) {
    for (int ks = 0; kl + ks <= fb.cap(); ++ks) {
      Matrix k = Matrix::Zero(2 * r, 2 * r);
      for (int sigma = 0; sigma < 2; ++sigma) {
        const Scattering& sc = mirror.spin[static_cast<std::size_t>(sigma)];
        for (std::size_t col = 0; col < fb.size(); ++col) {
          std::vector<int> occ = fb.occupation(col);
          int n = occ[mode];
          int lost = kl + ks;
          if (n < lost) continue;
          double comb = std::sqrt(factorial(n) / (factorial(n - lost) * factorial(kl) * factorial(ks)));
          cplx amp = comb * std::pow(sc.reflect, n - lost) * std::pow(sc.cavity_loss, kl) *
                     std::pow(sc.emitter_loss, ks);
          if (amp == cplx(0.0)) continue;
          occ[mode] = n - lost;
          auto row = fb.index_of(occ);
          k(sigma * r + static_cast<Eigen::Index>(*row), sigma * r + static_cast<Eigen::Index>(col)) = amp;
        }
      }
      if (k.cwiseAbs().maxCoeff() > 0) out.push_back(std::move(k));
    }
  }
  return out;
}

QuantumState spin_reflection(const QuantumState& s, const std::string& reg, const std::string& rail,
                             const std::string& spin, const SpinMirror& mirror) {
  const Subsystem& e = rail_entry(s, reg);
  if (s.layout().entry(spin).kind != SubsystemKind::kSpin) throw LayoutError(spin + " is not a spin");
  return apply_kraus(s, spin_reflection_kraus(e, e.mode_index(rail), mirror), {spin, reg});
}

QuantumState spin_reflection(const QuantumState& s, const std::string& reg, const std::string& rail,
                             const std::string& spin, const CavityParams& p, double omega) {
  return spin_reflection(s, reg, rail, spin, SpinMirror::from_cavity(p, omega));
}

SparseMatrix fock_transfer(const FockBasis& in, const FockBasis& out, const Matrix& modes) {
  if (static_cast<std::size_t>(modes.cols()) != in.modes() ||
      static_cast<std::size_t>(modes.rows()) != out.modes()) {
    throw LayoutError("mode map does not match Fock bases");
  }
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t col = 0; col < in.size(); ++col) {
    const auto& occ = in.occupation(col);
    std::map<std::vector<int>, cplx> terms;
    terms[std::vector<int>(out.modes(), 0)] = 1.0;
    double norm = 1;
    for (std::size_t j = 0; j < occ.size(); ++j) {
      norm *= factorial(occ[j]);
      for (int t = 0; t < occ[j]; ++t) {
        std::map<std::vector<int>, cplx> next;
        for (const auto& [tuple, amp] : terms) {
          for (Eigen::Index m = 0; m < modes.rows(); ++m) {
            cplx v = modes(m, static_cast<Eigen::Index>(j));
            if (v == cplx(0.0)) continue;
            std::vector<int> nt = tuple;
            nt[static_cast<std::size_t>(m)] += 1;
            next[nt] += amp * v * std::sqrt(static_cast<double>(nt[static_cast<std::size_t>(m)]));
          }
        }
        terms = std::move(next);
      }
    }
    double overflow = 0;
    for (const auto& [tuple, amp] : terms) {
      cplx a = amp / std::sqrt(norm);
      auto row = out.index_of(tuple);
      if (!row) {
        overflow += std::norm(a);
        continue;
      }
      if (std::abs(a) > 1e-15) {
        triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), a);
      }
    }
    if (overflow > 1e-9) throw TruncationError("amplitude leaves the photon-number cutoff");
  }
  SparseMatrix w(static_cast<Eigen::Index>(out.size()), static_cast<Eigen::Index>(in.size()));
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

Matrix beamsplitter_matrix(const Subsystem& reg, std::size_t a, std::size_t b, cplx r) {
  if (std::abs(r) > 1 + 1e-12) throw std::invalid_argument("|r| > 1");
  if (a == b) throw std::invalid_argument("beam splitter needs two distinct rails");
  const cplx i(0, 1);
  double t = std::sqrt(std::max(0.0, 1 - std::norm(r)));
  Matrix v = Matrix::Identity(static_cast<Eigen::Index>(reg.modes.size()),
                              static_cast<Eigen::Index>(reg.modes.size()));
  auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
  v(ia, ia) = r;
  v(ib, ia) = i * t;
  v(ia, ib) = i * t;
  v(ib, ib) = std::conj(r);
  return Matrix(fock_transfer(*reg.fock, *reg.fock, v));
}

QuantumState beamsplitter(const QuantumState& s, const std::string& reg, const std::string& a,
                          const std::string& b, cplx r) {
  const Subsystem& e = rail_entry(s, reg);
  return apply_operator(s, beamsplitter_matrix(e, e.mode_index(a), e.mode_index(b), r), {reg});
}

std::vector<Matrix> loss_kraus(const Subsystem& reg, std::size_t mode, double eta) {
  if (eta < 0 || eta > 1) throw std::invalid_argument("efficiency outside [0,1]");
  const FockBasis& fb = *reg.fock;
  const auto r = static_cast<Eigen::Index>(fb.size());
  std::vector<Matrix> out;
  for (int k = 0; k <= fb.cap(); ++k) {
    Matrix m = Matrix::Zero(r, r);
    for (std::size_t col = 0; col < fb.size(); ++col) {
      std::vector<int> occ = fb.occupation(col);
      int n = occ[mode];
      if (n < k) continue;
      double amp = std::sqrt(factorial(n) / (factorial(k) * factorial(n - k)) *
                             std::pow(eta, n - k) * std::pow(1 - eta, k));
      if (amp == 0) continue;
      occ[mode] = n - k;
      m(static_cast<Eigen::Index>(*fb.index_of(occ)), static_cast<Eigen::Index>(col)) = amp;
    }
    if (m.cwiseAbs().maxCoeff() > 0) out.push_back(std::move(m));
  }
  return out;
}

QuantumState loss(const QuantumState& s, const std::string& reg, const std::string& rail, double eta) {
  const Subsystem& e = rail_entry(s, reg);
  return apply_kraus(s, loss_kraus(e, e.mode_index(rail), eta), {reg});
}

Matrix phase_matrix(const Subsystem& reg, const std::vector<double>& phases) {
  if (phases.size() != reg.modes.size()) throw LayoutError("one phase per rail expected");
  const FockBasis& fb = *reg.fock;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(fb.size()), static_cast<Eigen::Index>(fb.size()));
  for (std::size_t i = 0; i < fb.size(); ++i) {
    double ph = 0;
    const auto& occ = fb.occupation(i);
    for (std::size_t j = 0; j < occ.size(); ++j) ph += occ[j] * phases[j];
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::polar(1.0, ph);
  }
  return m;
}

QuantumState qudit_phase(const QuantumState& s, const std::string& reg, const std::vector<double>& phis) {
  const Subsystem& e = rail_entry(s, reg);
  if (phis.size() + 1 != e.modes.size()) throw LayoutError("qudit_phase needs one phase per non-reference rail");
  std::vector<double> phases{0.0};
  phases.insert(phases.end(), phis.begin(), phis.end());
  return apply_operator(s, phase_matrix(e, phases), {reg});
}

bool TdiNetwork::heralding(int window) const { return pair_start(window) >= 0; }

int TdiNetwork::pair_start(int window) const {
  int d = settings.delay;
  int j = window - d;
  if (j < 0 || window >= static_cast<int>(rails)) return -1;
  return (j % (2 * d)) < d ? j : -1;
}

TdiNetwork tdi_network(std::size_t rails, const TdiSettings& settings) {
  int d = settings.delay;
  if (d < 1 || rails % static_cast<std::size_t>(2 * d) != 0) {
    throw std::invalid_argument("delay incompatible with rail count");
  }
  if (std::abs(settings.imbalance) >= 0.5) throw std::invalid_argument("imbalance must be below 1/2");
  TdiNetwork net;
  net.rails = rails;
  net.settings = settings;
  int windows = static_cast<int>(rails) + d;
  net.modes = Matrix::Zero(2 * windows, static_cast<Eigen::Index>(rails));
  for (int w = 0; w < windows; ++w) {
    net.outputs.push_back({w, 1});
    net.outputs.push_back({w, 2});
  }
  const double hs = std::sqrt(0.5);
  const double a = std::sqrt(0.5 + settings.imbalance);
  const double b = std::sqrt(0.5 - settings.imbalance);
  const cplx lock = std::polar(1.0, settings.lock_phase);
  for (int j = 0; j < static_cast<int>(rails); ++j) {
    // Short arm into window j, long arm into window j+d.
    net.modes(2 * j, j) += hs * a;
    net.modes(2 * j + 1, j) += hs * b;
    net.modes(2 * (j + d), j) += hs * b * lock;
    net.modes(2 * (j + d) + 1, j) += -hs * a * lock;
  }
  return net;
}

std::string tdi_mode_name(const TdiOutput& o) {
  return "w" + std::to_string(o.window) + ".D" + std::to_string(o.detector);
}

QuantumState tdi(const QuantumState& s, const std::string& reg, const TdiSettings& settings) {
  const Subsystem& e = rail_entry(s, reg);
  TdiNetwork net = tdi_network(e.modes.size(), settings);
  std::vector<std::string> names;
  for (const auto& o : net.outputs) names.push_back(tdi_mode_name(o));
  Subsystem outreg;
  outreg.label = e.label;
  outreg.kind = SubsystemKind::kRail;
  outreg.fock = std::make_shared<FockBasis>(names.size(), e.fock->cap(), e.fock->cap());
  outreg.dim = outreg.fock->size();
  outreg.modes = names;
  SparseMatrix w = fock_transfer(*e.fock, *outreg.fock, net.modes);

  // Move the register to the end, map it, then restore the order.
  std::vector<std::string> order;
  for (const auto& l : s.layout().labels()) {
    if (l != reg) order.push_back(l);
  }
  std::vector<std::string> original = s.layout().labels();
  order.push_back(reg);
  QuantumState moved = reorder(s, order);
  SubsystemLayout out_layout;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) out_layout.add(moved.layout().entry(order[i]));
  out_layout.add(outreg);
  std::size_t rest = moved.dim() / e.dim;
  SparseMatrix full(static_cast<Eigen::Index>(rest * outreg.dim), static_cast<Eigen::Index>(moved.dim()));
  {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int k = 0; k < w.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(w, k); it; ++it) {
        for (std::size_t q = 0; q < rest; ++q) {
          trip.emplace_back(static_cast<int>(q * outreg.dim + static_cast<std::size_t>(it.row())),
                            static_cast<int>(q * e.dim + static_cast<std::size_t>(it.col())), it.value());
        }
      }
    }
    full.setFromTriplets(trip.begin(), trip.end());
  }
  QuantumState mapped = moved.is_pure()
                            ? QuantumState::from_vector(out_layout, full * moved.vector())
                            : QuantumState::from_density(out_layout, Matrix(full * moved.density_ref() * full.adjoint()));
  return reorder(mapped, original);
}

}  // namespace bqc::photonics
