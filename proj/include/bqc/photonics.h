// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_PHOTONICS_H_
#define BQC_PHOTONICS_H_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "bqc/qcore.h"
#include "bqc/rng.h"

namespace bqc::photonics {

// Time bins of one photonic qubit/qudit held as a single capped Fock register.
struct RailRegister {
  std::string label = "g";
  std::vector<std::string> rails;
  int n_max = 2;
  int cap = 2;

  // Rails named b0..b{k-1}; k must be 1, 2, 4 or 8.
  static RailRegister time_bins(const std::string& label, std::size_t k, int n_max = 2,
                                int cap = 2);
  SubsystemLayout layout() const;
};

struct WcsInfo {
  double mu = 0;
  double discarded = 0;  // probability lost to truncation before renormalization
  bool truncation_warning = false;
};

// Product of coherent states with the given per-rail amplitudes, truncated to
// the register basis and renormalized.
QuantumState make_wcs(const RailRegister& reg, const std::vector<cplx>& amplitudes,
                      WcsInfo* info = nullptr);
// Exactly one photon in the normalized superposition of rails given by `amplitudes`.
QuantumState single_photon(const RailRegister& reg, const std::vector<cplx>& amplitudes);

struct CavityParams {
  double g = 0;
  double kappa_in = 0;
  double kappa_tot = 0;
  double gamma = 0;
  double omega_c = 0;
  double omega_siv = 0;

  double cooperativity() const { return 4 * g * g / (kappa_tot * gamma); }
  void validate() const;
};

// Output amplitudes for one input photon: reflected back into the rail, lost
// through the cavity's intrinsic loss port, or scattered by the emitter.
struct Scattering {
  cplx reflect;
  cplx cavity_loss;
  cplx emitter_loss;
};

cplx reflection_coeff(const CavityParams& p, double omega, bool spin_coupled);
Scattering scattering(const CavityParams& p, double omega, bool spin_coupled);

struct OperatingPoint {
  double omega = 0;
  double contrast = 0;
  double mean_reflectivity = 0;
};

// Scans the probe frequency and returns the point of largest contrast whose
// spin-averaged reflectivity is at least `min_mean_reflectivity`.
OperatingPoint calibrate_operating_point(const CavityParams& p, double min_mean_reflectivity = 0.35,
                                         std::size_t samples = 200001);

// SiV-like parameters (angular frequencies in rad/s) whose calibrated point
// has contrast 28 at a mean reflectivity of 0.35.
CavityParams reference_cavity();

// Per-spin scattering of a time bin; index 0 is the reflective spin state.
struct SpinMirror {
  std::array<Scattering, 2> spin;

  static SpinMirror ideal();
  static SpinMirror from_cavity(const CavityParams& p, double omega);
  // Rescales the non-reflective state so |r_0/r_1|^2 = contrast (infinite
  // contrast gives r_1 = 0); the removed amplitude goes to the loss port.
  SpinMirror with_contrast(double contrast) const;
  double contrast() const;
  double mean_reflectivity() const;
};

std::vector<Matrix> spin_reflection_kraus(const Subsystem& reg, std::size_t mode,
                                          const SpinMirror& mirror);
QuantumState spin_reflection(const QuantumState& s, const std::string& reg,
                             const std::string& rail, const std::string& spin,
                             const SpinMirror& mirror);
QuantumState spin_reflection(const QuantumState& s, const std::string& reg,
                             const std::string& rail, const std::string& spin,
                             const CavityParams& p, double omega);

// Mode transformation a^dag -> r a^dag + i t b^dag, b^dag -> i t a^dag + conj(r) b^dag.
Matrix beamsplitter_matrix(const Subsystem& reg, std::size_t a, std::size_t b, cplx r);
QuantumState beamsplitter(const QuantumState& s, const std::string& reg, const std::string& a,
                          const std::string& b, cplx r);

std::vector<Matrix> loss_kraus(const Subsystem& reg, std::size_t mode, double eta);
QuantumState loss(const QuantumState& s, const std::string& reg, const std::string& rail,
                  double eta);

// Phase per rail (rail 0 included); multi-photon components pick up n*phase.
Matrix phase_matrix(const Subsystem& reg, const std::vector<double>& phases);
// phis[j] is applied to rail j+1; rail 0 is the reference.
QuantumState qudit_phase(const QuantumState& s, const std::string& reg,
                         const std::vector<double>& phis);

// Fock-space representation of a linear mode map. `modes` is out x in with
// column j holding the output amplitudes of input mode j. Throws
// TruncationError if amplitude above 1e-9 leaves the output basis.
SparseMatrix fock_transfer(const FockBasis& in, const FockBasis& out, const Matrix& modes);

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unbalanced interferometer with a delay of `delay` bins followed by two
// detectors. Output window w collects bin w through the short arm and bin
// w-delay through the long arm. Windows fed by a pair (j, j+delay) with
// j mod 2*delay < delay are the heralding windows; the rest are basis-state
// (edge) or cross-pair windows and are rejected.
struct TdiSettings {
  int delay = 1;
  double lock_phase = 0;
  double imbalance = 0;  // second beam splitter ratio 1/2 +/- imbalance
};

struct TdiOutput {
  int window = 0;
  int detector = 1;  // 1 or 2
};

struct TdiNetwork {
  std::size_t rails = 0;
  TdiSettings settings;
  Matrix modes;  // outputs x rails
  std::vector<TdiOutput> outputs;

  int windows() const { return static_cast<int>(rails) + settings.delay; }
  bool heralding(int window) const;
  // Earlier bin of the pair feeding a window, or -1 if the window is an edge.
  int pair_start(int window) const;
};

TdiNetwork tdi_network(std::size_t rails, const TdiSettings& settings);
std::string tdi_mode_name(const TdiOutput& o);
// Replaces register `reg` by the detector-side register (same label).
QuantumState tdi(const QuantumState& s, const std::string& reg, const TdiSettings& settings);

struct DetectorModel {
  double efficiency = 1.0;  // per output mode, threshold response
};

struct ClickRecord {
  int detector = 0;  // 1 or 2; 0 when there was no click
  int window = -1;
  int bin_a = -1;
  int bin_b = -1;
  bool interfered = false;
  double phase_applied = 0;
};

enum class DetectionKind { kHerald, kNoClick, kMultiClick, kRejectedWindow };

struct HeraldBranch {
  ClickRecord click;
  QuantumState state;  // unnormalized; photonic register traced out
};

struct DetectionSummary {
  std::vector<HeraldBranch> heralds;
  double p_herald = 0;
  double p_no_click = 0;
  double p_multi_click = 0;
  double p_rejected_window = 0;
};

// Heralds for which the filter returns false are counted as rejected windows.
using ClickFilter = std::function<bool(const ClickRecord&)>;

// Exact resolution of all click outcomes after sending register `reg`
// through `net` to threshold detectors.
DetectionSummary resolve_detection(const QuantumState& s, const std::string& reg,
                                   const TdiNetwork& net, const DetectorModel& model,
                                   const ClickFilter& accept = {});

struct SampledDetection {
  DetectionKind kind = DetectionKind::kNoClick;
  ClickRecord click;
  QuantumState state;  // normalized
  double herald_probability = 0;
};

// Samples a single outcome with its natural probability.
SampledDetection detect(const QuantumState& s, const std::string& reg, const TdiNetwork& net,
                        const DetectorModel& model, Rng& rng, const ClickFilter& accept = {});
// Samples an outcome conditioned on a herald; herald_probability carries the
// importance weight. kind is kNoClick when the herald probability vanishes.
SampledDetection sample_heralded(const QuantumState& s, const std::string& reg,
                                 const TdiNetwork& net, const DetectorModel& model, Rng& rng,
                                 const ClickFilter& accept = {});

}  // namespace bqc::photonics

#endif  // BQC_PHOTONICS_H_
