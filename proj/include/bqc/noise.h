// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_NOISE_H_
#define BQC_NOISE_H_

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bqc/photonics.h"
#include "bqc/rng.h"

namespace bqc {

enum class TdiErrorMode { kFixed, kGaussian };

struct NoiseConfig {
  // Mean photon number per photonic qubit/qudit. 0 selects an ideal single photon.
  double mu = 0;
  // |r_bright / r_dark|^2. Infinite contrast uses a perfect mirror (r = 1, 0).
  double contrast = std::numeric_limits<double>::infinity();
  double mw_fidelity = 1;
  // Radians. A fixed offset, or the standard deviation in Gaussian mode.
  double tdi_phase_err = 0;
  TdiErrorMode tdi_mode = TdiErrorMode::kFixed;
  double tdi_amp_imbalance = 0;
  // Random-walk step per shot (radians); 0 disables drift.
  double tdi_drift_step = 0;
  double tdi_drift_bound = 0.5;
  // Spin-to-detector efficiency, excluding the cavity reflectivity and the
  // interferometer's unused windows.
  double detection_eta = 1;
  // Photon transfer between the two servers.
  double link_eta = 1;

  void validate() const;
  bool ideal() const;
};

// Named parameter sets: ideal, rz-single, 1qbg, intra, internode, dj.
NoiseConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Per-output-mode threshold detector efficiency. The interferometer drops
// half of every bin into non-heralding windows, which the optics model keeps
// explicitly, so the lumped efficiency is doubled here (capped at 1).
double detector_efficiency(const NoiseConfig& cfg);

// Standard deviation of the angle error of a pi pulse whose average process
// fidelity is `fidelity`: E[cos^2(d/2)] = (1 + exp(-s^2/2)) / 2.
double mw_sigma(double fidelity);
// Rotation angle with a proportional Gaussian error; the relative error has
// standard deviation mw_sigma / pi.
double sample_mw_angle(double nominal, const NoiseConfig& cfg, Rng& rng);
// Monte Carlo estimate of the pi-pulse process fidelity for `draws` samples.
double mw_fidelity_mc(const NoiseConfig& cfg, std::size_t draws, Rng& rng);

// Scales r_bright into (r_bright, r_dark) with |r_bright/r_dark|^2 = contrast;
// the dark amplitude keeps the bright phase.
std::pair<cplx, cplx> contrast_reflectivities(double contrast, cplx r_bright);
// The spin-dependent mirror used by all servers.
photonics::SpinMirror server_mirror(const NoiseConfig& cfg);

struct TdiError {
  double phase = 0;
  double imbalance = 0;
};
TdiError tdi_error(const NoiseConfig& cfg, Rng& rng);
// Offsets for a sequence of shots when drift is enabled: a random walk
// clamped to +/- tdi_drift_bound, generated serially from `seed`.
std::vector<double> tdi_drift(const NoiseConfig& cfg, std::uint64_t seed, std::size_t shots);

// Probability that an equatorial readout reports the wrong outcome.
double tdi_readout_error(double phase);
// Preset labels quote the readout error in percent. The phase returned is
// negative (the lock lags); the conversion ignores the sign.
double tdi_phase_from_percent(double percent);
double tdi_percent_from_phase(double phase);

}  // namespace bqc

#endif  // BQC_NOISE_H_
