// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/noise.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

namespace {

NoiseConfig noisy(double mu, double tdi_phase) {
  NoiseConfig c;
  c.mu = mu;
  c.contrast = 28;
  c.mw_fidelity = 0.99;
  c.tdi_phase_err = tdi_phase;
  c.detection_eta = 0.057;
  c.link_eta = 0.012;
  return c;
}

}  // namespace

void NoiseConfig::validate() const {
  auto in01 = [](double v) { return v >= 0 && v <= 1; };
  if (!(mu >= 0) || mu > 1) throw std::invalid_argument("mu must lie in [0, 1]");
  if (!(contrast >= 1)) throw std::invalid_argument("contrast must be >= 1");
  if (!(mw_fidelity > 0.5) || mw_fidelity > 1) throw std::invalid_argument("mw_fidelity must lie in (0.5, 1]");
  if (!in01(detection_eta) || !in01(link_eta)) throw std::invalid_argument("efficiencies must lie in [0, 1]");
  if (std::abs(tdi_amp_imbalance) >= 0.5) throw std::invalid_argument("tdi_amp_imbalance must be below 0.5");
  if (tdi_drift_step < 0 || tdi_drift_bound < 0) throw std::invalid_argument("drift parameters must be >= 0");
  if (!std::isfinite(tdi_phase_err)) throw std::invalid_argument("tdi_phase_err must be finite");
}

bool NoiseConfig::ideal() const {
  return mu == 0 && std::isinf(contrast) && mw_fidelity == 1 && tdi_phase_err == 0 &&
         tdi_amp_imbalance == 0 && tdi_drift_step == 0 && detection_eta == 1 && link_eta == 1;
}

NoiseConfig preset(const std::string& name) {
  if (name == "ideal") return NoiseConfig{};
  if (name == "rz-single") return noisy(0.05, tdi_phase_from_percent(1.6));
  if (name == "1qbg") return noisy(0.2, tdi_phase_from_percent(6.4));
  if (name == "intra") return noisy(0.25, tdi_phase_from_percent(6.4));
  if (name == "internode") return noisy(0.07, tdi_phase_from_percent(6.4));
  if (name == "dj") return noisy(0.25, tdi_phase_from_percent(6.4));
  throw std::invalid_argument("unknown noise preset: " + name);
}

std::vector<std::string> preset_names() { return {"ideal", "rz-single", "1qbg", "intra", "internode", "dj"}; }

double detector_efficiency(const NoiseConfig& cfg) { return std::min(1.0, cfg.detection_eta / 0.5); }

double mw_sigma(double fidelity) {
  if (fidelity >= 1) return 0;
  if (fidelity <= 0.5) throw std::invalid_argument("fidelity must exceed 0.5");
  return std::sqrt(-2 * std::log(2 * fidelity - 1));
}

double sample_mw_angle(double nominal, const NoiseConfig& cfg, Rng& rng) {
  double s = mw_sigma(cfg.mw_fidelity);
  if (s == 0) return nominal;
  return nominal * (1 + rng.normal(0, s / kPi));
}

double mw_fidelity_mc(const NoiseConfig& cfg, std::size_t draws, Rng& rng) {
  // Process fidelity of R_x(pi + d) against R_x(pi) is cos^2(d/2).
  double acc = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    double d = sample_mw_angle(kPi, cfg, rng) - kPi;
    acc += std::pow(std::cos(d / 2), 2);
  }
  return acc / static_cast<double>(draws);
}

std::pair<cplx, cplx> contrast_reflectivities(double contrast, cplx r_bright) {
  if (!(contrast >= 1)) throw std::invalid_argument("contrast must be >= 1");
  if (std::isinf(contrast)) return {r_bright, 0.0};
  return {r_bright, r_bright / std::sqrt(contrast)};
}

photonics::SpinMirror server_mirror(const NoiseConfig& cfg) {
  if (std::isinf(cfg.contrast)) return photonics::SpinMirror::ideal();
  static const photonics::SpinMirror calibrated = [] {
    auto p = photonics::reference_cavity();
    return photonics::SpinMirror::from_cavity(p, photonics::calibrate_operating_point(p).omega);
  }();
  return calibrated.with_contrast(cfg.contrast);
}

TdiError tdi_error(const NoiseConfig& cfg, Rng& rng) {
  TdiError e;
  e.imbalance = cfg.tdi_amp_imbalance;
  if (cfg.tdi_mode == TdiErrorMode::kFixed) {
    e.phase = cfg.tdi_phase_err;
  } else if (cfg.tdi_phase_err != 0) {
    e.phase = rng.normal(0, std::abs(cfg.tdi_phase_err));
  }
  return e;
}

std::vector<double> tdi_drift(const NoiseConfig& cfg, std::uint64_t seed, std::size_t shots) {
  std::vector<double> out(shots, 0.0);
  if (cfg.tdi_drift_step == 0) return out;
  Rng rng(hash_combine(seed, 0x7d1f));
  double x = 0;
  for (std::size_t i = 0; i < shots; ++i) {
    x = std::clamp(x + rng.normal(0, cfg.tdi_drift_step), -cfg.tdi_drift_bound, cfg.tdi_drift_bound);
    out[i] = x;
  }
  return out;
}

double tdi_phase_from_percent(double percent) {
  if (percent < 0 || percent > 100) throw std::invalid_argument("percent must be in [0, 100]");
  return -2 * std::asin(std::sqrt(percent / 100.0));
}

double tdi_percent_from_phase(double phase) { return 100.0 * tdi_readout_error(phase); }

double tdi_readout_error(double phase) { return std::pow(std::sin(phase / 2), 2); }

}  // namespace bqc
