// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_SERVER_OPS_H_
#define BQC_SERVER_OPS_H_

#include <functional>
#include <string>
#include <vector>

#include "bqc/frame.h"
#include "bqc/noise.h"
#include "bqc/photonics.h"
#include "bqc/qcore.h"
#include "bqc/rng.h"

namespace bqc {

namespace gates {
Matrix x();
Matrix z();
Matrix h();
Matrix s();
Matrix rz(double phi);     // diag(1, e^{i phi})
Matrix rx(double theta);   // exp(-i theta X / 2)
// Rotation by theta about the (x+z)/sqrt(2) axis; theta = pi gives -i*H.
Matrix rh(double theta);
Matrix cz();
Matrix cnot();             // first qubit controls
// Two-qubit operator from a control qubit: |0><0| x I + |1><1| x u.
Matrix controlled(const Matrix& u);
}  // namespace gates

enum class SimMode { kDensityMatrix, kTrajectory };

// One surviving measurement history of a shot. The state is unnormalized:
// its trace is the probability (or, for trajectories, the importance weight)
// of this history including every herald so far.
struct Branch {
  QuantumState state;
  PauliFrame frame;
  std::vector<photonics::ClickRecord> clicks;
};

struct EngineStats {
  int heralds = 0;      // photons that had to be heralded
  double rejected = 0;  // weight removed by measurement post-selection
  double wcs_discarded = 0;  // largest truncation loss of an emitted pulse
};

// Executes a server/client sequence for one shot, either exactly over all
// click and measurement outcomes (density-matrix mode) or by sampling them
// with importance weights (trajectory mode). MW errors are drawn once per
// pulse per shot.
class Engine {
 public:
  Engine(SimMode mode, const NoiseConfig& cfg, Rng rng);

  SimMode mode() const { return mode_; }
  const NoiseConfig& noise() const { return cfg_; }
  Rng& rng() { return rng_; }
  std::vector<Branch>& branches() { return branches_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const EngineStats& stats() const { return stats_; }
  bool alive() const { return !branches_.empty(); }

  void start(const QuantumState& spins);
  // Appends a fresh spin to every branch.
  void add_spin(const std::string& label, const std::string& state);
  // Constant offset added to every interferometer lock (slow drift).
  void set_tdi_offset(double phase) { tdi_offset_ = phase; }
  // Client interferometer settings for this photon, with its phase error drawn.
  photonics::TdiSettings tdi_settings(int delay);

  // Ideal operations (virtual or assumed perfect).
  void unitary(const Matrix& u, const std::vector<std::string>& targets);
  // Noisy microwave operations; the error is sampled once and shared by branches.
  void mw_x(const std::string& spin, double theta = kPi);
  void mw_h(const std::string& spin);
  // CNOT realized as i*R_x(pi) on `target` conditioned on `control` = 1.
  void mw_cnot(const std::string& control, const std::string& target);
  // Z-basis projective measurement. `on_outcome` may record bits or adjust
  // the frame; returning false discards that branch (post-selection).
  void measure(const std::string& spin, const std::function<bool(Branch&, int)>& on_outcome);

  // Photon handling. The register label must not already be in use.
  // `pulses` independent weak pulses share the rails evenly, each with the
  // configured mean photon number.
  void emit_photon(const photonics::RailRegister& reg, int pulses = 1);
  void reflect(const std::string& reg, const std::string& rail, const std::string& spin);
  void link_loss(const std::string& reg, double eta);
  // Client phase shift on the register, per branch.
  void client_phase(const std::string& reg, const std::function<std::vector<double>(const Branch&)>& phases);
  // Client interferometer and detection; only heralds passing `accept` survive.
  // `on_click` receives each surviving branch with its click.
  void herald(const std::string& reg, const std::function<photonics::TdiSettings(const Branch&)>& settings,
              const photonics::ClickFilter& accept,
              const std::function<void(Branch&, const photonics::ClickRecord&)>& on_click);

  // Sum of all branch states (the server's view when it lacks the client bits).
  QuantumState mixture() const;
  double total_weight() const;

 private:
  void apply_channel(const std::vector<Matrix>& kraus, const std::vector<std::string>& targets);
  QuantumState sample_kraus(const QuantumState& s, const std::vector<Matrix>& kraus,
                            const std::vector<std::string>& targets);

  SimMode mode_;
  NoiseConfig cfg_;
  Rng rng_;
  photonics::SpinMirror mirror_;
  photonics::DetectorModel detector_;
  std::vector<Branch> branches_;
  EngineStats stats_;
  double tdi_offset_ = 0;
};

}  // namespace bqc

#endif  // BQC_SERVER_OPS_H_
