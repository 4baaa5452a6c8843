// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_HARNESS_H_
#define BQC_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bqc/analysis.h"
#include "bqc/dj.h"
#include "bqc/gst.h"
#include "bqc/protocols.h"

namespace bqc::harness {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModeChoice { kAuto, kDensityMatrix, kTrajectory };

struct ExperimentConfig {
  std::vector<protocols::GateChoice> choices;  // one or more client choices
  // Inputs as per-qubit state names; empty means |+> on every data qubit.
  std::vector<std::vector<std::string>> inputs;
  bool tomography_inputs = false;  // replaces `inputs` by the product set
  std::string noise_name = "ideal";
  NoiseConfig noise;
  long shots = 100;
  std::uint64_t seed = 1;
  ModeChoice mode = ModeChoice::kAuto;
  int threads = 1;
  std::string output_dir;  // empty: no files
  bool write_records = true;
  bool strict_truncation = false;
};

// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);
json config_to_json(const ExperimentConfig& c);

// Density-matrix below 5 rails, trajectories above.
SimMode resolve_mode(const ExperimentConfig& c, const protocols::GateChoice& choice);
std::vector<std::vector<std::string>> expand_inputs(const ExperimentConfig& c, const protocols::GateChoice& choice);
QuantumState make_input(const protocols::GateChoice& choice, const std::vector<std::string>& names);

struct Estimate {
  double mean = 0;
  double error = 0;  // standard error
};

// Statistics of one (choice, input) cell.
struct CellSummary {
  std::string choice;
  std::string input;
  SimMode mode = SimMode::kDensityMatrix;
  long shots = 0;
  Estimate herald_probability;  // per run, including every herald of the gate
  Estimate fidelity;            // frame-corrected client vs ideal target
  QuantumState client_state;    // weighted mean, normalized
  QuantumState server_state;    // weighted mean of uncorrected branches, normalized
  // Server states split by public bits (empty key when there are none).
  std::vector<std::pair<std::vector<int>, QuantumState>> server_by_public;
  double client_entropy = 0;
  double server_entropy = 0;
  std::optional<double> dj_correct;  // DJ only
  std::optional<protocols::XDistribution> dj_server_outcomes;
};

struct EfficiencyEntry {
  std::string choice;
  double simulated = 0;
  double simulated_stderr = 0;
  double expected = 0;  // product of configured efficiencies
  int heralds = 0;
};

struct RunSummary {
  json config;
  std::vector<CellSummary> cells;
  // Holevo over choices of the server state, per input (bits).
  std::vector<std::pair<std::string, double>> leakage;
  std::vector<EfficiencyEntry> efficiency;
  std::vector<std::string> warnings;
  // Not serialized, so summaries stay byte-identical between runs.
  double wall_clock_s = 0;
};

// One heralded run (or, in density-matrix mode, one noise realization with
// all of its herald branches).
struct ShotRecord {
  std::string choice;
  std::string input;
  long shot = 0;
  std::uint64_t seed = 0;
  double weight = 0;
  int heralds = 0;
  std::vector<protocols::BranchResult> branches;
};

using RecordSink = std::function<void(const ShotRecord&)>;

// Deterministic in (config, seed) for any thread count; records reach the
// sink ordered by (cell, shot).
RunSummary run(const ExperimentConfig& c, const RecordSink& sink = {});

// One run per value; point i uses seed hash(seed, i). Parameters: a noise
// field (mu, contrast, mw_fidelity, tdi_phase_err, tdi_amp_imbalance,
// detection_eta, link_eta) or "phi" (first angle of every choice).
std::vector<RunSummary> sweep(const ExperimentConfig& c, const std::string& param, const std::vector<double>& values);

// Expected herald probability from the configured efficiencies for one run
// of `choice` (mean mirror reflectivity for every server pass).
double expected_efficiency(const protocols::GateChoice& choice, const NoiseConfig& noise);

// Process tomography of a two- (or one-) qubit protocol choice.
struct TomographyResult {
  std::string choice;
  analysis::ChiMatrix chi;
  analysis::ChiMatrix ideal;
  double process_fidelity = 0;
  double average_fidelity = 0;
};
TomographyResult tomography(const ExperimentConfig& c, const protocols::GateChoice& choice);
// Same from records of a tomography-input run, grouped by input label.
std::vector<TomographyResult> tomography_from_records(const std::vector<ShotRecord>& records);

// Server-side Holevo over the choices present in the records, per input.
// Groups with public bits are evaluated separately and averaged.
std::vector<std::pair<std::string, double>> leakage_from_records(const std::vector<ShotRecord>& records);

// Serialization. Matrices are row-major [[re, im], ...] lists.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json record_to_json(const ShotRecord& r);
ShotRecord record_from_json(const json& j);
std::vector<ShotRecord> read_records(const std::string& path);
json summary_to_json(const RunSummary& s);
json tomography_to_json(const TomographyResult& t);

}  // namespace bqc::harness

#endif  // BQC_HARNESS_H_
