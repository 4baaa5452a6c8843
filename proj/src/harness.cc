// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace bqc::harness {

using protocols::GateChoice;
using protocols::ProtocolKind;
using protocols::ShotOutcome;

namespace {

const std::set<std::string> kNoiseFields{"preset", "mu", "contrast", "mw_fidelity", "tdi_phase_err", "tdi_mode",
                                         "tdi_amp_imbalance", "tdi_drift_step", "tdi_drift_bound",
                                         "detection_eta", "link_eta"};

double wrap_angle(double a) {
  double w = std::fmod(a, 2 * kPi);
  if (w < 0) w += 2 * kPi;
  return w;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

GateChoice parse_choice(const json& j) {
  if (!j.is_object()) throw ConfigError("a protocol choice must be an object");
  check_keys(j, {"kind", "angles", "entangle", "oracle"}, "protocol");
  GateChoice c;
  try {
    c.kind = protocols::kind_from_name(j.at("kind").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("protocol kind: ") + e.what());
  }
  if (j.contains("angles")) {
    for (const auto& a : j.at("angles")) c.angles.push_back(wrap_angle(a.get<double>()));
  }
  c.entangle = j.value("entangle", 1);
  c.oracle = j.value("oracle", 1);
  if (c.entangle != 0 && c.entangle != 1) throw ConfigError("entangle must be 0 or 1");
  if (c.oracle < 1 || c.oracle > 4) throw ConfigError("oracle must be 1..4");
  std::size_t need = 0;
  switch (c.kind) {
    case ProtocolKind::kRz:
    case ProtocolKind::kIntra: need = 1; break;
    case ProtocolKind::kOneQubit: need = 3; break;
    case ProtocolKind::kCell: need = 7; break;
    default: break;
  }
  if (c.angles.size() != need) {
    throw ConfigError(protocols::kind_name(c.kind) + " needs " + std::to_string(need) + " angles");
  }
  return c;
}

json choice_to_json(const GateChoice& c) {
  json j{{"kind", protocols::kind_name(c.kind)}};
  if (!c.angles.empty()) j["angles"] = c.angles;
  if (c.kind == ProtocolKind::kDistributed) j["entangle"] = c.entangle;
  if (c.kind == ProtocolKind::kDj) j["oracle"] = c.oracle;
  return j;
}

NoiseConfig parse_noise(const json& j, std::string& name) {
  NoiseConfig n;
  try {
    if (j.is_string()) {
      name = j.get<std::string>();
      return preset(name);
    }
    if (!j.is_object()) throw ConfigError("noise must be a preset name or an object");
    check_keys(j, kNoiseFields, "noise");
    name = j.value("preset", std::string("ideal"));
    n = preset(name);
    if (j.size() > (j.contains("preset") ? 1u : 0u)) name += "+custom";
    if (j.contains("mu")) n.mu = j["mu"].get<double>();
    if (j.contains("contrast")) {
      n.contrast = j["contrast"].is_null() ? std::numeric_limits<double>::infinity() : j["contrast"].get<double>();
    }
    if (j.contains("mw_fidelity")) n.mw_fidelity = j["mw_fidelity"].get<double>();
    if (j.contains("tdi_phase_err")) n.tdi_phase_err = j["tdi_phase_err"].get<double>();
    if (j.contains("tdi_mode")) {
      auto m = j["tdi_mode"].get<std::string>();
      if (m == "fixed") {
        n.tdi_mode = TdiErrorMode::kFixed;
      } else if (m == "gaussian") {
        n.tdi_mode = TdiErrorMode::kGaussian;
      } else {
        throw ConfigError("tdi_mode must be fixed or gaussian");
      }
    }
    if (j.contains("tdi_amp_imbalance")) n.tdi_amp_imbalance = j["tdi_amp_imbalance"].get<double>();
    if (j.contains("tdi_drift_step")) n.tdi_drift_step = j["tdi_drift_step"].get<double>();
    if (j.contains("tdi_drift_bound")) n.tdi_drift_bound = j["tdi_drift_bound"].get<double>();
    if (j.contains("detection_eta")) n.detection_eta = j["detection_eta"].get<double>();
    if (j.contains("link_eta")) n.link_eta = j["link_eta"].get<double>();
    n.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  return n;
}

json noise_to_json(const NoiseConfig& n, const std::string& name) {
  // the echo lists every field, so only the base preset is kept
  json j{{"preset", name.substr(0, name.find('+'))},
         {"mu", n.mu},
         {"mw_fidelity", n.mw_fidelity},
         {"tdi_phase_err", n.tdi_phase_err},
         {"tdi_mode", n.tdi_mode == TdiErrorMode::kFixed ? "fixed" : "gaussian"},
         {"tdi_amp_imbalance", n.tdi_amp_imbalance},
         {"tdi_drift_step", n.tdi_drift_step},
         {"tdi_drift_bound", n.tdi_drift_bound},
         {"detection_eta", n.detection_eta},
         {"link_eta", n.link_eta}};
  j["contrast"] = std::isinf(n.contrast) ? json(nullptr) : json(n.contrast);
  return j;
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + v[i];
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell) { return hash_combine(seed, cell); }

// Runs `n` independent tasks on up to `threads` workers; results land by index.
template <typename T, typename F>
std::vector<T> parallel_map(long n, int threads, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(n));
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i = next++; i < n; i = next++) out[static_cast<std::size_t>(i)] = f(i);
  };
  int t = std::max(1, std::min<int>(threads, static_cast<int>(std::max(1L, n))));
  if (t == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    pool.emplace_back([&, k] {
      try {
        worker();
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Estimate mean_estimate(const std::vector<double>& x) {
  Estimate e;
  if (x.empty()) return e;
  double n = static_cast<double>(x.size());
  for (double v : x) e.mean += v;
  e.mean /= n;
  if (x.size() > 1) {
    double ss = 0;
    for (double v : x) ss += (v - e.mean) * (v - e.mean);
    e.error = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

// Weighted ratio estimator sum(w f) / sum(w) with its linearized error.
Estimate ratio_estimate(const std::vector<double>& w, const std::vector<double>& f) {
  Estimate e;
  double sw = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    e.mean += w[i] * f[i];
  }
  if (sw <= 0) return e;
  e.mean /= sw;
  double ss = 0;
  for (std::size_t i = 0; i < w.size(); ++i) ss += w[i] * w[i] * (f[i] - e.mean) * (f[i] - e.mean);
  e.error = std::sqrt(ss) / sw;
  return e;
}

std::vector<std::vector<std::string>> tomography_names(std::size_t qubits) {
  std::vector<std::vector<std::string>> out{{}};
  for (std::size_t q = 0; q < qubits; ++q) {
    std::vector<std::vector<std::string>> next;
    for (const auto& v : out) {
      for (const char* s : {"0", "1", "+", "+i"}) {
        auto w = v;
        w.push_back(s);
        next.push_back(w);
      }
    }
    out = std::move(next);
  }
  return out;
}

int rails_of(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::kDistributed: return 4;
    case ProtocolKind::kDj: return 8;
    default: return 2;
  }
}

// Holevo of server states across choices; when states are split by public
// bits the per-outcome values are averaged.
double leakage_of(const std::vector<const CellSummary*>& cells) {
  if (cells.size() < 2) return 0;
  bool split_ok = !cells.front()->server_by_public.empty() && !cells.front()->server_by_public.front().first.empty();
  if (split_ok) {
    std::map<std::vector<int>, std::vector<QuantumState>> by_key;
    for (const auto* c : cells) {
      for (const auto& [k, s] : c->server_by_public) by_key[k].push_back(s);
    }
    double total = 0;
    int groups = 0;
    for (const auto& [k, states] : by_key) {
      if (states.size() != cells.size()) continue;  // outcome missing for some choice
      total += analysis::holevo(states);
      ++groups;
    }
    if (groups > 0) return total / groups;
  }
  std::vector<QuantumState> states;
  for (const auto* c : cells) states.push_back(c->server_state);
  return analysis::holevo(states);
}

QuantumState sum_branches(const std::vector<const protocols::BranchResult*>& bs, bool client) {
  Matrix rho;
  SubsystemLayout layout;
  double w = 0;
  for (const auto* b : bs) {
    Matrix m = client ? Matrix(b->weight * b->client.density()) : b->raw.density();
    if (rho.size() == 0) {
      rho = m;
      layout = b->raw.layout();
    } else {
      rho += m;
    }
    w += b->weight;
  }
  if (rho.size() == 0 || w <= 0) throw std::runtime_error("no heralded branches to average");
  return QuantumState::from_density(layout, rho / w);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j, {"schema_version", "protocol", "choices", "inputs", "noise", "shots", "seed", "mode", "threads",
                 "output", "strict_truncation"},
             "config");
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
  }
  ExperimentConfig c;
  try {
    if (j.contains("protocol") == j.contains("choices")) throw ConfigError("give exactly one of protocol, choices");
    if (j.contains("protocol")) {
      c.choices.push_back(parse_choice(j["protocol"]));
    } else {
      for (const auto& x : j["choices"]) c.choices.push_back(parse_choice(x));
      if (c.choices.empty()) throw ConfigError("choices must not be empty");
    }
    auto labels = protocols::data_labels(c.choices.front().kind);
    for (const auto& ch : c.choices) {
      if (protocols::data_labels(ch.kind) != labels) throw ConfigError("all choices must act on the same qubits");
    }
    if (j.contains("inputs")) {
      const auto& in = j["inputs"];
      if (in.is_string()) {
        if (in.get<std::string>() != "tomography") throw ConfigError("inputs must be a list or \"tomography\"");
        c.tomography_inputs = true;
      } else {
        for (const auto& row : in) {
          std::vector<std::string> names = row.get<std::vector<std::string>>();
          if (names.size() != labels.size()) throw ConfigError("each input needs one state per data qubit");
          for (const auto& n : names) qubit_state(n);  // validates the name
          c.inputs.push_back(names);
        }
      }
    }
    if (j.contains("noise")) c.noise = parse_noise(j["noise"], c.noise_name);
    c.shots = j.value("shots", 100L);
    if (c.shots < 1) throw ConfigError("shots must be at least 1");
    c.seed = j.value("seed", std::uint64_t{1});
    std::string mode = j.value("mode", std::string("auto"));
    if (mode == "auto") {
      c.mode = ModeChoice::kAuto;
    } else if (mode == "density-matrix") {
      c.mode = ModeChoice::kDensityMatrix;
    } else if (mode == "trajectory") {
      c.mode = ModeChoice::kTrajectory;
    } else {
      throw ConfigError("mode must be auto, density-matrix or trajectory");
    }
    c.threads = j.value("threads", 1);
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
    if (j.contains("output")) {
      check_keys(j["output"], {"dir", "records"}, "output");
      c.output_dir = j["output"].value("dir", std::string());
      c.write_records = j["output"].value("records", true);
    }
    c.strict_truncation = j.value("strict_truncation", false);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"schema_version", kSchemaVersion}};
  json choices = json::array();
  for (const auto& ch : c.choices) choices.push_back(choice_to_json(ch));
  j["choices"] = choices;
  if (c.tomography_inputs) {
    j["inputs"] = "tomography";
  } else if (!c.inputs.empty()) {
    j["inputs"] = c.inputs;
  }
  j["noise"] = noise_to_json(c.noise, c.noise_name);
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  const char* modes[] = {"auto", "density-matrix", "trajectory"};
  j["mode"] = modes[static_cast<int>(c.mode)];
  j["strict_truncation"] = c.strict_truncation;
  return j;
}

SimMode resolve_mode(const ExperimentConfig& c, const GateChoice& choice) {
  switch (c.mode) {
    case ModeChoice::kDensityMatrix: return SimMode::kDensityMatrix;
    case ModeChoice::kTrajectory: return SimMode::kTrajectory;
    case ModeChoice::kAuto: break;
  }
  return rails_of(choice.kind) > 4 ? SimMode::kTrajectory : SimMode::kDensityMatrix;
}

std::vector<std::vector<std::string>> expand_inputs(const ExperimentConfig& c, const GateChoice& choice) {
  auto n = protocols::data_labels(choice.kind).size();
  if (c.tomography_inputs) return tomography_names(n);
  if (!c.inputs.empty()) return c.inputs;
  return {std::vector<std::string>(n, "+")};
}

QuantumState make_input(const GateChoice& choice, const std::vector<std::string>& names) {
  auto labels = protocols::data_labels(choice.kind);
  if (names.size() != labels.size()) throw ConfigError("input has the wrong number of qubits");
  QuantumState s = spin_state(labels[0], names[0]);
  for (std::size_t i = 1; i < labels.size(); ++i) s = tensor(s, spin_state(labels[i], names[i]));
  return s;
}

double expected_efficiency(const GateChoice& choice, const NoiseConfig& noise) {
  const double refl = server_mirror(noise).mean_reflectivity();
  const double det = 0.5 * detector_efficiency(noise);  // half the time bins never interfere
  auto herald = [&](int passes, double link, int pulses, double slot_fraction) {
    double t = std::pow(refl, passes) * link * det;
    if (noise.mu == 0) return slot_fraction * t;
    double mean = noise.mu * t;
    // exactly one photon detected in total, in the accepted slot
    return slot_fraction * pulses * mean * std::exp(-pulses * mean);
  };
  switch (choice.kind) {
    case ProtocolKind::kRz:
    case ProtocolKind::kIntra: return herald(1, 1, 1, 1);
    case ProtocolKind::kOneQubit: return std::pow(herald(1, 1, 1, 1), 3);
    case ProtocolKind::kCell: return std::pow(herald(1, 1, 1, 1), 7);
    case ProtocolKind::kDistributed: return herald(2, noise.link_eta, 1, 1);
    case ProtocolKind::kDj: return herald(2, noise.link_eta, 2, 0.5);
  }
  return 0;
}

RunSummary run(const ExperimentConfig& c, const RecordSink& sink) {
  if (c.shots < 1) throw ConfigError("shots must be at least 1");
  if (c.choices.empty()) throw ConfigError("no protocol choice");
  auto t0 = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.config = config_to_json(c);

  std::size_t cell_index = 0;
  for (const auto& choice : c.choices) {
    const SimMode mode = resolve_mode(c, choice);
    for (const auto& names : expand_inputs(c, choice)) {
      const std::uint64_t seed = cell_seed(c.seed, cell_index++);
      const QuantumState input = make_input(choice, names);
      const std::vector<double> drift = tdi_drift(c.noise, seed, static_cast<std::size_t>(c.shots));
      auto shots = parallel_map<ShotOutcome>(c.shots, c.threads, [&](long i) {
        double offset = drift.empty() ? 0.0 : drift[static_cast<std::size_t>(i)];
        return protocols::run_shot(choice, input, c.noise, mode, Rng::for_shot(seed, static_cast<std::uint64_t>(i)),
                                   offset);
      });

      CellSummary cell;
      cell.choice = choice.label();
      cell.input = join(names, ',');
      cell.mode = mode;
      cell.shots = c.shots;
      const QuantumState target = protocols::target_state(choice, input);
      std::vector<double> weights, fids;
      std::vector<const protocols::BranchResult*> all;
      std::map<std::vector<int>, std::vector<const protocols::BranchResult*>> by_public;
      std::optional<protocols::DjTally> tally;
      if (choice.kind == ProtocolKind::kDj) tally.emplace(choice.oracle);
      double worst_truncation = 0;
      for (std::size_t i = 0; i < shots.size(); ++i) {
        const auto& s = shots[i];
        worst_truncation = std::max(worst_truncation, s.wcs_discarded);
        double f = 0;
        for (const auto& b : s.branches) {
          f += b.weight * state_fidelity(b.client, target);
          all.push_back(&b);
          by_public[b.frame.public_bits].push_back(&b);
        }
        weights.push_back(s.weight);
        fids.push_back(s.weight > 0 ? f / s.weight : 0);
        if (tally) tally->add(s);
        if (sink) {
          ShotRecord r{cell.choice, cell.input, static_cast<long>(i), seed, s.weight, s.heralds, s.branches};
          sink(r);
        }
      }
      if (worst_truncation > 1e-3) {
        std::string msg = "photon-number cutoff drops " + std::to_string(worst_truncation) + " of a pulse";
        if (c.strict_truncation) throw photonics::TruncationError(msg);
        summary.warnings.push_back(cell.choice + ": " + msg);
      }
      cell.herald_probability = mean_estimate(weights);
      cell.fidelity = ratio_estimate(weights, fids);
      if (!all.empty()) {
        cell.client_state = sum_branches(all, true);
        cell.server_state = sum_branches(all, false);
        for (const auto& [k, bs] : by_public) cell.server_by_public.emplace_back(k, sum_branches(bs, false));
        cell.client_entropy = von_neumann_entropy(cell.client_state);
        cell.server_entropy = von_neumann_entropy(cell.server_state);
      }
      if (tally) {
        cell.dj_correct = tally->correct_verdict();
        cell.dj_server_outcomes = tally->server_outcomes();
      }
      summary.cells.push_back(std::move(cell));
    }
  }

  // Leakage per input across choices.
  std::map<std::string, std::vector<const CellSummary*>> by_input;
  for (const auto& cell : summary.cells) {
    if (cell.client_state.dim() > 0) by_input[cell.input].push_back(&cell);
  }
  if (c.choices.size() > 1) {
    for (const auto& [input, cells] : by_input) summary.leakage.emplace_back(input, leakage_of(cells));
  }

  for (const auto& choice : c.choices) {
    EfficiencyEntry e;
    e.choice = choice.label();
    std::vector<double> means, errs;
    for (const auto& cell : summary.cells) {
      if (cell.choice != e.choice) continue;
      means.push_back(cell.herald_probability.mean);
      errs.push_back(cell.herald_probability.error);
    }
    double var = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      e.simulated += means[i] / static_cast<double>(means.size());
      var += errs[i] * errs[i];
    }
    e.simulated_stderr = std::sqrt(var) / static_cast<double>(std::max<std::size_t>(1, means.size()));
    e.expected = expected_efficiency(choice, c.noise);
    e.heralds = protocols::photon_budget(choice.kind);
    summary.efficiency.push_back(e);
  }
  summary.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

std::vector<RunSummary> sweep(const ExperimentConfig& c, const std::string& param, const std::vector<double>& values) {
  std::vector<RunSummary> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig p = c;
    p.seed = hash_combine(c.seed, i);
    double v = values[i];
    if (param == "phi") {
      for (auto& ch : p.choices) {
        if (ch.angles.empty()) throw ConfigError("phi sweep needs angle-based choices");
        ch.angles[0] = wrap_angle(v);
      }
    } else {
      NoiseConfig& n = p.noise;
      if (param == "mu") {
        n.mu = v;
      } else if (param == "contrast") {
        n.contrast = v;
      } else if (param == "mw_fidelity") {
        n.mw_fidelity = v;
      } else if (param == "tdi_phase_err") {
        n.tdi_phase_err = v;
      } else if (param == "tdi_amp_imbalance") {
        n.tdi_amp_imbalance = v;
      } else if (param == "detection_eta") {
        n.detection_eta = v;
      } else if (param == "link_eta") {
        n.link_eta = v;
      } else {
        throw ConfigError("cannot sweep " + param);
      }
      try {
        n.validate();
      } catch (const std::exception& e) {
        throw ConfigError(param + "=" + std::to_string(v) + ": " + e.what());
      }
      p.noise_name = c.noise_name + "+" + param;
    }
    out.push_back(run(p));
  }
  return out;
}

namespace {

TomographyResult finish_tomography(const GateChoice& choice, const std::vector<Matrix>& outputs, int qubits) {
  TomographyResult t;
  t.choice = choice.label();
  t.chi = analysis::chi_from_outputs(outputs, qubits);
  t.ideal = analysis::chi_from_unitary(protocols::ideal_unitary(choice), qubits);
  std::tie(t.process_fidelity, t.average_fidelity) = analysis::process_and_average_fidelity(t.chi, t.ideal);
  return t;
}

}  // namespace

TomographyResult tomography(const ExperimentConfig& c, const GateChoice& choice) {
  if (choice.kind == ProtocolKind::kDj) throw ConfigError("the DJ oracle has no unitary to compare against");
  auto labels = protocols::data_labels(choice.kind);
  const int qubits = static_cast<int>(labels.size());
  SubsystemLayout layout;
  for (const auto& l : labels) layout.add_spin(l);
  const SimMode mode = resolve_mode(c, choice);
  auto inputs = analysis::tomography_inputs(qubits);
  std::vector<Matrix> outputs;
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    const std::uint64_t seed = cell_seed(c.seed, a);
    const QuantumState in = QuantumState::from_density(layout, inputs[a]);
    auto shots = parallel_map<ShotOutcome>(c.shots, c.threads, [&](long i) {
      return protocols::run_shot(choice, in, c.noise, mode, Rng::for_shot(seed, static_cast<std::uint64_t>(i)));
    });
    Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(layout.dim()), static_cast<Eigen::Index>(layout.dim()));
    double w = 0;
    for (const auto& s : shots) {
      for (const auto& b : s.branches) {
        acc += b.weight * b.client.density();
        w += b.weight;
      }
    }
    if (w <= 0) throw std::runtime_error("no heralded shots for tomography input " + std::to_string(a));
    outputs.push_back(acc / w);
  }
  return finish_tomography(choice, outputs, qubits);
}

std::vector<TomographyResult> tomography_from_records(const std::vector<ShotRecord>& records) {
  std::map<std::string, std::map<std::string, std::pair<Matrix, double>>> acc;  // choice -> input -> (sum, w)
  std::map<std::string, GateChoice> choices;
  for (const auto& r : records) {
    for (const auto& b : r.branches) {
      auto& slot = acc[r.choice][r.input];
      Matrix m = b.weight * b.client.density();
      if (slot.first.size() == 0) {
        slot.first = m;
      } else {
        slot.first += m;
      }
      slot.second += b.weight;
    }
  }
  std::vector<TomographyResult> out;
  for (const auto& [label, inputs] : acc) {
    // Rebuild the choice from its label: kind(angles) or kind:tag.
    GateChoice choice;
    auto colon = label.find(':');
    auto paren = label.find('(');
    std::string kind = label.substr(0, std::min(colon, paren));
    choice.kind = protocols::kind_from_name(kind);
    if (paren != std::string::npos) {
      for (const auto& a : split(label.substr(paren + 1, label.size() - paren - 2), ',')) {
        choice.angles.push_back(std::stod(a));
      }
    } else if (colon != std::string::npos) {
      std::string tag = label.substr(colon + 1);
      if (choice.kind == ProtocolKind::kDistributed) choice.entangle = tag == "CZ" ? 1 : 0;
      if (choice.kind == ProtocolKind::kDj) throw ConfigError("the DJ oracle has no unitary to compare against");
    }
    const int qubits = static_cast<int>(protocols::data_labels(choice.kind).size());
    std::vector<Matrix> outputs;
    for (const auto& names : tomography_names(static_cast<std::size_t>(qubits))) {
      auto it = inputs.find(join(names, ','));
      if (it == inputs.end() || it->second.second <= 0) {
        throw ConfigError(label + ": records lack tomography input " + join(names, ','));
      }
      outputs.push_back(it->second.first / it->second.second);
    }
    out.push_back(finish_tomography(choice, outputs, qubits));
  }
  return out;
}

std::vector<std::pair<std::string, double>> leakage_from_records(const std::vector<ShotRecord>& records) {
  // input -> choice -> branches
  std::map<std::string, std::map<std::string, std::vector<const protocols::BranchResult*>>> groups;
  for (const auto& r : records) {
    for (const auto& b : r.branches) groups[r.input][r.choice].push_back(&b);
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [input, by_choice] : groups) {
    if (by_choice.size() < 2) continue;
    std::vector<CellSummary> cells;
    for (const auto& [choice, bs] : by_choice) {
      CellSummary cell;
      cell.server_state = sum_branches(bs, false);
      std::map<std::vector<int>, std::vector<const protocols::BranchResult*>> by_public;
      for (const auto* b : bs) by_public[b->frame.public_bits].push_back(b);
      for (const auto& [k, v] : by_public) cell.server_by_public.emplace_back(k, sum_branches(v, false));
      cells.push_back(std::move(cell));
    }
    std::vector<const CellSummary*> ptrs;
    for (const auto& c : cells) ptrs.push_back(&c);
    out.emplace_back(input, leakage_of(ptrs));
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  auto rows = static_cast<Eigen::Index>(j.size());
  auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) throw ConfigError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

json record_to_json(const ShotRecord& r) {
  json branches = json::array();
  for (const auto& b : r.branches) {
    json clicks = json::array();
    for (const auto& c : b.clicks) {
      clicks.push_back({{"window", c.window}, {"detector", c.detector}, {"bin_a", c.bin_a}, {"bin_b", c.bin_b}});
    }
    json frame = json::object();
    for (const auto& [q, e] : b.frame.exponents()) {
      if (e.x || e.z) frame[q] = {e.x, e.z};
    }
    branches.push_back({{"weight", b.weight},
                        {"secret_bits", b.frame.secret_bits},
                        {"public_bits", b.frame.public_bits},
                        {"frame", frame},
                        {"clicks", clicks},
                        {"qubits", b.raw.layout().labels()},
                        {"state", matrix_to_json(b.raw.density())}});
  }
  return {{"choice", r.choice}, {"input", r.input}, {"shot", r.shot},   {"seed", r.seed},
          {"weight", r.weight}, {"heralds", r.heralds}, {"branches", branches}};
}

ShotRecord record_from_json(const json& j) {
  ShotRecord r;
  try {
    r.choice = j.at("choice").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.shot = j.at("shot").get<long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.weight = j.at("weight").get<double>();
    r.heralds = j.at("heralds").get<int>();
    for (const auto& jb : j.at("branches")) {
      protocols::BranchResult b;
      b.weight = jb.at("weight").get<double>();
      b.frame.secret_bits = jb.at("secret_bits").get<std::vector<int>>();
      b.frame.public_bits = jb.at("public_bits").get<std::vector<int>>();
      for (const auto& [q, e] : jb.at("frame").items()) {
        b.frame.add_x(q, e.at(0).get<int>());
        b.frame.add_z(q, e.at(1).get<int>());
      }
      for (const auto& jc : jb.at("clicks")) {
        photonics::ClickRecord c;
        c.window = jc.at("window").get<int>();
        c.detector = jc.at("detector").get<int>();
        c.bin_a = jc.at("bin_a").get<int>();
        c.bin_b = jc.at("bin_b").get<int>();
        c.interfered = c.bin_b >= 0;
        b.clicks.push_back(c);
      }
      SubsystemLayout layout;
      for (const auto& q : jb.at("qubits")) layout.add_spin(q.get<std::string>());
      b.raw = QuantumState::from_density(layout, matrix_from_json(jb.at("state")));
      b.client = b.frame.apply(b.raw).normalized();
      r.branches.push_back(std::move(b));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad shot record: ") + e.what());
  }
  return r;
}

std::vector<ShotRecord> read_records(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  std::vector<ShotRecord> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  return out;
}

json summary_to_json(const RunSummary& s) {
  json cells = json::array();
  for (const auto& c : s.cells) {
    json jc{{"choice", c.choice},
            {"input", c.input},
            {"mode", c.mode == SimMode::kDensityMatrix ? "density-matrix" : "trajectory"},
            {"shots", c.shots},
            {"herald_probability", {{"mean", c.herald_probability.mean}, {"stderr", c.herald_probability.error}}},
            {"fidelity", {{"mean", c.fidelity.mean}, {"stderr", c.fidelity.error}}},
            {"client_entropy", c.client_entropy},
            {"server_entropy", c.server_entropy}};
    if (c.client_state.dim() > 0) {
      jc["qubits"] = c.client_state.layout().labels();
      jc["client_state"] = matrix_to_json(c.client_state.density());
      jc["server_state"] = matrix_to_json(c.server_state.density());
    }
    if (c.dj_correct) jc["dj_correct_verdict"] = *c.dj_correct;
    if (c.dj_server_outcomes) jc["dj_server_outcomes"] = *c.dj_server_outcomes;
    cells.push_back(jc);
  }
  json leak = json::array();
  for (const auto& [input, chi] : s.leakage) leak.push_back({{"input", input}, {"holevo_bits", chi}});
  json eff = json::array();
  for (const auto& e : s.efficiency) {
    eff.push_back({{"choice", e.choice},
                   {"simulated", e.simulated},
                   {"simulated_stderr", e.simulated_stderr},
                   {"expected", e.expected},
                   {"heralds", e.heralds}});
  }
  return {{"schema_version", kSchemaVersion}, {"config", s.config},       {"cells", cells},
          {"leakage", leak},                  {"efficiency", eff},        {"warnings", s.warnings}};
}

json tomography_to_json(const TomographyResult& t) {
  return {{"choice", t.choice},
          {"process_fidelity", t.process_fidelity},
          {"average_fidelity", t.average_fidelity},
          {"basis", "Pauli, unnormalized, first qubit most significant"},
          {"chi", matrix_to_json(t.chi.chi)},
          {"chi_ideal", matrix_to_json(t.ideal.chi)}};
}

}  // namespace bqc::harness
