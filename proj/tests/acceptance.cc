// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end checks against reference numbers. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bqc/analysis.h"
#include "bqc/deterministic.h"
#include "bqc/dj.h"
#include "bqc/gst.h"
#include "bqc/harness.h"

using namespace bqc;
using namespace bqc::harness;
using protocols::GateChoice;

namespace {

constexpr double kHalfPi = kPi / 2;

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok) { pass = pass && ok; }
};

json choice_json(const GateChoice& c) {
  json j{{"kind", protocols::kind_name(c.kind)}};
  if (!c.angles.empty()) j["angles"] = c.angles;
  if (c.kind == protocols::ProtocolKind::kDistributed) j["entangle"] = c.entangle;
  if (c.kind == protocols::ProtocolKind::kDj) j["oracle"] = c.oracle;
  return j;
}

ExperimentConfig config(const std::vector<GateChoice>& choices, const json& inputs, const json& noise, long shots,
                        std::uint64_t seed, const std::string& mode = "auto") {
  json j{{"schema_version", 1}, {"noise", noise}, {"shots", shots}, {"seed", seed}, {"mode", mode}};
  j["choices"] = json::array();
  for (const auto& c : choices) j["choices"].push_back(choice_json(c));
  if (!inputs.is_null()) j["inputs"] = inputs;
  return parse_config(j);
}

const CellSummary& cell(const RunSummary& s, const std::string& choice, const std::string& input) {
  for (const auto& c : s.cells) {
    if (c.choice == choice && c.input == input) return c;
  }
  throw std::runtime_error("no cell " + choice + " / " + input);
}

double max_leakage(const RunSummary& s) {
  double m = 0;
  for (const auto& [input, chi] : s.leakage) m = std::max(m, chi);
  return m;
}

// Server states agree across choices, per input.
double server_spread(const RunSummary& s) {
  std::map<std::string, const CellSummary*> first;
  double worst = 0;
  for (const auto& c : s.cells) {
    auto [it, fresh] = first.emplace(c.input, &c);
    if (!fresh) worst = std::max(worst, (c.server_state.density() - it->second->server_state.density()).norm());
  }
  return worst;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

std::string pm(const Estimate& e) { return fmt(e.mean) + "+/-" + fmt(e.error, 2); }

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// Number of standard errors between two estimates.
double sigmas(const Estimate& a, const Estimate& b) {
  double s = std::sqrt(a.error * a.error + b.error * b.error);
  if (s == 0) return a.mean == b.mean ? 0 : std::numeric_limits<double>::infinity();
  return std::abs(a.mean - b.mean) / s;
}

const std::vector<GateChoice> kRzGrid{protocols::rz_choice(0), protocols::rz_choice(kHalfPi), protocols::rz_choice(kPi),
                                      protocols::rz_choice(3 * kHalfPi)};
const std::vector<GateChoice> kOneQubit{protocols::one_qubit_choice(0, 0, 0),
                                        protocols::one_qubit_choice(kHalfPi, kHalfPi, kHalfPi),
                                        protocols::one_qubit_choice(kPi / 4, kHalfPi, kPi / 4)};
const std::vector<GateChoice> kIntra{protocols::intra_choice(0), protocols::intra_choice(kHalfPi)};
const std::vector<GateChoice> kDistributed{protocols::distributed_choice(1), protocols::distributed_choice(0)};

// Runs shared between criteria.
struct Shared {
  RunSummary rz, one_qubit, intra_pp, distributed_pp, dj13, dj24;
};

void blindness(Line& l) {
  struct Case {
    std::string name;
    std::vector<GateChoice> choices;
    json inputs;
  };
  std::vector<Case> cases{
      {"rz", kRzGrid, json::array({{"+"}, {"+i"}, {"0"}})},
      {"1qbg", kOneQubit, json::array({{"+i"}})},
      {"intra", kIntra, "tomography"},
      {"distributed", kDistributed, "tomography"},
      {"dj{O1,O3}", {protocols::dj_choice(1), protocols::dj_choice(3)}, json()},
      {"dj{O2,O4}", {protocols::dj_choice(2), protocols::dj_choice(4)}, json()},
  };
  for (const auto& c : cases) {
    RunSummary s = run(config(c.choices, c.inputs, "ideal", 1, 1, "density-matrix"));
    double chi = max_leakage(s), spread = server_spread(s);
    l.require(chi <= 1e-9 && spread <= 1e-9 && !s.leakage.empty());
    l.detail << c.name << " chi=" << fmt(chi, 2) << " ";
  }
}

void correctness(Line& l) {
  double worst = 1;
  auto scan = [&](const RunSummary& s) {
    for (const auto& c : s.cells) worst = std::min(worst, c.fidelity.mean);
  };
  scan(run(config(kOneQubit, json::array({{"+i"}}), "ideal", 1, 2, "density-matrix")));
  RunSummary intra = run(config(kIntra, "tomography", "ideal", 1, 2, "density-matrix"));
  RunSummary dist = run(config(kDistributed, "tomography", "ideal", 1, 2, "density-matrix"));
  scan(intra);
  scan(dist);
  l.require(worst >= 1 - 1e-9 && intra.cells.size() == 32 && dist.cells.size() == 32);
  l.detail << "min fidelity " << fmt(worst, 12) << " over " << intra.cells.size() + dist.cells.size() + 3
           << " cells; ";

  // DJ: every oracle, split by the client's secret photon outcome.
  int variants = 0;
  double worst_verdict = 1;
  for (int o = 1; o <= 4; ++o) {
    QuantumState in = make_input(protocols::dj_choice(o), {"+", "+"});
    protocols::ShotOutcome shot =
        protocols::run_shot(protocols::dj_choice(o), in, NoiseConfig{}, SimMode::kDensityMatrix, Rng(1));
    std::map<std::vector<int>, protocols::ShotOutcome> by_secret;
    for (const auto& b : shot.branches) by_secret[b.frame.secret_bits].branches.push_back(b);
    for (auto& [bits, part] : by_secret) {
      protocols::DjTally t(o);
      t.add(part);
      worst_verdict = std::min(worst_verdict, t.correct_verdict());
      ++variants;
    }
  }
  l.require(worst_verdict >= 1 - 1e-9 && variants == 8);
  l.detail << "DJ verdict min " << fmt(worst_verdict, 12) << " over " << variants << " oracle/secret variants";
}

void rz_single(Line& l, Shared& sh) {
  sh.rz = run(config(kRzGrid, json::array({{"+"}}), "rz-single", 2500, 3, "density-matrix"));
  double mean = 0;
  for (const auto& c : sh.rz.cells) mean += c.fidelity.mean / static_cast<double>(sh.rz.cells.size());
  double chi = max_leakage(sh.rz);
  l.require(mean >= 0.93 && mean <= 0.97 && chi <= 0.0045 + 0.018);
  l.detail << "mean fidelity " << fmt(mean) << " over 4x2500 shots (window [0.93, 0.97]); chi=" << fmt(chi, 2)
           << " (bound 0.0225)";
}

void one_qubit(Line& l, Shared& sh) {
  sh.one_qubit = run(config(kOneQubit, json::array({{"+i"}}), "1qbg", 2000, 4, "density-matrix"));
  const double ref[] = {0.79, 0.73, 0.71};
  const char* names[] = {"I", "H", "TX^1/2T"};
  for (std::size_t i = 0; i < 3; ++i) {
    const Estimate& f = sh.one_qubit.cells[i].fidelity;
    l.require(within(f.mean, ref[i], 0.08));
    l.detail << names[i] << " " << pm(f) << " (ref " << ref[i] << "+/-0.08) ";
  }
  double chi = max_leakage(sh.one_qubit);
  l.require(chi <= 0.04 + 0.10);
  l.detail << "chi=" << fmt(chi, 2) << " (bound 0.14)";
}

void tomography_line(Line& l, const std::vector<GateChoice>& choices, const std::string& preset, long shots,
                     const double ref[2], double tol, std::uint64_t seed) {
  ExperimentConfig c = config(choices, "tomography", preset, shots, seed, "density-matrix");
  for (std::size_t i = 0; i < 2; ++i) {
    TomographyResult t = tomography(c, choices[i]);
    double fa = analysis::average_from_process(t.process_fidelity, 4);
    l.require(within(t.process_fidelity, ref[i], tol) && std::abs(fa - t.average_fidelity) < 1e-12);
    l.detail << t.choice << " F_p " << fmt(t.process_fidelity) << " (ref " << ref[i] << "+/-" << tol << ") F_ave "
             << fmt(t.average_fidelity) << "; ";
  }
}

void intra(Line& l, Shared& sh) {
  const double ref[] = {0.87, 0.84};
  tomography_line(l, kIntra, "intra", 400, ref, 0.03, 5);
  sh.intra_pp = run(config(kIntra, json::array({{"+", "+"}}), "intra", 1000, 6, "density-matrix"));
  double chi = max_leakage(sh.intra_pp);
  l.require(chi <= 0.032 + 0.12);
  l.detail << "chi=" << fmt(chi, 2) << " (bound 0.152)";
}

void distributed(Line& l, Shared& sh) {
  sh.distributed_pp = run(config(kDistributed, json::array({{"+", "+"}}), "internode", 300, 7, "density-matrix"));
  const Estimate& bell = cell(sh.distributed_pp, "distributed:CZ", "+,+").fidelity;
  const Estimate& prod = cell(sh.distributed_pp, "distributed:I", "+,+").fidelity;
  l.require(within(bell.mean, 0.72, 0.05) && within(prod.mean, 0.70, 0.05));
  l.detail << "Bell " << pm(bell) << " (ref 0.72+/-0.05) product " << pm(prod) << " (ref 0.70+/-0.05); ";
  // ideal unitaries: I first to match the reference order
  const double ref[] = {0.74, 0.72};
  tomography_line(l, {protocols::distributed_choice(0), protocols::distributed_choice(1)}, "internode", 40, ref, 0.04,
                  8);
  double chi = max_leakage(sh.distributed_pp);
  l.require(chi <= 0.12 + 0.06);
  l.detail << "chi=" << fmt(chi, 2) << " (bound 0.18)";
}

void dj(Line& l, Shared& sh) {
  sh.dj13 = run(config({protocols::dj_choice(1), protocols::dj_choice(3)}, json(), "dj", 2000, 9));
  sh.dj24 = run(config({protocols::dj_choice(2), protocols::dj_choice(4)}, json(), "dj", 2000, 10));
  const double fid_ref[] = {0.74, 0.76, 0.70, 0.74};
  const double verdict_ref[] = {0.90, 0.80, 0.94, 0.78};
  for (int o = 1; o <= 4; ++o) {
    const RunSummary& s = (o % 2 == 1) ? sh.dj13 : sh.dj24;
    const CellSummary& c = cell(s, "dj:O" + std::to_string(o), "+,+");
    double v = c.dj_correct.value_or(0);
    l.require(within(c.fidelity.mean, fid_ref[o - 1], 0.08) && v >= verdict_ref[o - 1] - 0.05);
    l.detail << "O" << o << " F " << pm(c.fidelity) << " (ref " << fid_ref[o - 1] << "+/-0.08) verdict " << fmt(v, 3)
             << " (>= " << verdict_ref[o - 1] - 0.05 << "); ";
  }
  double chi13 = max_leakage(sh.dj13), chi24 = max_leakage(sh.dj24);
  l.require(chi13 <= 0.05 + 0.19 && chi24 <= 0.07 + 0.14);
  l.detail << "chi{O1,O3}=" << fmt(chi13, 2) << " (bound 0.24) chi{O2,O4}=" << fmt(chi24, 2) << " (bound 0.21)";
}

void efficiency(Line& l) {
  // Mean photon numbers of the efficiency breakdown.
  json intra_noise{{"preset", "intra"}, {"mu", 0.05}};
  json inter_noise{{"preset", "internode"}, {"mu", 0.2}};
  RunSummary a = run(config({protocols::intra_choice(kHalfPi)}, json::array({{"+", "+"}}), intra_noise, 200, 11,
                            "density-matrix"));
  RunSummary b = run(config({protocols::distributed_choice(1)}, json::array({{"+", "+"}}), inter_noise, 50, 12,
                            "density-matrix"));
  struct Row {
    const char* name;
    const EfficiencyEntry& e;
    double table;
  };
  for (const Row& r : {Row{"intra", a.efficiency.at(0), 1e-3}, Row{"internode", b.efficiency.at(0), 1.5e-5}}) {
    double rel = std::abs(r.e.simulated / r.table - 1);
    double rel_model = std::abs(r.e.simulated / r.e.expected - 1);
    l.require(rel <= 0.25);
    l.detail << r.name << " simulated " << fmt(r.e.simulated, 3) << "+/-" << fmt(r.e.simulated_stderr, 2)
             << " vs table " << r.table << " (" << fmt(100 * rel, 2) << "% off), factor product "
             << fmt(r.e.expected, 3) << " (" << fmt(100 * rel_model, 2) << "% off); ";
  }
}

void oracle_equivalence(Line& l, const Shared& sh) {
  double worst = 0;
  std::string worst_name;
  int compared = 0;
  auto compare = [&](const std::string& name, const Estimate& dm, const Estimate& tr) {
    double s = sigmas(dm, tr);
    ++compared;
    if (s > worst) {
      worst = s;
      worst_name = name;
    }
  };
  auto compare_runs = [&](const RunSummary& dm, long dm_shots, const RunSummary& tr, long tr_shots) {
    for (const auto& c : dm.cells) {
      const CellSummary& t = cell(tr, c.choice, c.input);
      compare(c.choice + " fidelity", c.fidelity, t.fidelity);
      compare(c.choice + " herald", c.herald_probability, t.herald_probability);
      if (c.dj_correct && t.dj_correct) {
        // binomial error per shot count; loose for the density-matrix side
        auto binom = [](double v, long n) { return Estimate{v, std::sqrt(v * (1 - v) / static_cast<double>(n))}; };
        compare(c.choice + " verdict", binom(*c.dj_correct, dm_shots), binom(*t.dj_correct, tr_shots));
      }
    }
  };
  compare_runs(sh.rz, 2500, run(config(kRzGrid, json::array({{"+"}}), "rz-single", 10000, 21, "trajectory")), 10000);
  compare_runs(sh.one_qubit, 2000, run(config(kOneQubit, json::array({{"+i"}}), "1qbg", 10000, 22, "trajectory")),
               10000);
  compare_runs(sh.intra_pp, 1000, run(config(kIntra, json::array({{"+", "+"}}), "intra", 10000, 23, "trajectory")),
               10000);
  compare_runs(sh.distributed_pp, 300,
               run(config(kDistributed, json::array({{"+", "+"}}), "internode", 10000, 24, "trajectory")), 10000);
  // DJ: the density-matrix oracle is expensive, so it runs few shots.
  compare_runs(run(config({protocols::dj_choice(1), protocols::dj_choice(3)}, json(), "dj", 30, 25, "density-matrix")),
               30, sh.dj13, 2000);
  compare_runs(run(config({protocols::dj_choice(2), protocols::dj_choice(4)}, json(), "dj", 30, 26, "density-matrix")),
               30, sh.dj24, 2000);
  l.require(worst <= 3);
  l.detail << compared << " statistics, worst " << fmt(worst, 3) << " sigma (" << worst_name << "); ";

  // Property suite: random channels, states and tomography inversion.
  Rng rng(27);
  double trace_err = 0, min_eig = 0, roundtrip = 0, gst = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix g(4, 4), h(8, 8);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) g(i, j) = cplx(rng.normal(0, 1), rng.normal(0, 1));
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) h(i, j) = cplx(rng.normal(0, 1), rng.normal(0, 1));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    Eigen::HouseholderQR<Matrix> qr(h);
    Matrix u = qr.householderQ();
    std::vector<Matrix> kraus{u.block(0, 0, 4, 4), u.block(4, 0, 4, 4)};
    SubsystemLayout lay;
    lay.add_spin("q1").add_spin("q2");
    QuantumState out = apply_kraus(QuantumState::from_density(lay, rho), kraus, {"q1", "q2"});
    trace_err = std::max(trace_err, std::abs(out.trace_weight() - 1));
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.density());
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    roundtrip = std::max(
        roundtrip, (analysis::reconstruct_2q(analysis::measure_expectations(out)).density() - out.density()).norm());
    analysis::ChiMatrix est = analysis::gate_set_tomography(
        [&](const Matrix& r) {
          Matrix o = Matrix::Zero(4, 4);
          for (const auto& k : kraus) o += k * r * k.adjoint();
          return o;
        },
        2);
    gst = std::max(gst, (est.chi - analysis::chi_from_kraus(kraus, 2).chi).norm());
  }
  l.require(trace_err < 1e-10 && min_eig > -1e-12 && roundtrip < 1e-10 && gst < 1e-8);
  l.detail << "properties: trace " << fmt(trace_err, 2) << " min eig " << fmt(min_eig, 2) << " roundtrip "
           << fmt(roundtrip, 2) << " GST " << fmt(gst, 2);
}

void deterministic(Line& l) {
  QuantumState m = spin_state("m", "+");
  double worst = 0;
  for (int n = 1; n <= 8; ++n) {
    auto o = protocols::deterministic_rz(m, "m", kPi / 3, NoiseConfig{}, 1, n);
    worst = std::max(worst, std::abs(o.failure_probability() - std::pow(2.0, -n)));
  }
  l.require(worst < 1e-12);
  l.detail << "max |P_fail - 2^-n| over n=1..8: " << fmt(worst, 2) << "; ";

  auto noisy = protocols::deterministic_rz(m, "m", kPi / 3, preset("rz-single"), 2, 12);
  double eta = noisy.herald_rate;
  Rng rng(28);
  const int runs = 20000;
  double total = 0;
  for (int i = 0; i < runs; ++i) total += static_cast<double>(protocols::sample_deterministic_rz(eta, 64, rng).attempts);
  double mc = total / runs;
  double rel = std::abs(mc / (2 / eta) - 1);
  l.require(rel <= 0.10);
  l.detail << "eta " << fmt(eta, 3) << ", MC mean attempts " << fmt(mc) << " vs 2/eta " << fmt(2 / eta) << " ("
           << fmt(100 * rel, 2) << "% off), enumerated " << fmt(noisy.expected_attempts);
}

}  // namespace

int main() {
  Shared sh;
  std::vector<std::pair<std::string, std::function<void(Line&)>>> criteria{
      {"noiseless blindness", blindness},
      {"noiseless correctness", correctness},
      {"noisy Rz", [&](Line& l) { rz_single(l, sh); }},
      {"noisy 1QBG", [&](Line& l) { one_qubit(l, sh); }},
      {"intra-node GST", [&](Line& l) { intra(l, sh); }},
      {"distributed 2QBG", [&](Line& l) { distributed(l, sh); }},
      {"DJ", [&](Line& l) { dj(l, sh); }},
      {"efficiency ledger", efficiency},
      {"trajectory vs density matrix", [&](Line& l) { oracle_equivalence(l, sh); }},
      {"deterministic scaling", deterministic},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Line l;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(l);
    } catch (const std::exception& e) {
      l.pass = false;
      l.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!l.pass) ++failed;
    std::printf("criterion %zu %s: %s  %s [%.1f s]\n", i + 1, criteria[i].first.c_str(), l.pass ? "PASS" : "FAIL",
                l.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
