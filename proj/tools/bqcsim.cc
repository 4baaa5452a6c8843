// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run, sweep, tomo, leak, report.
// Exit codes: 0 success, 1 runtime failure, 2 bad configuration or usage,
// 3 a --check threshold was missed.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "bqc/harness.h"
#include "bqc/report.h"

namespace {

using bqc::harness::ConfigError;
using bqc::harness::json;

constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> shots;
  std::optional<std::string> mode;
  std::optional<std::string> preset;
  std::optional<int> threads;
  std::string out;
};

struct Checks {
  bool enabled = false;
  std::optional<double> min_fidelity;
  std::optional<double> max_leakage;
  std::optional<double> min_process_fidelity;
};

bqc::harness::ExperimentConfig load(const std::string& path, const Overrides& o) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": not a JSON object");
  if (o.seed) j["seed"] = *o.seed;
  if (o.shots) j["shots"] = *o.shots;
  if (o.mode) j["mode"] = *o.mode;
  if (o.preset) j["noise"] = *o.preset;
  if (o.threads) j["threads"] = *o.threads;
  if (!o.out.empty()) j["output"]["dir"] = o.out;
  return bqc::harness::parse_config(j);
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

void print_summary(const bqc::harness::RunSummary& s) {
  std::cout << std::left << std::setw(28) << "choice" << std::setw(14) << "input" << std::setw(24) << "fidelity"
            << "herald probability\n";
  for (const auto& c : s.cells) {
    std::ostringstream fid, her;
    fid << std::setprecision(4) << c.fidelity.mean << " +/- " << std::setprecision(2) << c.fidelity.error;
    her << std::setprecision(4) << c.herald_probability.mean << " +/- " << std::setprecision(2)
        << c.herald_probability.error;
    std::cout << std::setw(28) << c.choice << std::setw(14) << c.input << std::setw(24) << fid.str() << her.str();
    if (c.dj_correct) std::cout << "  verdict " << std::setprecision(4) << *c.dj_correct;
    std::cout << "\n";
  }
  for (const auto& [input, chi] : s.leakage) std::cout << "leakage[" << input << "] = " << chi << " bits\n";
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "wall clock " << std::setprecision(3) << s.wall_clock_s << " s\n";
}

bool check_run(const bqc::harness::RunSummary& s, const Checks& c) {
  bool ok = true;
  for (const auto& cell : s.cells) {
    if (c.min_fidelity && cell.fidelity.mean < *c.min_fidelity) {
      std::cerr << "check failed: " << cell.choice << " [" << cell.input << "] fidelity " << cell.fidelity.mean
                << " < " << *c.min_fidelity << "\n";
      ok = false;
    }
  }
  for (const auto& [input, chi] : s.leakage) {
    if (c.max_leakage && chi > *c.max_leakage) {
      std::cerr << "check failed: leakage[" << input << "] " << chi << " > " << *c.max_leakage << "\n";
      ok = false;
    }
  }
  return ok;
}

void add_checks(CLI::App* app, Checks& c) {
  app->add_flag("--check", c.enabled, "exit with code 3 if a threshold is missed");
  app->add_option("--min-fidelity", c.min_fidelity, "lowest acceptable client fidelity");
  app->add_option("--max-leakage", c.max_leakage, "highest acceptable Holevo leakage (bits)");
}

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "override the seed");
  app->add_option("--shots", o.shots, "override the shot count");
  app->add_option("--mode", o.mode, "auto, density-matrix or trajectory");
  app->add_option("--preset", o.preset, "replace the noise model by a preset");
  app->add_option("--threads", o.threads, "worker threads (results do not depend on it)");
  app->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind quantum computing network simulator"};
  app.require_subcommand(1);

  Overrides ov;
  Checks checks;
  std::string config_path, records_path, summary_path, param, values;

  auto* run = app.add_subcommand("run", "run a configuration");
  run->add_option("config", config_path, "JSON config")->required();
  add_overrides(run, ov);
  add_checks(run, checks);

  auto* sweep = app.add_subcommand("sweep", "run a configuration over parameter values");
  sweep->add_option("config", config_path, "JSON config")->required();
  sweep->add_option("--param", param, "noise field or phi")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  add_overrides(sweep, ov);

  std::string tomo_out;
  auto* tomo = app.add_subcommand("tomo", "process tomography from tomography-input records");
  tomo->add_option("records", records_path, "JSONL shot records")->required();
  tomo->add_option("--out", tomo_out, "write chi matrices to this JSON file");
  tomo->add_flag("--check", checks.enabled, "exit with code 3 if a threshold is missed");
  tomo->add_option("--min-process-fidelity", checks.min_process_fidelity, "lowest acceptable F_p");

  auto* leak = app.add_subcommand("leak", "server-side Holevo leakage from records");
  leak->add_option("records", records_path, "JSONL shot records")->required();
  leak->add_flag("--check", checks.enabled, "exit with code 3 if a threshold is missed");
  leak->add_option("--max-leakage", checks.max_leakage, "highest acceptable leakage (bits)");

  std::string report_dir = "report";
  auto* rep = app.add_subcommand("report", "CSV tables from a run summary");
  rep->add_option("summary", summary_path, "summary.json")->required();
  rep->add_option("--out", report_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      auto cfg = load(config_path, ov);
      std::unique_ptr<std::ofstream> records;
      if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        if (cfg.write_records) records = std::make_unique<std::ofstream>(cfg.output_dir + "/records.jsonl");
      }
      bqc::harness::RecordSink sink;
      if (records) sink = [&](const bqc::harness::ShotRecord& r) { *records << bqc::harness::record_to_json(r).dump() << "\n"; };
      auto summary = bqc::harness::run(cfg, sink);
      if (!cfg.output_dir.empty()) write_json(bqc::harness::summary_to_json(summary), cfg.output_dir + "/summary.json");
      print_summary(summary);
      if (checks.enabled && !check_run(summary, checks)) return kExitCheck;
    } else if (sweep->parsed()) {
      auto cfg = load(config_path, ov);
      std::vector<double> vals;
      std::stringstream ss(values);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
          vals.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw ConfigError("bad value '" + item + "'");
        }
      }
      auto results = bqc::harness::sweep(cfg, param, vals);
      json out = json::array();
      for (std::size_t i = 0; i < results.size(); ++i) {
        json s = bqc::harness::summary_to_json(results[i]);
        s["sweep"] = {{"param", param}, {"value", vals[i]}};
        out.push_back(s);
        std::cout << param << " = " << vals[i] << "\n";
        print_summary(results[i]);
      }
      if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_json(out, cfg.output_dir + "/sweep.json");
      }
    } else if (tomo->parsed()) {
      auto results = bqc::harness::tomography_from_records(bqc::harness::read_records(records_path));
      json out = json::array();
      bool ok = true;
      for (const auto& t : results) {
        std::cout << t.choice << "  F_p " << t.process_fidelity << "  F_ave " << t.average_fidelity << "\n";
        out.push_back(bqc::harness::tomography_to_json(t));
        if (checks.min_process_fidelity && t.process_fidelity < *checks.min_process_fidelity) ok = false;
      }
      if (!tomo_out.empty()) write_json(out, tomo_out);
      if (checks.enabled && !ok) return kExitCheck;
    } else if (leak->parsed()) {
      auto results = bqc::harness::leakage_from_records(bqc::harness::read_records(records_path));
      if (results.empty()) std::cerr << "records hold fewer than two choices per input\n";
      bool ok = true;
      for (const auto& [input, chi] : results) {
        std::cout << "leakage[" << input << "] = " << chi << " bits\n";
        if (checks.max_leakage && chi > *checks.max_leakage) ok = false;
      }
      if (checks.enabled && !ok) return kExitCheck;
    } else if (rep->parsed()) {
      std::ifstream f(summary_path);
      if (!f) throw ConfigError("cannot open " + summary_path);
      json s;
      try {
        f >> s;
      } catch (const std::exception& e) {
        throw ConfigError(summary_path + ": " + e.what());
      }
      for (const auto& p : bqc::report::write_report(s, report_dir)) std::cout << p << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bqc::photonics::TruncationError& e) {
    std::cerr << "truncation: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
