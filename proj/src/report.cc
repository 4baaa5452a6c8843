// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "bqc/report.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bqc::report {

using harness::ConfigError;
using harness::json;

namespace {

void require(const json& j, const std::string& key, json::value_t type, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const auto t = j.at(key).type();
  const bool numeric = type == json::value_t::number_float || type == json::value_t::number_integer ||
                       type == json::value_t::number_unsigned;
  bool ok = t == type || (numeric && j.at(key).is_number());
  if (!ok) throw ConfigError(where + ": '" + key + "' has the wrong type");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

QuantumState state_of(const json& cell, const std::string& key) {
  SubsystemLayout layout;
  for (const auto& q : cell.at("qubits")) layout.add_spin(q.get<std::string>());
  return QuantumState::from_density(layout, harness::matrix_from_json(cell.at(key)));
}

void write_expectations(const json& summary, const std::string& path, const std::string& key) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  int qubits = 0;
  for (const auto& c : summary.at("cells")) {
    if (c.contains("qubits")) {
      qubits = static_cast<int>(c.at("qubits").size());
      break;
    }
  }
  auto words = qubits > 0 ? analysis::pauli_words(qubits) : std::vector<std::string>{};
  f << "choice,input,shots";
  for (const auto& w : words) f << "," << w;
  f << "\n";
  for (const auto& c : summary.at("cells")) {
    if (!c.contains(key)) continue;
    auto row = analysis::measure_expectations(state_of(c, key));
    f << csv_field(c.at("choice").get<std::string>()) << "," << csv_field(c.at("input").get<std::string>()) << ","
      << c.at("shots").get<long>();
    for (const auto& w : words) f << "," << fmt(row.values.at(w).value);
    f << "\n";
  }
}

}  // namespace

void validate_summary(const json& s) {
  if (!s.is_object()) throw ConfigError("summary must be a JSON object");
  require(s, "schema_version", json::value_t::number_unsigned, "summary");
  if (s.at("schema_version").get<int>() != harness::kSchemaVersion) throw ConfigError("summary: unsupported schema_version");
  require(s, "config", json::value_t::object, "summary");
  require(s, "cells", json::value_t::array, "summary");
  require(s, "leakage", json::value_t::array, "summary");
  require(s, "efficiency", json::value_t::array, "summary");
  require(s, "warnings", json::value_t::array, "summary");
  for (const auto& c : s.at("cells")) {
    require(c, "choice", json::value_t::string, "cell");
    require(c, "input", json::value_t::string, "cell");
    require(c, "shots", json::value_t::number_unsigned, "cell");
    require(c, "herald_probability", json::value_t::object, "cell");
    require(c, "fidelity", json::value_t::object, "cell");
    if (c.contains("client_state")) {
      require(c, "qubits", json::value_t::array, "cell");
      require(c, "server_state", json::value_t::array, "cell");
    }
  }
  for (const auto& l : s.at("leakage")) {
    require(l, "input", json::value_t::string, "leakage");
    require(l, "holevo_bits", json::value_t::number_float, "leakage");
  }
  for (const auto& e : s.at("efficiency")) {
    require(e, "choice", json::value_t::string, "efficiency");
    require(e, "simulated", json::value_t::number_float, "efficiency");
    require(e, "expected", json::value_t::number_float, "efficiency");
  }
}

std::vector<std::string> write_report(const json& summary, const std::string& dir) {
  validate_summary(summary);
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  auto path = [&](const std::string& name) {
    paths.push_back((std::filesystem::path(dir) / name).string());
    return paths.back();
  };
  write_expectations(summary, path("expectations.csv"), "client_state");
  write_expectations(summary, path("server_expectations.csv"), "server_state");

  {
    std::ofstream f(path("leakage.csv"));
    f << "input,holevo_bits\n";
    for (const auto& l : summary.at("leakage")) {
      f << csv_field(l.at("input").get<std::string>()) << "," << fmt(l.at("holevo_bits").get<double>()) << "\n";
    }
  }

  {
    // Factor breakdown from the echoed noise configuration.
    harness::ExperimentConfig cfg = harness::parse_config(summary.at("config"));
    const NoiseConfig& n = cfg.noise;
    const double refl = server_mirror(n).mean_reflectivity();
    const double det = 0.5 * detector_efficiency(n);
    std::ofstream f(path("efficiency.csv"));
    const auto& eff = summary.at("efficiency");
    f << "item";
    for (const auto& e : eff) f << "," << csv_field(e.at("choice").get<std::string>());
    f << "\n";
    auto row = [&](const std::string& name, auto value) {
      f << name;
      for (std::size_t i = 0; i < eff.size(); ++i) f << "," << value(i);
      f << "\n";
    };
    auto kind = [&](std::size_t i) { return cfg.choices.at(i).kind; };
    auto two_server = [&](std::size_t i) {
      return kind(i) == protocols::ProtocolKind::kDistributed || kind(i) == protocols::ProtocolKind::kDj;
    };
    row("wcs_mu", [&](std::size_t) { return fmt(n.mu); });
    row("heralds_per_run", [&](std::size_t i) { return std::to_string(eff[i].at("heralds").get<int>()); });
    row("server2_reflectivity", [&](std::size_t i) { return two_server(i) ? fmt(refl) : std::string("-"); });
    row("link", [&](std::size_t i) { return two_server(i) ? fmt(n.link_eta) : std::string("-"); });
    row("server1_reflectivity", [&](std::size_t) { return fmt(refl); });
    row("detection_incl_tdi", [&](std::size_t) { return fmt(det); });
    row("expected_total", [&](std::size_t i) { return fmt(eff[i].at("expected").get<double>()); });
    row("simulated_total", [&](std::size_t i) { return fmt(eff[i].at("simulated").get<double>()); });
    row("simulated_stderr", [&](std::size_t i) { return fmt(eff[i].value("simulated_stderr", 0.0)); });
  }
  return paths;
}

analysis::ExpectationTable read_expectations(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ConfigError(path + ": empty file");
  auto header = parse_csv_line(line);
  if (header.size() < 3 || header[0] != "choice" || header[1] != "input" || header[2] != "shots") {
    throw ConfigError(path + ": unexpected header");
  }
  analysis::ExpectationTable table;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto cols = parse_csv_line(line);
    if (cols.size() != header.size()) throw ConfigError(path + ": row has the wrong number of columns");
    analysis::ExpectationRow row;
    row.choice = cols[0] + "|" + cols[1];
    long shots = std::stol(cols[2]);
    for (std::size_t i = 3; i < cols.size(); ++i) row.values[header[i]] = {std::stod(cols[i]), shots};
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace bqc::report
