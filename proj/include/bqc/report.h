// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_REPORT_H_
#define BQC_REPORT_H_

#include <string>
#include <vector>

#include "bqc/analysis.h"
#include "bqc/harness.h"

namespace bqc::report {

// Throws harness::ConfigError naming the first missing or mistyped field.
void validate_summary(const harness::json& summary);

// Writes into `dir` (created if needed):
//   expectations.csv         client Pauli expectations, one row per cell
//   server_expectations.csv  the same for the server view
//   leakage.csv              Holevo per input across choices
//   efficiency.csv           factor breakdown per choice, one column each
// Returns the paths written.
std::vector<std::string> write_report(const harness::json& summary, const std::string& dir);

// Reads an expectations CSV back; `choice` holds "choice|input".
analysis::ExpectationTable read_expectations(const std::string& path);

}  // namespace bqc::report

#endif  // BQC_REPORT_H_
