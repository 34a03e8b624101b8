// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "run_config.hpp"
#include "xbias/report.hpp"
#include "xbias/simulate.hpp"

namespace xbias::cli {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfigError = 2, kNumericDivergence = 3 };

/// "gaussian[:mu[:sigma]]", "exponential[:rate]", "heavytail[:beta[:c[:x0]]]"; x0 may be "e".
MeasurementModel parse_model(const std::string& spec, std::size_t n);

BoundReport cmd_bound(const RunConfig& config);
BoundReport cmd_simulate(const RunConfig& config);
std::vector<SweepRow> cmd_sweep(const RunConfig& config);
BoundReport cmd_estimate(const RunConfig& config);
BoundReport cmd_norms(const RunConfig& config);

/// Runs the command named by config.command and renders it in the configured format.
std::string render(const RunConfig& config);

/// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xbias::cli
