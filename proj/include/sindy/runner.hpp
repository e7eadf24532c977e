#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sindy/config.hpp"

namespace sindy {

/// Outcome of one experiment run, before anything is written to disk.
struct RunResult {
    RegressionProblem problem;
    LibraryInstance library;  // final parameters for adaptive methods
    bool is_baseline = false;
    FitReport report;                  // adaptive methods
    StlsqResult baseline;              // classical methods
    std::vector<std::string> equations;
    bool exact_recovery = false;
    bool truth_known = false;
    std::optional<Trajectory> trajectory;  // ODE experiments
    std::optional<FieldSeries> field;      // wildfire
    double seconds_total = 0.0;
};

/// Assembles data + dictionary from the config and executes the method.
RunResult execute_run(const RunConfig& config);

/// Resolves the output directory (environment variable SINDY_OUTPUT_ROOT
/// prefixes relative paths) and writes all artifacts. Every file is staged
/// to a temporary name and renamed, so failures leave no partial files.
/// Returns the resolved directory.
std::string write_run_artifacts(const RunConfig& config, const RunResult& result);

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv;
};

/// Runs one fit per knob value. knob is "lambda" (classical stlsq knob, or
/// the trainable scalar's start value for adaptive fits) or "gamma_std"
/// (spread of the gamma initialization).
SweepResult sweep_knob(const RunConfig& config, const std::string& knob,
                       const std::vector<double>& values);

std::string resolve_output_dir(const std::string& configured);

}  // namespace sindy
