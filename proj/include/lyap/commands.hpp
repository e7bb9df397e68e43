#pragma once

#include "lyap/io.hpp"

namespace lyap {

/// Exit codes shared by the commands and the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,        // any unclassified failure
    kExitParse = 2,        // config / input file problems
    kExitNoGap = 3,        // supplied measures share one spectrum
    kExitCertification = 4, // a strict inequality or bound failed
    kExitBudget = 5,       // length/window caps exceeded
    kExitMismatch = 6,     // witness hash or recomputation mismatch
};

/// Maps the library's exception hierarchy onto ExitCode.
int exit_code_for(const std::exception& e);

struct CommandResult {
    int exit_code = kExitOk;
    std::string report; // line-delimited structured text + summary
};

/// Per-measure Lyapunov blocks and exterior top exponents.
CommandResult cmd_spectrum(const ExperimentConfig& config);

/// Full construction pipeline; writes the witness file (and n-vs-average plot
/// data next to it) when `config.out` is set.
CommandResult cmd_irregular(const ExperimentConfig& config);

/// Independent re-certification of a stored witness against a config.
CommandResult cmd_verify(const std::string& witness_path, const ExperimentConfig& config);

/// Density evidence over every legal cylinder of the configured window length.
CommandResult cmd_scan(const ExperimentConfig& config);

/// Norm-bound, cone and shadowing-instance verification suite.
CommandResult cmd_bounds(const ExperimentConfig& config);

} // namespace lyap
