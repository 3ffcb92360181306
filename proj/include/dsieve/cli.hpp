#pragma once

#include <ostream>
#include <string>

#include "dsieve/config.hpp"

namespace dsieve {

enum ExitCode : int {
  kExitOk = 0,
  kExitConditionViolated = 1,
  kExitSearchExhausted = 2,
  kExitConfigError = 3,
  kExitInconclusive = 4,
  kExitInternalBreach = 5,
};

/// Runs one subcommand (sequence, check, sieve, witness, dimension, oracle,
/// report). Reports go to files under output.dir; diagnostics to `err`.
int dispatch(const std::string& command, const Config& config, std::ostream& err);

/// Full command line: `dsieve <command> [--config F] [--N n] [--threads t] [--section.key=value ...]`.
int run_cli(int argc, char** argv, std::ostream& err);

}  // namespace dsieve
