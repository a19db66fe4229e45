#pragma once

#include <iosfwd>
#include <string>

#include "mems/config.hpp"

namespace mems {

/// Subcommand drivers behind the `mems` binary.  Each writes its artifacts
/// under config.output_dir, prints a JSON summary to `out`, and returns a
/// process exit code: 0 success, 2 configuration error, 3 numerical failure.
/// Exceptions are mapped to those codes with a machine-readable JSON error
/// on `out`.

int run_formulas(const RunConfig& cfg, std::ostream& out);
int run_branch(const RunConfig& cfg, std::ostream& out);
int run_spectrum(const RunConfig& cfg, std::ostream& out);
int run_limit(const RunConfig& cfg, std::ostream& out);
int run_mp(const RunConfig& cfg, std::ostream& out);
int run_diag(const RunConfig& cfg, const std::string& input_dir, std::ostream& out);

/// Dispatch by subcommand name with exception-to-exit-code mapping.
int run(const std::string& subcommand, const RunConfig& cfg, const std::string& input_dir,
        std::ostream& out, std::ostream& err);

} // namespace mems
