#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kmreg::cli {

/// Process exit codes; part of the command-line contract.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kSolverError = 3,
    kParameterBound = 4,
    kDiagnosticFlag = 5,
};

/// Environment variable consulted when --out is not given.
inline constexpr const char* kOutDirEnv = "KMREG_OUT_DIR";

/// Writes the method's forward solution u(t) as a grid dump to out_path.
int cmd_forward(const std::string& config_path, double t, const std::string& out_path, std::ostream& out,
                std::ostream& err);

/// Runs the configured experiment; writes report.csv, reconstruction.grid and
/// error.grid (final checkpoint) into out_dir, plus per-checkpoint grids when
/// dump_checkpoints is set.
int cmd_reconstruct(const std::string& config_path, const std::string& out_dir, bool dump_checkpoints,
                    std::ostream& out, std::ostream& err);

/// Prints operator diagnostics, resonance margins and gamma bounds.
int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Closed form vs literal sub-solve loop for each k.
int cmd_equivalence(const std::string& config_path, const std::vector<std::uint64_t>& ks, std::ostream& out,
                    std::ostream& err, double multiplier_perturbation = 0.0);

/// Parses argv and dispatches to the subcommands.
int run(int argc, char** argv);

}  // namespace kmreg::cli
