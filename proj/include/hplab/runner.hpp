#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hplab/config.hpp"

namespace hplab {

enum ExitStatus : int {
  kExitOk = 0,
  kExitAssertion = 1,
  kExitConfig = 2,
  kExitCapacity = 3,
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"genfunc-demo", "ccr-check", "free-spectrum",
                                              "s-matrix", "epsilon-sweep", "all"};
  return names;
}

struct RunOptions {
  std::string output_dir;  ///< overrides output.directory when non-empty
  bool describe = false;   ///< ccr-check: print the basis summary
};

struct ExperimentRecord {
  std::string name;
  std::vector<std::string> files;
  std::vector<std::string> failures;
  double seconds = 0.0;
};

/// Runs one subcommand with a validated config; writes files and the
/// manifest. Library errors propagate; assertion failures are returned.
std::vector<ExperimentRecord> run_experiments(const std::string& subcommand, const RunConfig& cfg,
                                              const RunOptions& opts, std::ostream& log);

/// Resolves the output directory: option, then HPLAB_OUTPUT_DIR, then config.
std::string resolve_output_dir(const RunConfig& cfg, const RunOptions& opts);

/// Applies HPLAB_THREADS, if set, as the OpenMP thread cap.
void apply_thread_cap();

/// Full entry point: load, validate, run. Prints a JSON error record to `err`
/// on failure and returns the exit status.
int run_command(const std::string& subcommand, const std::string& config_path, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

/// Dry-run validation report as JSON on `out`; never runs numerics.
int validate_command(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Writes `data` to `path` through a temporary file and rename.
void write_atomic(const std::string& path, const std::string& data);

}  // namespace hplab
