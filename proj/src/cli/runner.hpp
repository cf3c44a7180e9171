#ifndef URYSOHN_CLI_RUNNER_HPP
#define URYSOHN_CLI_RUNNER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace urysohn::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNumericalFailure = 2, kBoundViolation = 3 };

inline constexpr int kCsvColumnsVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

const std::vector<std::string>& csv_columns();

struct EpsilonResult {
  ApproxSchedule<double> schedule;
  ExperimentReport<double> report;
  bool R_star_estimated = false;
};

struct RunResult {
  std::string system_name;
  BoundReport<double> constants;
  std::vector<EpsilonResult> rows;
  double wall_time = 0.0;
  bool all_passed() const;
};

/// R* for one epsilon: the configured value, or an estimate from sampled controls.
double resolve_R_star(const RunConfig& cfg, const SystemSpec<double>& sys, const GridDiscretization<double>& grid,
                      double alpha_star, bool& estimated);

RunResult run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

std::string results_csv(const RunResult& result);
std::string manifest_json(const RunConfig& cfg, const RunResult& result);
std::string convergence_svg(const RunResult& result);
std::string sha256_hex(const std::string& data);

/// Resolved schedules and family sizes, computed without solving anything.
std::string dry_run_report(const RunConfig& cfg);

/// Constants table for a system; `passes` reports the contraction condition.
std::string constants_table(const SystemSpec<double>& sys, Index resolution, bool& passes);

/// `run` verb: executes, writes artifacts, returns an exit code. Errors are
/// reported on `err`.
int run_command(const RunConfig& cfg, bool dry_run, std::ostream& out, std::ostream& err);

/// `constants` verb. `system` is a built-in name or a config file path.
int constants_command(const std::string& system, Index resolution, std::ostream& out, std::ostream& err);

} // namespace urysohn::cli

#endif // URYSOHN_CLI_RUNNER_HPP
