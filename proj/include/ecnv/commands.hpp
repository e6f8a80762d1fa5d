#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecnv/config.hpp"
#include "ecnv/error.hpp"

namespace ecnv {

enum class Command { run, ensemble, diagnose, measure, selftest };

std::optional<Command> parse_command(std::string_view name);

struct CommandOptions {
  std::string config_path;  // may be empty for selftest
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

/// 2 for configuration and parameter errors, 3 for blow-up, 4 for selftest
/// failures, 1 otherwise.
int exit_code(ErrorCategory category);

/// Runs one command and returns the process exit code. Failures are reported
/// on err as a single line "error: category=<name> message=<text>".
int execute(Command command, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Diagnostics file header: t, the norm columns, then <budget>_res and
/// <budget>_cum for each enabled budget (l2q, l4q, h1u).
std::vector<std::string> diagnostics_header(const DiagnosticsSpec& spec);

struct PathOutput {
  std::vector<std::vector<double>> rows;  // diagnostics rows, t0 first
  SimState final_state;
  std::array<double, 3> cumulative{};     // l2q, l4q, h1u (0 when disabled)
  double min_poincare_ratio = 0.0;
};

/// One path of the configured run (driver (cfg.seed, path_id)). Snapshots go to
/// out_dir/snapshots when cfg.snapshot_every > 0; on blow-up the last good state
/// is written to out_dir/blowup_path<id>.ecnv before the error propagates.
PathOutput simulate_path(const RunConfig& cfg, std::uint64_t path_id, const std::string& out_dir);

/// Column-wise mean over paths, summed in path order. All paths must share the time grid.
std::vector<std::vector<double>> mean_rows(const std::vector<PathOutput>& paths);

/// Each command writes its files under the output directory and a short
/// key = value summary to out.
void cmd_run(const RunConfig& cfg, std::ostream& out);
void cmd_ensemble(const RunConfig& cfg, std::ostream& out);
void cmd_diagnose(const RunConfig& cfg, std::ostream& out);
void cmd_measure(const RunConfig& cfg, std::ostream& out);
/// Returns true when every check passed.
bool cmd_selftest(std::ostream& out);

}  // namespace ecnv
