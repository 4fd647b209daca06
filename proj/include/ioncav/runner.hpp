#pragma once

// CLI pipeline: resolve a RunConfig into an experiment run, render the
// result as CSV or JSON, and map library errors to process exit codes.

#include <string>
#include <vector>

#include <json.hpp>

#include "ioncav/config.hpp"

namespace ioncav {

struct CliOptions {
  std::string experiment;       // subcommand name; fixes cfg.experiment
  std::string config_path;
  std::string out_override;     // --out; empty keeps the config value
  std::string format_override;  // --format; empty keeps the config value
  std::string sweep;            // --sweep key=start:stop:steps; empty = none
};

// Numeric result table plus the stable (deterministic) metadata that the
// JSON format and the runinfo sidecar embed.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json metadata;
};

// Resolves regime and detuning, runs the configured experiment, and returns
// the table. Throws the library error types on failure.
ResultTable run_experiment(const RunConfig& cfg);

// Renders with %.17g floats; both are byte-deterministic for a fixed table.
std::string render_csv(const ResultTable& t);
std::string render_json(const ResultTable& t);

// The sequence of sweep values for "key=start:stop:steps" (steps points;
// steps = 1 yields just start). Throws ConfigError on malformed input or a
// non-sweepable key.
std::vector<double> parse_sweep_values(const std::string& sweep,
                                       std::string& key_out);

// Full pipeline: load + override + sweep fan-out + write outputs (plus a
// <out>.runinfo.json sidecar carrying wall time and the same metadata).
// Returns the process exit code; never throws.
// Exit codes: 0 success, 2 configuration, 3 physics precondition,
// 4 truncation, 1 unexpected.
int run_cli(const CliOptions& opts);

}  // namespace ioncav
