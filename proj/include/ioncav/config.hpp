#pragma once

// Config-file parsing for the command-line tool: a flat, human-editable
// `key = value` format with `#` comments, strict key checking (unknown keys
// are rejected with a nearest-name suggestion), per-experiment required-key
// sets, and canonical serialization that round-trips through the parser.
//
// Units: all rates and frequencies in rad/s, times in seconds; eta, eta_L,
// varphi, phi_drive, beta, r_max, n_threshold are dimensionless or rad.
// Complex values are written `x` (real) or `(re,im)`.

#include <string>
#include <vector>

#include "ioncav/model.hpp"

namespace ioncav {

struct RunConfig {
  SystemParams system;
  // True when `delta = auto`; the runner resolves the detuning per
  // experiment (squeeze -> omega_ii; filter -> the m = M resonance;
  // semiclassical -> per beta inside the driver).
  bool delta_auto = false;
  int n_cav = 0;
  int n_vib = 0;
  std::string experiment;       // params|evolve|regimes|squeeze|filter|semiclassical
  std::string regime = "auto";  // auto|weak|strong (strong/weak force an override)
  std::string out;              // output path; empty -> "<experiment>.<format>"
  std::string format = "csv";   // csv|json
  double t_final = 0.0;
  int samples = 0;
  std::string engine = "analytic";  // squeeze: analytic|numeric
  int M = 0;
  cplx beta{0.0, 0.0};
  double n_threshold = 0.0;
  std::vector<double> delta_list;
  int m_max = 0;
  std::vector<cplx> beta_list;
  double r_max = 0.0;
  std::vector<std::string> warnings;  // soft diagnostics from parsing

  bool operator==(const RunConfig& o) const;
  bool operator!=(const RunConfig& o) const { return !(*this == o); }
};

// Parses and validates a config document. `expected_experiment` (when
// non-empty) fills a missing `experiment` key and must match a present one.
// Throws ConfigError naming the offending key and constraint.
RunConfig parse_config(const std::string& text,
                       const std::string& expected_experiment = "");

// Canonical form: every key applicable to the chosen experiment, one per
// line, doubles at full round-trip precision. parse_config(serialize_config(c))
// compares equal to c.
std::string serialize_config(const RunConfig& cfg);

// Reads a file and parses it; file errors become ConfigError.
RunConfig load_config(const std::string& path,
                      const std::string& expected_experiment = "");

// Sets a scalar (double-valued) key on a parsed config, for sweep mode.
// Returns false if the key is not sweepable. Setting "delta" clears
// delta_auto.
bool set_sweep_value(RunConfig& cfg, const std::string& key, double value);

}  // namespace ioncav
