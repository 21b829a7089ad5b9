#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fgforge/grid.hpp"

namespace fgforge {

// Declarative description of one run, loaded from a JSON job file.  Schema
// (all fields optional unless noted; unknown fields are rejected):
//
// {
//   "command": "expand",             // required in files; the CLI subcommand
//                                    // overrides it
//   "grid": 16,                      // points per axis, power of two >= 8
//   "order": 6,                      // truncation order K >= 3
//   "eps": 1,                        // +1 Riemannian, -1 Lorentzian target
//   "seed": 7,                       // sample seed (ellipticity)
//   "samples": 20,                   // sample count (ellipticity)
//   "degenerate": false,             // ellipticity: use the broken symbol
//   "tolerances": {"tt": 1e-10, "residual": 1e-9,
//                  "rank": 1e-8, "laurent": 1e-10},
//   "boundary": {
//     "gamma": {"constant": {"11": 1.0},   // overrides entries of delta
//               "modes": [{"component": "12", "wavevector": [1, 0, 0],
//                          "amplitude_cos": 0.05, "amplitude_sin": 0.0}]},
//     "sigma": {"constant": {}, "modes": []}   // overrides entries of zero
//   },
//   "reference": {"name": "ads_schwarzschild", "mass": 0.5},
//   "input": "in.coeffs",            // verify/wick source file
//   "output": "out.coeffs"           // coefficient file destination
// }
//
// Mode wavevectors are limited to |k_i| <= grid/4 (band-limit guard).
struct JobSpec {
  std::string command;
  int grid = 16;
  int order = 6;
  int eps = +1;
  std::uint64_t seed = 0;
  int samples = 20;
  bool degenerate = false;
  double tt_tol = 1e-10;
  double residual_tol = 1e-9;
  double rank_threshold = 1e-8;
  double laurent_tol = 1e-10;
  std::array<double, 6> gamma_constant{1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
  std::array<double, 6> sigma_constant{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  // (component slot, mode) pairs; slots index the symmetric storage order
  // 11, 12, 13, 22, 23, 33.
  std::vector<std::pair<int, FourierMode>> gamma_modes;
  std::vector<std::pair<int, FourierMode>> sigma_modes;
  std::string reference_name;
  double reference_mass = 0.5;
  std::string input_path;
  std::string output_path;
};

JobSpec parse_job_spec(const std::string& text);
JobSpec load_job_spec(const std::string& path);

// Command-line overrides applied on top of a loaded JobSpec.
struct CliOverrides {
  std::optional<int> grid;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input;
  std::optional<std::string> output;
  bool degenerate = false;
};

void apply_overrides(JobSpec& spec, const CliOverrides& o);

// Runs one job: writes exactly one JSON report to `data` (the machine
// stream) and human-readable notes to `log`, and returns the process exit
// code: 0 success, 1 parse error, 2 constraint violation, 3 numerical or
// audit failure.  Library exceptions are mapped to the failure report
// instead of escaping.
int run_command(const JobSpec& spec, std::ostream& data, std::ostream& log);

// Convenience wrapper used by the binary: loads the job file (empty path
// gives defaults), applies overrides, forces the command, runs.  Job-file
// parse failures produce the same report-plus-exit-code contract.
int run_cli(const std::string& command, const std::string& spec_path,
            const CliOverrides& overrides, std::ostream& data,
            std::ostream& log);

}  // namespace fgforge
