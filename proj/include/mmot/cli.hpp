#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mmot/potential.hpp"

namespace mmot::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kCertificateFailure = 2,
  kNumericalFailure = 3,
};

struct GridSpec {
  Box box;
  std::vector<int> shape;
};

/// "lo1,hi1,...,lod,hid;res" with res a single count or one per axis.
GridSpec parse_grid(const std::string& spec);
/// "start:stop:steps", inclusive, evenly spaced.
std::vector<double> parse_z_grid(const std::string& spec);

struct RunConfig {
  std::string command;            // cost | stratify | potential | quantize
  std::string measure_path;
  std::string potential_path;
  int N = 2;
  std::string kernel = "coulomb";
  double lp_tol = 1e-9;
  double gap_tol = 1e-8;
  double iter_tol = 1e-6;
  int max_iters = 500;
  std::string grid;               // raw --grid
  std::string z_grid;             // raw --z-grid
  std::string out;                // empty: stdout
  std::string format = "json";
  std::string trace_path;         // potential: defaults next to out
  std::string lp_dump;            // cost: write the primal LP as text
  unsigned workers = 0;
  int verbosity = 0;
};

/// Throws InputError on out-of-range settings.
void validate(const RunConfig& cfg);

int cmd_cost(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_stratify(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_potential(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_quantize(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Validates, dispatches, and maps exceptions to exit codes. Diagnostics go
/// to log; results go to cfg.out or, when empty, to out.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace mmot::cli
