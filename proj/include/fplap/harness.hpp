#pragma once

#include <string>

#include "fplap/config.hpp"

namespace fplap {

// CLI entry points. Each returns the process exit code:
//   0  success (converged/nontrivial solve, no violations, complete study)
//   1  honest negative outcome (non-convergence, violation, partial study)
//   2  is reserved for validation/config errors and is produced by the
//      caller catching the exceptions these functions throw.
// Output files all start with a provenance header; reruns with the same
// config and seed are byte-identical (wall-time columns in study tables are
// the documented exception).

int cmd_solve(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_study(const RunConfig& cfg);
int cmd_mesh_info(const RunConfig& cfg, const std::string& kernel_dump = "");

}
