#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "gyrospec/cli/config.hpp"

namespace gyrospec::cli
{

struct RunResult
{
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
};

// Dispatches the configured command and writes its CSV files under
// config.output_dir. Exit codes: 0 success, 1 domain or numerical failure,
// 2 usage error. Diagnostics go to `err`, a short summary to `out`.
RunResult run(const RunConfig &config, int threads, std::ostream &out, std::ostream &err);

// (Omega, delta) grid resolving both umbrella boundary lines near the origin at
// kappa = ratio * kappa0, for a doublet with the given beta0 and trace of D.
Grid slope_grid(double beta0, double trD, double ratio, int nx = 601, int ny = 61);

}  // namespace gyrospec::cli
