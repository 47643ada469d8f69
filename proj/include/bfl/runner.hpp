#pragma once

#include "bfl/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bfl {
namespace runner {

// shared exit-code vocabulary of the command line front end
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitPositivityAbort = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitIoError = 4;
inline constexpr int kExitUsage = 64;

/// Run a simulation and write diagnostics.csv, snap_<step>.csv files and
/// summary.csv into out_dir. Returns the exit code.
int simulate(const config::RunConfig& cfg, const std::string& out_dir);

/// Run the constitutive/derivation identity suite, print a pass/fail table
/// with per-identity residual columns. `corrupt` enables the intentional
/// negative control (the run must then fail). Returns 0 iff all pass.
int derive_check(std::ostream& out, bool corrupt, std::uint64_t seed);

/// Parameter sweep around a base configuration. Values must be strictly
/// decreasing (returns the usage exit code otherwise). Writes
/// <axis>_<stamp>.csv and sweep_summary_<stamp>.csv.
int sweep(const config::RunConfig& base, const std::string& axis,
          const std::vector<double>& values, const std::string& out_dir,
          const std::string& stamp, int threads = 1);

/// Manufactured-solution verification table, written to mms_<stamp>.csv.
int mms(const std::vector<int>& resolutions, bool diffusion_dominated,
        const std::string& out_dir, const std::string& stamp);

} // namespace runner
} // namespace bfl
