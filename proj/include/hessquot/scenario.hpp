#pragma once

#include <string>
#include <vector>

#include "hessquot/barrier.hpp"

namespace hq {

/// Stable process exit codes.
enum ExitCode {
    kExitPass = 0,
    kExitCheckFail = 1,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitIo = 4,
};

/// Runs a JSON scenario config end to end: executes the requested checks,
/// writes CSV profiles and a deterministic report.json (wall times go to a
/// separate timing.json), and returns the exit code contract above.
/// Overrides, when >= 0 / nonempty, replace the config values.
int run_scenario(const std::string& config_path,
                 long long seed_override = -1,
                 const std::string& out_override = "",
                 double tol_scale_override = -1.0);

/// CSV emission helpers (stable column order, header row first).
void write_csv(const std::string& path,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_profile_csv(const std::string& path, const SampledProfile& prof,
                       const GEnvelope& env, const ProfileParams& pp);

}  // namespace hq
