#pragma once

#include <vector>

#include "framelab/config.hpp"

namespace framelab {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitCertification = 3, kExitRuntime = 4 };

/// Resolutions a run visits: grid.refine when given, otherwise grid.N alone.
std::vector<int> resolution_ladder(const Config& c);

/// The ladder N, 3N/2, 2N, ... with K entries (each rounded to an even count).
std::vector<int> refine_ladder(int N, int K);

/// Dispatches on the mode and writes every artifact under c.out.
/// Returns kExitOk or kExitCertification; runtime failures propagate as exceptions.
int run(const Config& c);

} // namespace framelab
